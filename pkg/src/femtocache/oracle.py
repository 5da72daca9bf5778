"""Exhaustive search over caching placements for small instances.

Serves as ground truth for the greedy algorithm and the regime classifier.
By default only popularity-ordered placements (``n_1 >= n_2 >= ...``) are
enumerated, i.e. integer partitions of the slot count; an optimal placement
always has that shape when popularity is non-uniform.  The unrestricted mode
enumerates every composition and exists to check that claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .ber_model import ChannelParams, file_ber
from .placement import Placement, average_ber
from .popularity import Popularity

__all__ = [
    "BudgetExceeded",
    "SearchReport",
    "DEFAULT_BUDGET",
    "count_candidates",
    "iter_candidates",
    "exhaustive_optimal",
]

DEFAULT_BUDGET = 10_000_000
# Relative gap below which two placements count as tied (a few hundred ulps).
TIE_TOL = 1e-13


class BudgetExceeded(RuntimeError):
    """The search would evaluate more candidates than allowed."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(f"exhaustive search needs {estimate} candidates, budget is {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass
class SearchReport:
    best: Placement
    best_ber: float
    candidates_evaluated: int
    pruned: bool
    ties: list[Placement] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best": self.best.to_list(),
            "best_ber": self.best_ber,
            "candidates_evaluated": self.candidates_evaluated,
            "pruned": self.pruned,
            "ties": [t.to_list() for t in self.ties],
        }


@lru_cache(maxsize=None)
def _count_partitions(total: int, parts: int, largest: int) -> int:
    # partitions of `total` into at most `parts` parts, each <= `largest`
    if total == 0:
        return 1
    if parts == 0 or largest == 0:
        return 0
    return sum(_count_partitions(total - p, parts - 1, p) for p in range(1, min(total, largest) + 1))


@lru_cache(maxsize=None)
def _count_compositions(total: int, parts: int, cap: int) -> int:
    if parts == 0:
        return 1 if total == 0 else 0
    return sum(_count_compositions(total - c, parts - 1, cap) for c in range(min(total, cap) + 1))


def count_candidates(total: int, library_size: int, prune_ordered: bool = True, cap: int | None = None) -> int:
    """Number of placements the search would visit."""
    cap = total if cap is None else cap
    if prune_ordered:
        return _count_partitions(total, library_size, cap)
    return _count_compositions(total, library_size, cap)


def _partitions(total: int, parts: int, largest: int) -> Iterator[tuple[int, ...]]:
    # non-increasing, largest parts first, so output is in decreasing lexicographic order
    if total == 0:
        yield ()
        return
    if parts == 0:
        return
    for p in range(min(total, largest), 0, -1):
        for rest in _partitions(total - p, parts - 1, p):
            yield (p,) + rest


def _compositions(total: int, parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for c in range(min(total, cap), -1, -1):
        for rest in _compositions(total - c, parts - 1, cap):
            yield (c,) + rest


def iter_candidates(
    total: int, library_size: int, prune_ordered: bool = True, cap: int | None = None
) -> Iterator[tuple[int, ...]]:
    """Yield count vectors of length ``library_size`` summing to ``total``."""
    cap = total if cap is None else cap
    if prune_ordered:
        for part in _partitions(total, library_size, cap):
            yield part + (0,) * (library_size - len(part))
    else:
        yield from _compositions(total, library_size, cap)


def exhaustive_optimal(
    N: int,
    pop: Popularity,
    ch: ChannelParams,
    prune_ordered: bool = True,
    *,
    total: int | None = None,
    cap: int | None = None,
    budget: int = DEFAULT_BUDGET,
    report_ties: bool = False,
) -> SearchReport:
    """Minimize the average BER over all placements of ``total`` cached copies.

    Parameters
    ----------
    N : int
        Number of helpers.  Also the slot count unless ``total`` is given.
    pop, ch
        Popularity and channel parameters.
    prune_ordered : bool
        Restrict to popularity-ordered placements.
    total : int, optional
        Total cached copies, e.g. ``N * M`` when each helper stores ``M`` files.
    cap : int, optional
        Per-file copy limit; ``N`` is the natural value when ``total > N``.
    budget : int
        Refuse with :class:`BudgetExceeded` above this many candidates.
    report_ties : bool
        Also collect every placement within a relative ``1e-13`` of the optimum.

    Ties (relative gap ``<= 1e-13``) are broken towards the lexicographically
    largest count vector, which is the one greedy tie-breaking produces.
    """
    F = pop.library_size
    total = N if total is None else total
    if total < 0 or N < 1:
        raise ValueError(f"need N >= 1 and total >= 0, got N={N}, total={total}")
    estimate = count_candidates(total, F, prune_ordered, cap)
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)
    if estimate == 0:
        raise ValueError(f"no placement of {total} copies over {F} files with cap {cap}")

    weighted = [[q * file_ber(n, ch) for n in range(total + 1)] for q in pop.q]
    best_counts, best_ber = None, math.inf
    scores: list[tuple[float, tuple[int, ...]]] = []
    evaluated = 0
    for counts in iter_candidates(total, F, prune_ordered, cap):
        evaluated += 1
        ber = math.fsum(weighted[i][c] for i, c in enumerate(counts))
        if report_ties:
            scores.append((ber, counts))
        # candidates arrive in decreasing lexicographic order; a later one must be
        # better by more than rounding noise to displace the incumbent
        if ber < best_ber * (1.0 - TIE_TOL):
            best_counts, best_ber = counts, ber

    best = Placement(best_counts, total)
    ties = []
    if report_ties:
        ties = [Placement(c, total) for b, c in scores if b <= best_ber * (1.0 + TIE_TOL)]
    return SearchReport(best, average_ber(best, pop, ch), evaluated, prune_ordered, ties)
