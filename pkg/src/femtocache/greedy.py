"""Greedy caching placement.

Each step adds one cached copy to the file with the largest marginal BER
reduction ``q_k * delta_p(n_k)``.  When ``beta >= 2`` the per-file gains are
decreasing in ``n_k``, and the greedy placement is optimal for every number
of helpers.  Because an optimal placement is non-increasing in popularity
rank, step ``m`` only needs to look at the ``m + 1`` most popular files.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple

from .ber_model import ChannelParams, delta_p
from .placement import Placement, average_ber
from .popularity import Popularity

__all__ = [
    "GreedyStep",
    "GreedyTrace",
    "HelperAssignment",
    "greedy_place",
    "m_round_greedy",
    "assign_helpers",
]


class GreedyStep(NamedTuple):
    iteration: int
    file: int  # 1-based popularity rank
    gain: float
    ber: float


@dataclass
class GreedyTrace:
    """Per-iteration record of a greedy run.

    Iteration 0 is the initial copy of the most popular file.
    ``certified`` is False when ``beta < 2``: the run is still well defined
    but no longer guaranteed optimal.
    """

    steps: list[GreedyStep] = field(default_factory=list)
    certified: bool = True
    comparisons: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", "file", "gain", "ber"])
        for s in self.steps:
            writer.writerow([s.iteration, s.file, repr(s.gain), repr(s.ber)])
        return buf.getvalue()


def _gain(k: int, counts: list[int], pop: Popularity, ch: ChannelParams) -> float:
    return pop.q[k] * delta_p(counts[k], ch)


def _argmax(candidates, counts, pop, ch) -> tuple[int, float]:
    best, best_gain = -1, float("-inf")
    for k in candidates:
        g = _gain(k, counts, pop, ch)
        if g > best_gain:  # strict: lowest index wins ties
            best, best_gain = k, g
    return best, best_gain


def greedy_place(
    N: int,
    pop: Popularity,
    ch: ChannelParams,
    restricted: bool = True,
) -> tuple[Placement, GreedyTrace]:
    """Place ``N`` single-file helpers greedily.

    Parameters
    ----------
    N : int
        Number of helpers, each caching one file.
    pop : Popularity
    ch : ChannelParams
    restricted : bool
        Compare only the ``m + 1`` most popular files at iteration ``m``.
        ``False`` scans the whole library; the result is the same whenever
        the optimal placement is popularity ordered.

    Returns
    -------
    placement : Placement
    trace : GreedyTrace
    """
    if N < 1:
        raise ValueError(f"need at least one helper, got N={N}")
    F = pop.library_size
    counts = [0] * F
    counts[0] = 1
    trace = GreedyTrace(certified=ch.certified)
    trace.steps.append(GreedyStep(0, 1, _gain(0, [0] * F, pop, ch), average_ber(Placement(tuple(counts), 1), pop, ch)))
    for m in range(1, N):
        window = min(m + 1, F) if restricted else F
        j, gain = _argmax(range(window), counts, pop, ch)
        trace.comparisons += window
        counts[j] += 1
        ber = average_ber(Placement(tuple(counts), m + 1), pop, ch)
        trace.steps.append(GreedyStep(m, j + 1, gain, ber))
    return Placement(tuple(counts), N), trace


@dataclass(frozen=True)
class HelperAssignment:
    """Which files each helper stores (1-based ranks, ``M`` distinct per helper)."""

    per_helper: tuple[tuple[int, ...], ...]
    method: str = "rounds"

    def __post_init__(self):
        for h, files in enumerate(self.per_helper):
            if len(set(files)) != len(files):
                raise ValueError(f"helper {h} stores a file twice: {files}")

    def counts(self, library_size: int) -> tuple[int, ...]:
        out = [0] * library_size
        for files in self.per_helper:
            for f in files:
                out[f - 1] += 1
        return tuple(out)


def _match_round(copies: list[int], holders: list[set[int]]) -> list[int] | None:
    """Give each helper one file from ``copies`` that it does not hold yet.

    First fit in the given order, repaired with augmenting paths when first fit
    gets stuck.  Returns the file per helper, or None if no matching exists.
    """
    n_helpers = len(holders)
    owner = [-1] * n_helpers  # helper -> index into copies

    def augment(c: int, seen: set[int]) -> bool:
        for h in range(n_helpers):
            if h in seen or copies[c] in holders[h]:
                continue
            seen.add(h)
            if owner[h] == -1 or augment(owner[h], seen):
                owner[h] = c
                return True
        return False

    for c in range(len(copies)):
        free = next((h for h in range(n_helpers) if owner[h] == -1 and copies[c] not in holders[h]), None)
        if free is not None:
            owner[free] = c
        elif not augment(c, set()):
            return None
    return [copies[c] for c in owner]


def _round_robin(counts: list[int], N: int) -> tuple[tuple[int, ...], ...]:
    # Copies of a file are consecutive and number at most N, so they land on distinct helpers.
    order = sorted(range(len(counts)), key=lambda i: (-counts[i], i))
    flat = [i + 1 for i in order for _ in range(counts[i])]
    per_helper = [[] for _ in range(N)]
    for pos, f in enumerate(flat):
        per_helper[pos % N].append(f)
    return tuple(tuple(sorted(files)) for files in per_helper)


def assign_helpers(rounds: list[list[int]], N: int, library_size: int) -> HelperAssignment:
    """Materialize per-helper contents from per-round file selections.

    Within a round, files already held by more helpers are placed first.  If
    some round admits no conflict-free assignment given earlier rounds, the
    whole assignment is rebuilt round-robin from the total counts instead.
    """
    holders: list[set[int]] = [set() for _ in range(N)]
    for chosen in rounds:
        forbidden = {f: sum(f in h for h in holders) for f in chosen}
        copies = sorted(chosen, key=lambda f: (-forbidden[f], f))
        matched = _match_round(copies, holders)
        if matched is None:
            counts = [0] * library_size
            for r in rounds:
                for f in r:
                    counts[f - 1] += 1
            return HelperAssignment(_round_robin(counts, N), method="round_robin")
        for h, f in enumerate(matched):
            holders[h].add(f)
    return HelperAssignment(tuple(tuple(sorted(h)) for h in holders), method="rounds")


def m_round_greedy(
    N: int,
    M: int,
    pop: Popularity,
    ch: ChannelParams,
) -> tuple[Placement, HelperAssignment]:
    """Fill ``N`` helpers with ``M`` files each by ``M`` greedy rounds.

    Round one is :func:`greedy_place`.  Every later round adds ``N`` more
    copies by the same rule, skipping files already cached by all ``N``
    helpers.  Not optimal in general.
    """
    if M < 1:
        raise ValueError(f"need M >= 1, got M={M}")
    F = pop.library_size
    if M > F:
        raise ValueError(f"each helper needs M={M} distinct files but the library has {F}")
    first, _ = greedy_place(N, pop, ch)
    counts = list(first.counts)
    rounds = [[i + 1 for i in range(F) for _ in range(counts[i])]]
    for _ in range(1, M):
        chosen = []
        for _ in range(N):
            eligible = [k for k in range(F) if counts[k] < N]
            j, _gain_value = _argmax(eligible, counts, pop, ch)
            counts[j] += 1
            chosen.append(j + 1)
        rounds.append(chosen)
    placement = Placement(tuple(counts), N * M)
    assignment = assign_helpers(rounds, N, F)
    assert assignment.counts(F) == placement.counts
    return placement, assignment
