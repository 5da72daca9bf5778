"""Caching placements and the average-BER objective they are scored by.

A placement is the vector ``counts`` where ``counts[i]`` is the number of
helpers holding the ``(i+1)``-th most popular file.  Which helper holds a
copy does not matter on average, so the vector is the whole decision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .ber_model import ChannelParams, file_ber
from .popularity import Popularity

__all__ = [
    "Placement",
    "RegimeWarning",
    "average_ber",
    "even_placement",
    "single_file_placement",
    "doubly_placement",
]


class RegimeWarning(UserWarning):
    """Inputs are valid but outside the regime the optimality results assume."""


@dataclass(frozen=True)
class Placement:
    counts: tuple[int, ...]
    total_slots: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"counts must be non-negative, got {counts}")
        if sum(counts) != self.total_slots:
            raise ValueError(f"counts sum to {sum(counts)}, expected total_slots={self.total_slots}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def of(cls, counts: Sequence[int]) -> "Placement":
        counts = tuple(int(c) for c in counts)
        return cls(counts, sum(counts))

    @property
    def library_size(self) -> int:
        return len(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def to_list(self) -> list[int]:
        return list(self.counts)


def average_ber(p: Placement, pop: Popularity, ch: ChannelParams) -> float:
    """Request-weighted BER ``sum_i q_i * file_ber(n_i)`` of a placement."""
    if len(p.counts) != pop.library_size:
        raise ValueError(f"placement covers {len(p.counts)} files, popularity {pop.library_size}")
    return math.fsum(q * file_ber(n, ch) for q, n in zip(pop.q, p.counts))


def _check_sizes(N: int, F: int) -> None:
    if N < 1 or F < 1:
        raise ValueError(f"need N >= 1 and F >= 1, got N={N}, F={F}")


def _warn_if_full(distinct: int, F: int) -> None:
    if distinct == F:
        warnings.warn(
            f"placement caches all {F} files; optimality results assume more files than helpers",
            RegimeWarning,
            stacklevel=3,
        )


def even_placement(N: int, F: int) -> Placement:
    """Top ``N`` files cached once each."""
    _check_sizes(N, F)
    if N > F:
        raise ValueError(f"even placement needs N <= F, got N={N}, F={F}")
    _warn_if_full(N, F)
    return Placement((1,) * N + (0,) * (F - N), N)


def single_file_placement(N: int, F: int) -> Placement:
    """Most popular file cached in every helper."""
    _check_sizes(N, F)
    return Placement((N,) + (0,) * (F - 1), N)


def doubly_placement(k: int, N: int, F: int) -> Placement:
    """Top ``k`` files cached twice, the next ``N - 2k`` once.

    ``k = 0`` is the even placement.
    """
    _check_sizes(N, F)
    if not 0 <= k <= N // 2:
        raise ValueError(f"doubly placement needs 0 <= k <= N//2 = {N // 2}, got k={k}")
    distinct = N - k
    if distinct > F:
        raise ValueError(f"doubly placement with k={k} needs {distinct} files, library has {F}")
    _warn_if_full(distinct, F)
    counts = (2,) * k + (1,) * (N - 2 * k) + (0,) * (F - distinct)
    return Placement(counts, N)
