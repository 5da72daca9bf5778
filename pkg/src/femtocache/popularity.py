"""Zipf request popularity over a library of files."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Popularity", "zipf"]


@dataclass(frozen=True)
class Popularity:
    """Request probabilities ``q`` of files ranked from most to least popular."""

    library_size: int
    gamma: float
    q: tuple[float, ...]

    def __post_init__(self):
        if len(self.q) != self.library_size:
            raise ValueError(f"q has {len(self.q)} entries, expected {self.library_size}")

    def __len__(self) -> int:
        return self.library_size

    def __getitem__(self, k: int) -> float:
        """Probability of the ``k``-th most popular file, 1-based."""
        if not 1 <= k <= self.library_size:
            raise IndexError(f"file index {k} outside 1..{self.library_size}")
        return self.q[k - 1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)


def zipf(library_size: int, gamma: float) -> Popularity:
    """Zipf law ``q_i = i**-gamma / sum_j j**-gamma`` for ``i = 1..library_size``.

    >>> zipf(2, 1.0).q
    (0.6666666666666666, 0.3333333333333333)
    """
    if isinstance(library_size, bool) or int(library_size) != library_size or library_size < 1:
        raise ValueError(f"library_size must be a positive integer, got {library_size!r}")
    if not math.isfinite(gamma) or gamma < 0:
        raise ValueError(f"gamma must be finite and non-negative, got {gamma!r}")
    library_size = int(library_size)
    weights = [i ** -float(gamma) for i in range(1, library_size + 1)]
    total = 0.0
    for w in reversed(weights):  # smallest terms first
        total += w
    return Popularity(library_size, float(gamma), tuple(w / total for w in weights))
