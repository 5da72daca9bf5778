"""Monte Carlo check of the closed-form BER expressions.

Fading is simulated from first principles: each helper link has an
exponentially distributed SNR (Rayleigh amplitude), the user picks the
strongest of the ``n`` links caching its file, and a miss goes to the macro
cell.  Instead of simulating bits, each trial contributes its conditional
error probability ``alpha0 * Q(sqrt(alpha1 * snr))``; the mean is the same and
the variance far smaller.

Trials are split into fixed-size chunks.  Chunk ``c`` draws from its own
Philox stream keyed by ``(seed, stream, c)``, and chunk sums are combined in
chunk order, so results are identical for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .ber_model import ChannelParams, q_function
from .placement import Placement
from .popularity import Popularity

__all__ = [
    "FadingSample",
    "BerEstimate",
    "CHUNK_SIZE",
    "chunk_rng",
    "sample_max_snr",
    "simulate_file_ber",
    "simulate_average_ber",
]

CHUNK_SIZE = 1 << 16
_FADING_STREAM = 0
_REQUEST_STREAM = 1


class FadingSample(NamedTuple):
    """Instantaneous received SNR of one delivery."""

    snr: float


@dataclass(frozen=True)
class BerEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)

    def within(self, value: float, sigmas: float = 4.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.std_error


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    """Counter-based generator for one chunk of one stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, chunk))))


def sample_max_snr(n: int, mean: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Maximum of ``n`` i.i.d. exponential SNRs with the given mean, ``size`` draws."""
    if n < 1:
        raise ValueError(f"need n >= 1 links, got {n}")
    return mean * rng.standard_exponential((size, n)).max(axis=1)


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK_SIZE, trials - start)) for c, start in enumerate(range(0, trials, CHUNK_SIZE))]


def _combine(partials: list[tuple[float, float, int]], trials: int, seed: int) -> BerEstimate:
    # partials: (sum, sum of squared deviations from the chunk mean, chunk size)
    total = math.fsum(s for s, _, _ in partials)
    mean = total / trials
    # pooled sum of squares: within-chunk part plus between-chunk part
    ss = math.fsum(m2 + size * (s / size - mean) ** 2 for s, m2, size in partials)
    var = ss / (trials - 1) if trials > 1 else 0.0
    return BerEstimate(mean, math.sqrt(var / trials), trials, seed)


def _run(trials: int, seed: int, work, workers: int) -> BerEstimate:
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    chunks = _chunks(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda cs: work(*cs), chunks))
    else:
        partials = [work(c, size) for c, size in chunks]
    return _combine(partials, trials, seed)


def _stats(values: np.ndarray) -> tuple[float, float, int]:
    s = float(values.sum())
    return s, float(((values - s / values.size) ** 2).sum()), values.size


def _pe(snr: np.ndarray, ch: ChannelParams) -> np.ndarray:
    return ch.alpha0 * q_function(np.sqrt(ch.alpha1 * snr))


def simulate_file_ber(n: int, ch: ChannelParams, trials: int, seed: int, workers: int = 1) -> BerEstimate:
    """Estimate the mean BER of a file cached by ``n`` helpers (``n = 0``: cellular)."""
    if n < 0:
        raise ValueError(f"helper count must be >= 0, got {n}")

    def work(c: int, size: int):
        rng = chunk_rng(seed, _FADING_STREAM, c)
        if n == 0:
            snr = ch.nu_bar * rng.standard_exponential((size, 1))[:, 0]
        else:
            snr = sample_max_snr(n, ch.rho_bar, size, rng)
        return _stats(_pe(snr, ch))

    return _run(int(trials), seed, work, workers)


def simulate_average_ber(
    p: Placement,
    pop: Popularity,
    ch: ChannelParams,
    trials: int,
    seed: int,
    workers: int = 1,
) -> BerEstimate:
    """Estimate the average BER of a placement: draw the requested file, then fade.

    Fading uses the same per-chunk stream as :func:`simulate_file_ber`, so a
    placement whose requests all miss reproduces the cellular estimate exactly.
    """
    if len(p.counts) != pop.library_size:
        raise ValueError(f"placement covers {len(p.counts)} files, popularity {pop.library_size}")
    counts = np.asarray(p.counts)
    width = max(1, int(counts.max(initial=0)))
    cdf = np.cumsum(pop.as_array())
    cdf[-1] = 1.0

    def work(c: int, size: int):
        files = np.searchsorted(cdf, chunk_rng(seed, _REQUEST_STREAM, c).random(size), side="right")
        files = np.minimum(files, len(cdf) - 1)
        n = counts[files]
        draws = chunk_rng(seed, _FADING_STREAM, c).standard_exponential((size, width))
        # max over the first n columns of each row; misses use column 0 at the cellular mean
        masked = np.where(np.arange(width) < np.maximum(n, 1)[:, None], draws, 0.0)
        snr = np.where(n > 0, ch.rho_bar * masked.max(axis=1), ch.nu_bar * draws[:, 0])
        return _stats(_pe(snr, ch))

    return _run(int(trials), seed, work, workers)
