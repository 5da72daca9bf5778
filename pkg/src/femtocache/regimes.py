"""Zipf-exponent thresholds that identify the optimal placement in closed form.

Adding a copy of a file either converts misses into hits (file diversity gain,
``q_k * delta_p(0)``) or enlarges the selection pool of an already cached file
(channel diversity gain, ``q_k * delta_p(n_k)``).  Comparing the two across
popularity ranks yields thresholds on the Zipf exponent:

* ``gamma <= gamma0``: even placement is optimal;
* ``gamma >= gamma1``: single-file placement is optimal;
* ``gamma2(k) <= gamma <= gamma3(k)`` at high SNR: top ``k`` files twice.

All require ``beta >= 2``.  Logarithms are natural; only ratios appear.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .ber_model import ChannelParams, delta_p
from .placement import Placement, doubly_placement, even_placement, single_file_placement
from .popularity import Popularity

__all__ = [
    "Regime",
    "RegimeClassification",
    "ThresholdWarning",
    "file_gain",
    "channel_gain",
    "gamma0",
    "gamma0_prime",
    "gamma1",
    "gamma2",
    "gamma3",
    "classify",
]


class ThresholdWarning(UserWarning):
    """A threshold was evaluated where its denominator is not positive."""


class Regime(str, enum.Enum):
    EVEN = "Even"
    SINGLE_FILE = "SingleFile"
    DOUBLY = "Doubly"
    GREEDY_REQUIRED = "GreedyRequired"
    HIGH_SNR_DOUBLY_HALF = "HighSnrDoublyHalf"


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    k: int | None = None
    thresholds: dict[str, float] = field(default_factory=dict)
    certified: bool = False

    def __post_init__(self):
        if self.regime in (Regime.DOUBLY, Regime.HIGH_SNR_DOUBLY_HALF) and (self.k is None or self.k < 1):
            raise ValueError(f"{self.regime.value} needs k >= 1, got {self.k}")

    @property
    def label(self) -> str:
        if self.regime is Regime.DOUBLY:
            return f"Doubly({self.k})"
        return self.regime.value

    def placement(self, N: int, F: int) -> Placement | None:
        """Closed-form placement for this regime, or None when greedy is needed."""
        if self.regime is Regime.EVEN:
            return even_placement(N, F)
        if self.regime is Regime.SINGLE_FILE:
            return single_file_placement(N, F)
        if self.regime in (Regime.DOUBLY, Regime.HIGH_SNR_DOUBLY_HALF):
            return doubly_placement(self.k, N, F)
        return None

    def to_dict(self) -> dict:
        return {
            "regime": self.label,
            "k": self.k,
            "thresholds": dict(self.thresholds),
            "certified": self.certified,
        }


def file_gain(k: int, pop: Popularity, ch: ChannelParams) -> float:
    """BER reduction from caching the uncached ``k``-th file once."""
    return pop[k] * delta_p(0, ch)


def channel_gain(k: int, n_k: int, pop: Popularity, ch: ChannelParams) -> float:
    """BER reduction from adding a copy of the ``k``-th file already held ``n_k >= 1`` times."""
    if n_k < 1:
        raise ValueError("channel gain needs n_k >= 1; use file_gain for an uncached file")
    return pop[k] * delta_p(n_k, ch)


def _log(x: float) -> float:
    # beta <= 1 makes the gain ratios zero or negative; the thresholds are then undefined
    if x > 0.0:
        return math.log(x)
    return -math.inf if x == 0.0 else math.nan


def _log_one_minus_sqrt_ratio(rho: float, c: float) -> float:
    # log(1 - sqrt((1+rho)/(c+rho))), stable when the ratio is close to 1
    return _log(-math.expm1(0.5 * math.log1p((1.0 - c) / (c + rho))))


def _log_gain_ratio(ch: ChannelParams) -> float:
    """``log(delta_p(0) / delta_p(1))``, the numerator shared by gamma0, gamma2 and gamma3."""
    rho = ch.rho_eff
    lhs = _log_one_minus_sqrt_ratio(rho, ch.beta_eff)
    return lhs - _log_one_minus_sqrt_ratio(rho, 2.0) if math.isfinite(lhs) else lhs


def _check_N(N: int) -> None:
    if N < 2:
        raise ValueError(f"thresholds need N >= 2, got N={N}")


def _check_k(k: int, N: int) -> None:
    if not 1 <= k <= N // 2:
        raise ValueError(f"k must lie in 1..{N // 2} for N={N}, got k={k}")


def _ratio(numerator: float, denominator: float) -> float:
    if not math.isfinite(numerator):
        return numerator if denominator > 0.0 else -numerator
    if denominator == 0.0:
        return math.copysign(math.inf, numerator) if numerator != 0.0 else math.nan
    return numerator / denominator


def gamma0(N: int, ch: ChannelParams) -> float:
    """Largest Zipf exponent for which even placement is optimal."""
    _check_N(N)
    return _log_gain_ratio(ch) / math.log(N)


def gamma0_prime(N: int, ch: ChannelParams) -> float:
    """Limit of ``gamma0`` as ``beta -> inf``; beyond it even placement never wins."""
    _check_N(N)
    return -_log_one_minus_sqrt_ratio(ch.rho_eff, 2.0) / math.log(N)


def gamma1(N: int, ch: ChannelParams) -> float:
    """Smallest Zipf exponent for which single-file placement is optimal.

    Equal to ``log2(delta_p(0) / delta_p(N-1))``: the most popular file's
    ``N``-th copy must still beat the first copy of the second file.
    """
    _check_N(N)
    return _log(delta_p(0, ch) / delta_p(N - 1, ch)) / math.log(2.0)


def _gamma_band_edge(upper: int, lower: int, ch: ChannelParams) -> float:
    denominator = math.log(upper) - math.log(lower)
    if denominator <= 0.0:
        warnings.warn(
            f"threshold denominator log({upper}) - log({lower}) is not positive",
            ThresholdWarning,
            stacklevel=3,
        )
    return _ratio(_log_gain_ratio(ch), denominator)


def gamma2(k: int, N: int, ch: ChannelParams) -> float:
    """Lower Zipf-exponent edge of the doubly-``k`` band (high SNR)."""
    _check_N(N)
    _check_k(k, N)
    return _gamma_band_edge(N - k + 1, k, ch)


def gamma3(k: int, N: int, ch: ChannelParams) -> float:
    """Upper Zipf-exponent edge of the doubly-``k`` band (high SNR).

    Meaningful for ``k < N // 2``.  At ``k = N // 2`` the denominator is zero
    (odd N, giving +-inf) or negative (even N); the signed value is returned
    with a :class:`ThresholdWarning`.
    """
    _check_N(N)
    _check_k(k, N)
    return _gamma_band_edge(N - k, k + 1, ch)


def _thresholds(N: int, ch: ChannelParams) -> dict[str, float]:
    out = {
        "gamma0": gamma0(N, ch),
        "gamma0_prime": gamma0_prime(N, ch),
        "gamma1": gamma1(N, ch),
    }
    half = N // 2
    for k in range(1, half + 1):
        out[f"gamma2({k})"] = gamma2(k, N, ch)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        for k in range(1, half):
            out[f"gamma3({k})"] = gamma3(k, N, ch)
    return out


def _doubly_band(gamma: float, N: int, thresholds: dict[str, float]) -> int | None:
    half = N // 2
    for k in range(1, half):
        if thresholds[f"gamma2({k})"] <= gamma <= thresholds[f"gamma3({k})"]:
            return k
    if gamma >= thresholds[f"gamma2({half})"]:
        return half
    return None


def classify(N: int, pop: Popularity, ch: ChannelParams, high_snr: bool) -> RegimeClassification:
    """Decide which closed-form placement is optimal, if any.

    ``high_snr`` states that the caller accepts the asymptotic (large-SNR)
    doubly-placement results.  For the doubly regimes ``certified`` only
    records that the hypotheses on ``beta`` and ``gamma`` hold; the results
    themselves are limits.
    """
    _check_N(N)
    gamma = pop.gamma
    thresholds = _thresholds(N, ch)
    if ch.beta_eff >= 2.0:
        if gamma <= thresholds["gamma0"]:
            return RegimeClassification(Regime.EVEN, None, thresholds, True)
        if gamma >= thresholds["gamma1"]:
            return RegimeClassification(Regime.SINGLE_FILE, None, thresholds, True)
        if high_snr:
            k = _doubly_band(gamma, N, thresholds)
            if k is not None:
                return RegimeClassification(Regime.DOUBLY, k, thresholds, True)
        return RegimeClassification(Regime.GREEDY_REQUIRED, None, thresholds, True)
    if high_snr:
        return RegimeClassification(Regime.HIGH_SNR_DOUBLY_HALF, N // 2, thresholds, True)
    return RegimeClassification(Regime.GREEDY_REQUIRED, None, thresholds, False)
