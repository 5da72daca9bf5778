"""Average bit error rate of a cached file under Rayleigh fading.

A file cached by ``n`` helpers is delivered over the strongest of ``n``
independent Rayleigh links, so its received SNR is the maximum of ``n``
exponential variables with mean ``rho_bar``.  A file cached nowhere is
delivered by the macro base station at mean SNR ``nu_bar``.

Two evaluation routes exist for the cluster BER:

* the alternating binomial sum, exact in real arithmetic but losing roughly
  one decimal digit per helper in double precision;
* Gauss-Legendre quadrature of the Craig-form integral
  ``(1/pi) int_0^{pi/2} E[exp(-lambda / sin^2 t)] dt``, whose integrand
  ``n! / prod_{j=1..n} (j + rho/sin^2 t)`` is positive and cancellation free.

``cluster_ber`` picks between them automatically; both are public so they can
be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = [
    "ChannelParams",
    "q_function",
    "cellular_ber",
    "cluster_ber",
    "cluster_ber_binomial",
    "cluster_ber_quadrature",
    "file_ber",
    "delta_p",
    "BINOMIAL_MAX_N",
    "QUADRATURE_NODES",
]

#: Largest helper count for which the alternating sum is ever used.
BINOMIAL_MAX_N = 15
#: Default Gauss-Legendre order for the Craig-form integrals.
QUADRATURE_NODES = 64
# Relative rounding-error budget the alternating sum must meet to be trusted.
_BINOMIAL_REL_TOL = 1e-11
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ChannelParams:
    """Average SNRs (linear scale) and modulation constants of one cluster.

    Parameters
    ----------
    rho_bar : float
        Mean received SNR of cluster (helper) links.
    nu_bar : float
        Mean received SNR of the cellular link.
    alpha0, alpha1 : float
        Constants of the coherent-detection BER ``alpha0 * Q(sqrt(alpha1 * snr))``.
        The defaults (1, 2) correspond to QPSK.

    Notes
    -----
    ``beta = rho_bar / nu_bar`` is derived.  Use :meth:`from_beta` to keep a
    given ratio exact (e.g. ``beta == 2.0``), which matters for the tie
    ``delta_p(0) == delta_p(1)``.
    """

    rho_bar: float
    nu_bar: float
    alpha0: float = 1.0
    alpha1: float = 2.0
    beta: float = field(init=False)

    def __post_init__(self):
        for name in ("rho_bar", "nu_bar", "alpha0", "alpha1"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "beta", self.rho_bar / self.nu_bar)

    @classmethod
    def from_beta(cls, rho_bar: float, beta: float, alpha0: float = 1.0, alpha1: float = 2.0) -> "ChannelParams":
        if not (math.isfinite(beta) and beta > 0):
            raise ValueError(f"beta must be positive and finite, got {beta!r}")
        params = cls(rho_bar, rho_bar / beta, alpha0, alpha1)
        object.__setattr__(params, "beta", float(beta))
        return params

    @property
    def helpers_stronger(self) -> bool:
        """False when ``beta <= 1``, i.e. helpers are no stronger than the macro cell."""
        return self.beta > 1.0

    @property
    def certified(self) -> bool:
        """Whether ``beta >= 2``, the regime in which greedy placement is provably optimal."""
        return self.beta >= 2.0

    @property
    def rho_eff(self) -> float:
        # alpha0 * Q(sqrt(alpha1 * x)) == alpha0 * Q(sqrt(2 * x')) with x' = alpha1 * x / 2
        return self.rho_bar * self.alpha1 / 2.0

    @property
    def nu_eff(self) -> float:
        return self.nu_bar * self.alpha1 / 2.0

    @property
    def beta_eff(self) -> float:
        # beta itself when constructed from it, so exact ratios survive
        return self.beta


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(Z > x)``, via ``erfc``.

    Accepts scalars or arrays.  Deep tails underflow quietly to 0.
    """
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def _single_link_ber(snr: float) -> float:
    # 1/2 (1 - sqrt(s/(1+s))) without cancellation at large s
    return -0.5 * math.expm1(-0.5 * math.log1p(1.0 / snr))


def _sqrt_gap(rho: float, c: float) -> float:
    """``1/2 (sqrt(rho/(1+rho)) - sqrt(rho/(c+rho)))`` in a cancellation-free form."""
    a = rho / (1.0 + rho)
    b = rho / (c + rho)
    return 0.5 * (rho * (c - 1.0) / ((1.0 + rho) * (c + rho))) / (math.sqrt(a) + math.sqrt(b))


def cellular_ber(params: ChannelParams) -> float:
    """Mean BER of a cache miss served by the macro base station."""
    return params.alpha0 * _single_link_ber(params.nu_eff)


@lru_cache(maxsize=None)
def _gl_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = (x + 1.0) * (math.pi / 4.0)
    weights = w * (math.pi / 4.0) / math.pi
    return 1.0 / np.sin(theta) ** 2, weights


@lru_cache(maxsize=4096)
def _beta_integral(n: int, rho: float, nodes: int, difference: bool) -> float:
    # E[exp(-s * max of n Exp(rho))] = n! / prod_{j=1..n} (j + s*rho)
    inv_sin2, weights = _gl_rule(nodes)
    a = rho * inv_sin2
    integrand = np.ones_like(a)
    for j in range(1, n + 1):
        integrand *= j / (j + a)
    if difference:
        # cluster(n) - cluster(n+1): the (n+1)-th factor turns into a / (n+1+a)
        integrand *= a / (n + 1 + a)
    return float(np.dot(weights, integrand))


@lru_cache(maxsize=4096)
def _alternating_sum(n: int, rho: float, shift: int) -> tuple[float, float]:
    """``1/2 sum_m C(n,m) (-1)^m sqrt(rho/(m+shift+rho))`` and its rounding bound."""
    terms = [math.comb(n, m) * (-1) ** m * math.sqrt(rho / (m + shift + rho)) for m in range(n + 1)]
    bound = 0.5 * 4.0 * _EPS * sum(abs(t) for t in terms)
    return 0.5 * math.fsum(terms), bound


def _check_helpers(n, minimum: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"helper count must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        if minimum == 1:
            raise ValueError("cluster BER needs n >= 1; route n = 0 to cellular_ber")
        raise ValueError(f"helper count must be >= {minimum}, got {n}")
    return n


def cluster_ber_binomial(n: int, params: ChannelParams) -> float:
    """Cluster BER by the closed-form alternating sum (accurate only for small n or low SNR)."""
    n = _check_helpers(n, 1)
    return params.alpha0 * _alternating_sum(n, params.rho_eff, 0)[0]


def cluster_ber_quadrature(n: int, params: ChannelParams, nodes: int = QUADRATURE_NODES) -> float:
    """Cluster BER by Gauss-Legendre quadrature of the Craig-form integral."""
    n = _check_helpers(n, 1)
    return params.alpha0 * _beta_integral(n, params.rho_eff, nodes, False)


def cluster_ber(n: int, params: ChannelParams) -> float:
    """Mean BER of a file cached by ``n >= 1`` helpers with max-SNR selection.

    The alternating sum is used for ``n <= BINOMIAL_MAX_N`` as long as its
    rounding error stays below a relative ``1e-11``; otherwise the quadrature
    route is taken.
    """
    n = _check_helpers(n, 1)
    rho = params.rho_eff
    if n == 1:
        return params.alpha0 * _single_link_ber(rho)
    if n <= BINOMIAL_MAX_N:
        value, bound = _alternating_sum(n, rho, 0)
        if bound <= _BINOMIAL_REL_TOL * value:
            return params.alpha0 * value
    return params.alpha0 * _beta_integral(n, rho, QUADRATURE_NODES, False)


def file_ber(n: int, params: ChannelParams) -> float:
    """Mean BER of a file cached by ``n >= 0`` helpers (``n = 0`` is a cache miss)."""
    n = _check_helpers(n, 0)
    return cellular_ber(params) if n == 0 else cluster_ber(n, params)


def delta_p(n: int, params: ChannelParams) -> float:
    """BER reduction ``file_ber(n) - file_ber(n + 1)`` from one more cached copy.

    Evaluated directly rather than by subtraction: ``n = 0`` and ``n = 1``
    use closed forms, larger ``n`` the alternating sum when it is accurate
    and the positive difference integrand otherwise.
    """
    n = _check_helpers(n, 0)
    rho = params.rho_eff
    if n == 0:
        return params.alpha0 * _sqrt_gap(rho, params.beta_eff)
    if n == 1:
        return params.alpha0 * _sqrt_gap(rho, 2.0)
    if n <= BINOMIAL_MAX_N:
        value, bound = _alternating_sum(n, rho, 1)
        if bound <= _BINOMIAL_REL_TOL * value:
            return params.alpha0 * value
    return params.alpha0 * _beta_integral(n, rho, QUADRATURE_NODES, True)
