"""High-precision reference values built without the package's own formulas.

The BERs are obtained by adaptive quadrature of the defining expectation
``E[Q(sqrt(2 X))]`` against the density of the (maximum) SNR, in mpmath.
"""

from __future__ import annotations

import itertools

import mpmath as mp

mp.mp.dps = 40


def _q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def cellular_ber_ref(nu: float) -> float:
    nu = mp.mpf(nu)
    f = lambda x: _q(mp.sqrt(2 * x)) * mp.exp(-x / nu) / nu
    return float(mp.quad(f, [0, nu / 10, nu, 10 * nu, mp.inf]))


def cluster_ber_ref(n: int, rho: float) -> float:
    rho = mp.mpf(rho)

    def f(x):
        u = mp.exp(-x / rho)
        return _q(mp.sqrt(2 * x)) * n / rho * u * (1 - u) ** (n - 1)

    return float(mp.quad(f, [0, rho / 100, rho / 10, rho, 10 * rho, mp.inf]))


def file_ber_ref(n: int, rho: float, nu: float) -> float:
    return cellular_ber_ref(nu) if n == 0 else cluster_ber_ref(n, rho)


def zipf_ref(F: int, gamma: float) -> list[float]:
    w = [mp.mpf(k) ** -mp.mpf(gamma) for k in range(1, F + 1)]
    s = mp.fsum(w)
    return [float(x / s) for x in w]


def brute_force_optimum(N: int, q: list[float], ber_of_count: list[float], cap: int | None = None, total: int | None = None):
    """Minimum of sum q_k * ber(n_k) over every composition, by itertools.product."""
    total = N if total is None else total
    cap = total if cap is None else cap
    best = None
    for counts in itertools.product(range(cap + 1), repeat=len(q)):
        if sum(counts) != total:
            continue
        value = sum(qk * ber_of_count[c] for qk, c in zip(q, counts))
        if best is None or value < best[0]:
            best = (value, counts)
    return best
