"""Lazy and correlated classical random walks, exact and asymptotic."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from ._errors import ContractError, ResourceError
from .specfun import bessel_i_row, bessel_i_scaled
from .walk import Distribution

__all__ = [
    "lazy_rw_distribution",
    "lazy_rw_closed_form",
    "lazy_asymptotic_pmf",
    "lazy_asymptotic_distribution",
    "correlated_rw_distribution",
    "correlated_asymptotic_pmf",
    "correlated_asymptotic_distribution",
]

DP_MAX_STEPS = 100_000
CLOSED_FORM_MAX_STEPS = 1_000_000


def _check_rate(r: float, lo_open: bool = True, hi_closed: bool = True) -> float:
    r = float(r)
    ok = (r > 0 if lo_open else r >= 0) and (r <= 1 if hi_closed else r < 1)
    if not ok or not math.isfinite(r):
        raise ContractError(f"rate r={r!r} out of range")
    return r


def lazy_rw_distribution(r: float, n: int) -> Distribution:
    """Exact law of the lazy walk after n steps by dynamic programming.

    Each step stays put with probability ``1 - r`` and moves to either
    neighbour with probability ``r / 2``.
    """
    r = _check_rate(r)
    n = int(n)
    if n < 0:
        raise ContractError("n must be >= 0")
    if n > DP_MAX_STEPS:
        raise ResourceError(f"n={n} exceeds DP bound {DP_MAX_STEPS}")
    p = np.zeros(2 * n + 1)
    p[n] = 1.0
    stay, move = 1.0 - r, 0.5 * r
    lo = hi = n
    for _ in range(n):
        seg = p[lo - 1 : hi + 2].copy()
        new = stay * seg
        new[:-1] += move * seg[1:]
        new[1:] += move * seg[:-1]
        p[lo - 1 : hi + 2] = new
        lo, hi = lo - 1, hi + 1
    return Distribution(-n, p, {"n": n, "r": r})


def lazy_rw_closed_form(r: float, n: int) -> Distribution:
    """Thinning formula: sum over the number m of actual moves.

    ``P(L_n = x) = sum_m C(n,m) r^m (1-r)^(n-m) C(m, (m+x)/2) 2^-m``.
    Coefficients go through log-gamma so large n does not overflow.
    """
    r = _check_rate(r)
    n = int(n)
    if n < 0:
        raise ContractError("n must be >= 0")
    if n > CLOSED_FORM_MAX_STEPS:
        raise ResourceError(f"n={n} exceeds closed-form bound {CLOSED_FORM_MAX_STEPS}")
    m = np.arange(n + 1)
    if r == 1:
        log_move = np.where(m == n, 0.0, -np.inf)
    else:
        log_move = (gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
                    + m * math.log(r) + (n - m) * math.log1p(-r))
    keep = log_move > -745
    m, log_move = m[keep], log_move[keep]
    pmf = np.zeros(2 * n + 1)
    for mi, lw in zip(m, log_move):
        k = np.arange(mi + 1)  # number of right moves
        lb = gammaln(mi + 1) - gammaln(k + 1) - gammaln(mi - k + 1) - mi * math.log(2.0)
        pmf[n - mi : n + mi + 1 : 2] += np.exp(lw + lb)
    return Distribution(-n, pmf, {"n": n, "r": r})


def lazy_asymptotic_pmf(x: int, r_total: float) -> float:
    """``e^{-r} I_x(r)`` with ``r = n r(n)`` the expected number of moves."""
    r_total = float(r_total)
    if r_total < 0:
        raise ContractError("r_total must be >= 0")
    return bessel_i_scaled(int(x), r_total)


def lazy_asymptotic_distribution(r_total: float, halfwidth: int) -> Distribution:
    pmf = bessel_i_row(halfwidth, float(r_total)).symmetric(halfwidth)
    return Distribution(-halfwidth, pmf, {"t": r_total})


def _check_direction(pL: float, pR: float) -> tuple[float, float]:
    pL, pR = float(pL), float(pR)
    if pL < 0 or pR < 0 or not math.isclose(pL + pR, 1.0, abs_tol=1e-12):
        raise ContractError("need pL, pR >= 0 with pL + pR = 1")
    return pL, pR


def correlated_rw_distribution(r: float, n: int, pL: float, pR: float) -> Distribution:
    """Exact law of the correlated walk after n steps.

    Two-component recursion ``p_m(x) = Q p_{m-1}(x-1) + P p_{m-1}(x+1)`` with
    ``P = e_L e_L^T C``, ``Q = e_R e_R^T C`` and ``C = [[r, 1-r], [1-r, r]]``.
    The L component at x is fed from site x+1 and the R component from x-1.
    """
    r = _check_rate(r, hi_closed=False)
    pL, pR = _check_direction(pL, pR)
    n = int(n)
    if n < 0:
        raise ContractError("n must be >= 0")
    if n > DP_MAX_STEPS:
        raise ResourceError(f"n={n} exceeds DP bound {DP_MAX_STEPS}")
    size = 2 * n + 1
    L = np.zeros(size)
    R = np.zeros(size)
    L[n], R[n] = pL, pR
    q = 1.0 - r
    lo = hi = n
    for _ in range(n):
        Ls, Rs = L[lo : hi + 1].copy(), R[lo : hi + 1].copy()
        L[lo : hi + 1] = 0
        R[lo : hi + 1] = 0
        L[lo - 1 : hi] = r * Ls + q * Rs
        R[lo + 1 : hi + 2] = q * Ls + r * Rs
        lo, hi = lo - 1, hi + 1
    return Distribution(-n, L + R, {"n": n, "r": r, "pL": pL, "pR": pR})


def correlated_asymptotic_pmf(x: int, n: int, r_total: float, pL: float, pR: float) -> float:
    """Parity-masked ``e^{-t} (pL I_{x-1}(t) + I_x(t) + pR I_{x+1}(t))``, ``t = n r(n)``."""
    pL, pR = _check_direction(pL, pR)
    x, n = int(x), int(n)
    if (n + x) % 2:
        return 0.0
    t = float(r_total)
    return (pL * bessel_i_scaled(x - 1, t) + bessel_i_scaled(x, t)
            + pR * bessel_i_scaled(x + 1, t))


def correlated_asymptotic_distribution(n: int, r_total: float, pL: float, pR: float,
                                       halfwidth: int) -> Distribution:
    """Vectorised :func:`correlated_asymptotic_pmf` on ``-halfwidth .. halfwidth``."""
    pL, pR = _check_direction(pL, pR)
    w = int(halfwidth)
    row = bessel_i_row(w + 1, float(r_total)).symmetric(w + 1)  # orders -(w+1) .. w+1
    x = np.arange(-w, w + 1)
    pmf = pL * row[:-2] + row[1:-1] + pR * row[2:]
    pmf[(x + n) % 2 == 1] = 0.0
    return Distribution(-w, pmf, {"n": n, "t": r_total})
