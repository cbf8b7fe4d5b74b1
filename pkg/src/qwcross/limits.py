"""Limit laws of the scaled walks: densities, lattice point masses and CDFs.

The two inverted-bell densities have integrable ``1/sqrt(s^2 - x^2)`` edges.
Their CDFs are computed after the substitution ``x = s sin(theta)``, which
turns the integrand into a smooth function of theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ._errors import ContractError
from ._quadrature import adaptive_simpson
from .specfun import bessel_i_row, bessel_j_row

__all__ = [
    "LimitLaw",
    "DTQWLaw",
    "Arcsine",
    "Gaussian",
    "AsymArcsine",
    "LatticeJ",
    "LatticeI",
    "Delta",
    "dtqw_density",
    "arcsine_density",
    "asym_arcsine_density",
    "ftd_bessel_pmf",
    "ftd_bessel_distribution",
    "hybrid_lattice_pmf",
    "law_cdf",
]

_CDF_TOL = 1e-10


def dtqw_density(x, a_abs: float):
    """Ballistic DTQW limit ``sqrt(1-a^2) / (pi (1-x^2) sqrt(a^2-x^2))`` on (-a, a).

    Evaluates to ``inf`` exactly at the support edges.
    """
    if not 0 < a_abs < 1:
        raise ContractError("a_abs must lie in (0, 1)")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < a_abs
    with np.errstate(divide="ignore", invalid="ignore"):
        val = math.sqrt(1 - a_abs ** 2) / (math.pi * (1 - x * x) * np.sqrt(a_abs ** 2 - x * x))
    out = np.where(inside, val, 0.0)
    out = np.where(np.abs(x) == a_abs, np.inf, out)
    return out[()] if out.ndim == 0 else out


def arcsine_density(x, gamma_abs: float):
    """``1 / (pi sqrt(g^2 - x^2))`` on (-g, g)."""
    if gamma_abs <= 0:
        raise ContractError("gamma_abs must be > 0")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 1.0 / (math.pi * np.sqrt(gamma_abs ** 2 - x * x))
    out = np.where(np.abs(x) < gamma_abs, val, 0.0)
    out = np.where(np.abs(x) == gamma_abs, np.inf, out)
    return out[()] if out.ndim == 0 else out


def _cross(qL: complex, qR: complex) -> float:
    """``qL conj(qR) + conj(qL) qR`` (real)."""
    return 2.0 * (complex(qL) * complex(qR).conjugate()).real


def _check_state(qL: complex, qR: complex) -> None:
    if not math.isclose(abs(qL) ** 2 + abs(qR) ** 2, 1.0, abs_tol=1e-12):
        raise ContractError("coin state must be normalised")


def asym_arcsine_density(x, r: float, qL: complex, qR: complex):
    """Arcsine law tilted by the initial coin state: ``(1 - kappa x / r) / (pi sqrt(r^2-x^2))``."""
    _check_state(qL, qR)
    r = abs(float(r))
    if r == 0:
        raise ContractError("r must be non-zero")
    kappa = _cross(qL, qR)
    x = np.asarray(x, dtype=float)
    out = (1 - kappa * x / r) * arcsine_density(x, r)
    return out[()] if np.ndim(out) == 0 else out


def ftd_bessel_pmf(x, t: float, qL: complex, qR: complex):
    """Bessel-square mass of the FTD walk at effective time ``t``, before the parity factor.

    ``(1 - kappa 2x/t) J_x^2 + |qL|^2 J_{x-1}^2 + |qR|^2 J_{x+1}^2``.
    """
    _check_state(qL, qR)
    if t <= 0:
        raise ContractError("t must be > 0")
    xs = np.atleast_1d(np.asarray(x, dtype=int))
    w = int(np.max(np.abs(xs))) + 1
    row = bessel_j_row(w, t).symmetric(w)  # orders -w .. w
    j2 = row * row
    idx = xs + w
    kappa = _cross(qL, qR)
    out = ((1 - kappa * 2 * xs / t) * j2[idx] + abs(qL) ** 2 * j2[idx - 1]
           + abs(qR) ** 2 * j2[idx + 1])
    return float(out[0]) if np.ndim(x) == 0 else out


def ftd_bessel_distribution(n: int, t: float, qL: complex, qR: complex,
                            halfwidth: int | None = None):
    """Parity-masked :func:`ftd_bessel_pmf` on ``-halfwidth .. halfwidth``.

    Returned unnormalised: the total mass at finite t is reported, not forced to 1.
    """
    from .walk import Distribution

    w = math.ceil(t) + 200 if halfwidth is None else int(halfwidth)
    x = np.arange(-w, w + 1)
    pmf = ftd_bessel_pmf(x, t, qL, qR)
    pmf = np.where((n + x) % 2 == 0, pmf, 0.0)
    return Distribution(-w, np.clip(pmf, 0.0, None), {"t": t, "n": n})


def hybrid_lattice_pmf(x, param: float, kind: str):
    """Point masses on even sites for the measured FTD walk.

    ``kind="J"``: ``J_x(r)^2 + (J_{x-1}(r)^2 + J_{x+1}(r)^2) / 2``;
    ``kind="I"``: ``e^{-r^2/2} I_{x/2}(r^2/2)``.  Odd x carry no mass.
    """
    if param < 0:
        raise ContractError("param must be >= 0")
    xs = np.atleast_1d(np.asarray(x, dtype=int))
    even = xs % 2 == 0
    out = np.zeros(xs.shape)
    if kind == "J":
        w = int(np.max(np.abs(xs))) + 1
        j2 = bessel_j_row(w, param).symmetric(w) ** 2
        idx = xs + w
        out = j2[idx] + 0.5 * (j2[idx - 1] + j2[idx + 1])
    elif kind == "I":
        half = np.abs(xs) // 2
        row = bessel_i_row(int(half.max()), param ** 2 / 2).values
        out = row[half]
    else:
        raise ContractError(f"kind must be 'J' or 'I', got {kind!r}")
    out = np.where(even, out, 0.0)
    return float(out[0]) if np.ndim(x) == 0 else out


def _substituted_cdf(g, s: float, x) -> np.ndarray:
    """CDF of a density on (-s, s) given ``g(theta)``, its form under x = s sin(theta).

    Points are integrated in sorted order, each increment by its own adaptive
    Simpson panel, so a whole grid costs about as much as one full integral.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    out[x <= -s] = 0.0
    out[x >= s] = 1.0
    inner = (x > -s) & (x < s)
    if np.any(inner):
        xs = x[inner]
        order = np.argsort(xs)
        thetas = np.arcsin(xs[order] / s)
        edges = np.concatenate([[-math.pi / 2], thetas])
        tol = _CDF_TOL / max(1, len(thetas))
        inc = [adaptive_simpson(g, lo, hi, max(tol, 1e-15))
               for lo, hi in zip(edges[:-1], edges[1:])]
        cum = np.clip(np.cumsum(inc), 0.0, 1.0)
        vals = np.empty_like(cum)
        vals[order] = cum
        out[inner] = vals
    return out


class LimitLaw:
    """Common interface of every limit law."""

    tag = "law"
    lattice = False

    def cdf(self, x):
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError


def _maybe_scalar(x, out):
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class DTQWLaw(LimitLaw):
    a: float
    tag = "dtqw"

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ContractError("a must lie in (0, 1)")

    def density(self, x):
        return dtqw_density(x, self.a)

    def cdf(self, x):
        a = self.a
        c = math.sqrt(1 - a * a) / math.pi
        return _maybe_scalar(x, _substituted_cdf(
            lambda th: c / (1 - (a * math.sin(th)) ** 2), a, x))

    def support(self):
        return (-self.a, self.a)


@dataclass(frozen=True)
class Arcsine(LimitLaw):
    gamma_abs: float
    tag = "arcsine"

    def __post_init__(self):
        if self.gamma_abs <= 0:
            raise ContractError("gamma_abs must be > 0")

    def density(self, x):
        return arcsine_density(x, self.gamma_abs)

    def cdf(self, x):
        g = self.gamma_abs
        u = np.clip(np.asarray(x, dtype=float) / g, -1.0, 1.0)
        out = 0.5 + np.arcsin(u) / math.pi
        return float(out) if np.ndim(out) == 0 else out

    def support(self):
        return (-self.gamma_abs, self.gamma_abs)


@dataclass(frozen=True)
class Gaussian(LimitLaw):
    variance: float
    tag = "gaussian"

    def __post_init__(self):
        if self.variance < 0:
            raise ContractError("variance must be >= 0")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        v = self.variance
        return np.exp(-x * x / (2 * v)) / math.sqrt(2 * math.pi * v)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.variance == 0:
            out = (x >= 0).astype(float)
        else:
            out = ndtr(x / math.sqrt(self.variance))
        return float(out) if np.ndim(out) == 0 else out

    def support(self):
        return (-math.inf, math.inf)


@dataclass(frozen=True)
class AsymArcsine(LimitLaw):
    r: float
    qL: complex
    qR: complex
    tag = "asym_arcsine"

    def __post_init__(self):
        if self.r <= 0:
            raise ContractError("r must be > 0")
        _check_state(self.qL, self.qR)

    def density(self, x):
        return asym_arcsine_density(x, self.r, self.qL, self.qR)

    def cdf(self, x):
        kappa = _cross(self.qL, self.qR)
        return _maybe_scalar(x, _substituted_cdf(
            lambda th: (1 - kappa * math.sin(th)) / math.pi, self.r, x))

    def mean(self) -> float:
        return -_cross(self.qL, self.qR) * self.r / 2

    def support(self):
        return (-self.r, self.r)


class _LatticeLaw(LimitLaw):
    lattice = True

    def _halfwidth(self) -> int:
        raise NotImplementedError

    def pmf(self, x):
        raise NotImplementedError

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        w = self._halfwidth()
        xs = np.arange(-w, w + 1)
        return xs, np.asarray(self.pmf(xs), dtype=float)

    def cdf(self, x):
        xs, p = self.table()
        cum = np.cumsum(p)
        idx = np.searchsorted(xs, np.floor(np.asarray(x, dtype=float)), side="right") - 1
        out = np.where(idx >= 0, cum[np.clip(idx, 0, None)], 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def support(self):
        w = self._halfwidth()
        return (-w, w)


@dataclass(frozen=True)
class LatticeJ(_LatticeLaw):
    r: float
    tag = "lattice_j"

    def _halfwidth(self):
        return math.ceil(self.r) + 60

    def pmf(self, x):
        return hybrid_lattice_pmf(x, self.r, "J")


@dataclass(frozen=True)
class LatticeI(_LatticeLaw):
    r: float
    tag = "lattice_i"

    def _halfwidth(self):
        c = self.r ** 2 / 2
        return 2 * math.ceil(c + 40 * math.sqrt(c + 1) + 50)

    def pmf(self, x):
        return hybrid_lattice_pmf(x, self.r, "I")


class Delta(_LatticeLaw):
    tag = "delta"

    def _halfwidth(self):
        return 0

    def pmf(self, x):
        x = np.asarray(x)
        return (x == 0).astype(float)

    def __eq__(self, other):
        return isinstance(other, Delta)

    def __hash__(self):
        return hash("delta")

    def __repr__(self):
        return "Delta()"


def law_cdf(law: LimitLaw, x):
    """CDF of any limit law at scalar or array ``x``."""
    return law.cdf(x)
