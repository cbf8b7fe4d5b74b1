"""Weak-convergence diagnostics: moments, Kolmogorov distance, spreading
exponents and the (alpha, beta) phase diagram of the measured FTD walk."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ._errors import ContractError
from .limits import (Arcsine, Delta, DTQWLaw, Gaussian, LatticeI, LatticeJ,
                     LimitLaw)
from .measurement import PhasePoint, ftd_ppm_distribution
from .walk import Distribution, sigma_squared

__all__ = [
    "ConvergenceReport",
    "PhaseCell",
    "moments",
    "ks_distance",
    "convergence_report",
    "scaling_exponent",
    "classify_region",
    "predicted_law",
    "phase_scaling",
    "candidate_laws",
    "evaluate_cell",
    "phase_diagram",
]

_EQ = 1e-12


@dataclass
class ConvergenceReport:
    n: int
    scaling: float
    center: float
    ks_distance: float
    mean: float
    variance: float
    classified_law: str


@dataclass
class PhaseCell:
    alpha: float
    beta: float
    r: float
    region: str
    exponent_estimate: float
    exponent_predicted: float
    predicted_law: str
    ks_to_predicted_law: float
    best_law: str
    best_ks: float
    variance_constant: float

    def as_dict(self) -> dict:
        return asdict(self)


def moments(dist: Distribution) -> tuple[float, float]:
    """Exact mean and variance of a PMF."""
    return dist.mean(), dist.variance()


def _emp_cdf_at(dist: Distribution, scaling: float, center: float, points: np.ndarray):
    xs = (dist.support - center) / scaling
    cum = np.cumsum(dist.pmf) / dist.total
    idx = np.searchsorted(xs, points, side="right") - 1
    return np.where(idx >= 0, cum[np.clip(idx, 0, None)], 0.0)


def ks_distance(dist: Distribution, scaling: float, center: float, law: LimitLaw) -> float:
    """Sup distance between the CDF of ``(X - center) / scaling`` and the law's CDF.

    For continuous laws the empirical CDF is compared at both edges of every
    jump.  Lattice laws are compared as step functions on the union of both
    supports (right-continuous values suffice there).
    """
    if scaling <= 0:
        raise ContractError("scaling must be > 0")
    if law.lattice:
        lx, lp = law.table()
        pts = np.union1d((dist.support - center) / scaling, lx)
        emp = _emp_cdf_at(dist, scaling, center, pts)
        idx = np.searchsorted(lx, pts, side="right") - 1
        ref = np.where(idx >= 0, np.cumsum(lp)[np.clip(idx, 0, None)], 0.0)
        return float(min(1.0, np.max(np.abs(emp - ref))))
    mask = dist.pmf > 0
    xs = (dist.support[mask] - center) / scaling
    right = np.cumsum(dist.pmf)[mask] / dist.total
    left = right - dist.pmf[mask] / dist.total
    ref = np.asarray(law.cdf(xs), dtype=float)
    d = max(np.max(np.abs(right - ref)), np.max(np.abs(left - ref)))
    return float(min(1.0, d))


def convergence_report(dist: Distribution, scaling: float, law: LimitLaw,
                       center: float = 0.0, n: int | None = None) -> ConvergenceReport:
    mean, var = moments(dist)
    if n is None:
        n = int(dist.meta.get("n", dist.meta.get("time", 0)) or 0)
    return ConvergenceReport(n, float(scaling), float(center),
                             ks_distance(dist, scaling, center, law), mean, var, law.tag)


def scaling_exponent(dists_by_n: Sequence[tuple[int, Distribution]], min_span: float = 4.0) -> float:
    """Least-squares slope of log(std) against log(n).

    Needs at least three sizes whose largest/smallest ratio is >= ``min_span``.
    """
    pairs = sorted((int(n), d) for n, d in dists_by_n)
    if len(pairs) < 3:
        raise ContractError("need at least 3 sizes")
    if pairs[-1][0] < min_span * pairs[0][0]:
        raise ContractError(f"sizes must span a factor of at least {min_span}")
    ns = np.array([n for n, _ in pairs], dtype=float)
    var = np.array([d.variance() for _, d in pairs])
    if np.any(~np.isfinite(var)) or np.any(var <= 1e-300):
        raise ContractError("degenerate (zero) variance; exponent undefined")
    slope = np.polyfit(np.log(ns), 0.5 * np.log(var), 1)[0]
    return float(slope)


def classify_region(alpha: float, beta: float) -> str:
    """Region of the unit square: ``S``, ``S'`` (2 alpha = 1 + beta),
    ``boundary`` (alpha = 0 or beta = 1 outside S') or ``delta`` (2 alpha > 1 + beta)."""
    if not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise ContractError("alpha, beta must lie in [0, 1]")
    gap = 1 + beta - 2 * alpha
    if abs(gap) <= _EQ:
        return "S'"
    if gap < 0:
        return "delta"
    if abs(alpha) <= _EQ and abs(beta) <= _EQ:
        return "S"
    if abs(alpha) <= _EQ or abs(beta - 1) <= _EQ:
        return "boundary"
    return "S"


def predicted_law(alpha: float, beta: float, r: float) -> tuple[LimitLaw, bool]:
    """Limit law for a cell and whether it applies to the scaled variable."""
    region = classify_region(alpha, beta)
    on_beta1 = abs(beta - 1) <= _EQ
    if region == "boundary":
        if abs(alpha) <= _EQ and on_beta1:
            return DTQWLaw(r), True
        if on_beta1:
            return Arcsine(r), True
        return Gaussian(sigma_squared(r)), True
    if region == "S":
        return Gaussian(r * r), True
    if region == "S'":
        return (LatticeJ(r) if on_beta1 else LatticeI(r)), False
    return Delta(), False


def phase_scaling(alpha: float, beta: float, n: int) -> float:
    """``sqrt(2^(1-beta) n^(beta - 2 alpha + 1))``."""
    return math.sqrt(2 ** (1 - beta) * float(n) ** (beta - 2 * alpha + 1))


def candidate_laws(r: float) -> list[tuple[LimitLaw, bool]]:
    return [
        (DTQWLaw(r), True),
        (Arcsine(r), True),
        (Gaussian(sigma_squared(r)), True),
        (Gaussian(r * r), True),
        (Gaussian(r), True),
        (LatticeI(r), False),
        (LatticeJ(r), False),
        (Delta(), False),
    ]


def _law_label(law: LimitLaw) -> str:
    if isinstance(law, Gaussian):
        return f"gaussian({law.variance:.6g})"
    return law.tag


def evaluate_cell(alpha: float, beta: float, r: float, n_grid: Sequence[int]) -> PhaseCell:
    """Build the measured FTD walk on every n, fit the exponent and compare laws at the largest n."""
    n_grid = sorted(int(n) for n in n_grid)
    point = PhasePoint(alpha, beta, r)
    dists = [(n, ftd_ppm_distribution(point, n)) for n in n_grid]
    n_max, d_max = dists[-1]
    try:
        estimate = scaling_exponent(dists)
    except ContractError:
        estimate = float("-inf")
    scale = phase_scaling(alpha, beta, n_max)

    def ks(law, scaled):
        return ks_distance(d_max, scale if scaled else 1.0, 0.0, law)

    law, scaled = predicted_law(alpha, beta, r)
    ks_pred = ks(law, scaled)
    scores = [(ks(c, s), _law_label(c)) for c, s in candidate_laws(r)]
    best_ks, best = min(scores)
    return PhaseCell(alpha, beta, r, classify_region(alpha, beta), estimate,
                     (beta - 2 * alpha + 1) / 2, _law_label(law), ks_pred, best, best_ks,
                     d_max.variance() / scale ** 2)


def _cell_job(args):
    return evaluate_cell(*args)


def phase_diagram(r: float, alphas: Sequence[float], betas: Sequence[float],
                  n_grid: Sequence[int], n_jobs: int = 1,
                  min_span: float = 4.0) -> list[PhaseCell]:
    """Evaluate every (alpha, beta) cell; output is row-major in (alpha, beta)."""
    n_grid = [int(n) for n in n_grid]
    if any(n % 2 for n in n_grid) or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ContractError("n_grid must be even and increasing")
    if len(n_grid) < 3 or n_grid[-1] < min_span * n_grid[0]:
        raise ContractError(f"n_grid needs >= 3 sizes spanning a factor >= {min_span}")
    if not 0 < r < 1:
        raise ContractError("r must lie in (0, 1)")
    jobs = [(float(a), float(b), float(r), n_grid) for a in alphas for b in betas]
    if n_jobs == 1:
        return [_cell_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_cell_job, jobs))
