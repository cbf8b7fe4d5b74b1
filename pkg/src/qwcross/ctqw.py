"""Continuous-time quantum walk and continuous-time random walk on Z.

The quantum walk solves ``-i dPsi/dt = (gamma Psi(x-1) + conj(gamma) Psi(x+1)) / 2``
from ``delta_0``; its amplitudes are ``i^x e^{i x arg gamma} J_x(|gamma| t)``.
The random walk jumps to either neighbour at total rate 1, so that
``P(X_t = x) = e^{-t} I_x(t)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._errors import ContractError, PrecisionError, TruncationError
from .specfun import bessel_i_row, bessel_j_row
from .walk import Distribution

__all__ = [
    "CtqwParams",
    "ctqw_halfwidth",
    "ctqw_amplitudes",
    "ctqw_distribution",
    "ctqw_integrate_oracle",
    "ctrw_halfwidth",
    "ctrw_distribution",
]

_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class CtqwParams:
    gamma: complex
    t: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "t", float(self.t))
        if abs(self.gamma) == 0:
            raise ContractError("gamma must be non-zero")
        if not math.isfinite(self.t) or self.t < 0:
            raise ContractError("t must be finite and >= 0")

    @property
    def z(self) -> float:
        return abs(self.gamma) * self.t


def ctqw_halfwidth(params: CtqwParams) -> int:
    return math.ceil(params.z) + 200


def ctrw_halfwidth(t: float) -> int:
    return math.ceil(t + 40 * math.sqrt(t + 1) + 50)


def _check_tail(pmf: np.ndarray, what: str) -> None:
    tail = 1.0 - float(np.sum(pmf))
    if tail > _TAIL_TOL:
        raise TruncationError(f"{what}: {tail:.3e} of the mass lies outside the window")


def ctqw_amplitudes(params: CtqwParams, halfwidth: int | None = None) -> np.ndarray:
    """Complex amplitudes on ``-halfwidth .. halfwidth``."""
    w = ctqw_halfwidth(params) if halfwidth is None else int(halfwidth)
    x = np.arange(-w, w + 1)
    j = bessel_j_row(w, params.z).symmetric(w)
    phase = np.exp(1j * x * (math.pi / 2 + cmath.phase(params.gamma)))
    return phase * j


def ctqw_distribution(params: CtqwParams, halfwidth: int | None = None) -> Distribution:
    """``P(X_t = x) = J_x(|gamma| t)^2``.

    Raises TruncationError when more than 1e-12 of the mass falls outside
    the requested window.
    """
    w = ctqw_halfwidth(params) if halfwidth is None else int(halfwidth)
    if w < 0:
        raise ContractError("halfwidth must be >= 0")
    j = bessel_j_row(w, params.z).symmetric(w)
    pmf = j * j
    _check_tail(pmf, "CTQW")
    return Distribution(-w, pmf, {"t": params.t, "gamma": str(params.gamma)})


def ctqw_integrate_oracle(params: CtqwParams, dt: float | None = None,
                          halfwidth: int | None = None) -> np.ndarray:
    """Integrate the lattice Schroedinger equation with fixed-step RK4.

    Independent of the Bessel route; the window edges are hard walls placed
    far outside the light cone.  Returns amplitudes on ``-halfwidth .. halfwidth``.
    """
    g = params.gamma
    limit = 1e-3 * min(1.0, 1.0 / abs(g))
    dt = limit if dt is None else float(dt)
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ContractError(f"dt must be in (0, {limit:g}]")
    w = ctqw_halfwidth(params) if halfwidth is None else int(halfwidth)
    psi = np.zeros(2 * w + 1, dtype=complex)
    psi[w] = 1.0
    if params.t == 0:
        return psi

    gc = g.conjugate()

    def rhs(p):
        out = np.zeros_like(p)
        out[1:] += g * p[:-1]    # gamma * Psi(x-1)
        out[:-1] += gc * p[1:]   # conj(gamma) * Psi(x+1)
        return 0.5j * out

    steps = math.ceil(params.t / dt - 1e-9)
    h = params.t / steps
    for _ in range(steps):
        k1 = rhs(psi)
        k2 = rhs(psi + 0.5 * h * k1)
        k3 = rhs(psi + 0.5 * h * k2)
        k4 = rhs(psi + h * k3)
        psi = psi + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    drift = abs(float(np.sum(np.abs(psi) ** 2)) - 1.0)
    if drift > 1e-6:
        raise PrecisionError(f"RK4 norm drift {drift:.2e}")
    return psi


def ctrw_distribution(t: float, halfwidth: int | None = None) -> Distribution:
    """``m_t(x) = e^{-t} I_x(t)``, computed from the scaled Bessel row."""
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ContractError("t must be finite and >= 0")
    w = ctrw_halfwidth(t) if halfwidth is None else int(halfwidth)
    pmf = bessel_i_row(w, t).symmetric(w)
    _check_tail(pmf, "CTRW")
    return Distribution(-w, pmf, {"t": t})
