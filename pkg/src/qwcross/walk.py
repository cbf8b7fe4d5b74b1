"""Discrete-time quantum walk on the integer lattice.

Conventions: the coin basis is ``e_L = [1, 0]``, ``e_R = [0, 1]`` and the
shift sends the R component one site right and the L component one site
left.  One step therefore reads::

    psi_L'(x) = a * psi_L(x+1) + b * psi_R(x+1)
    psi_R'(x) = c * psi_L(x-1) + d * psi_R(x-1)

for the coin ``H = [[a, b], [c, d]]``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._errors import ContractError, PrecisionError, ResourceError
from ._quadrature import adaptive_simpson

__all__ = [
    "CoinOperator",
    "CoinState",
    "WalkState",
    "Distribution",
    "hadamard",
    "ftd_coin",
    "preset_coin",
    "PRESET_COINS",
    "symmetric_state",
    "dtqw_step",
    "dtqw_evolve",
    "dtqw_distribution",
    "distribution_of",
    "check_symmetric",
    "spectral_sigma_squared",
    "sigma_squared",
    "MAX_STEPS",
]

MAX_STEPS = 100_000
_UNITARY_TOL = 1e-12
_ENTRY_MIN = 1e-15


@dataclass(frozen=True)
class CoinOperator:
    """2x2 unitary coin ``[[a, b], [c, d]]`` with all four entries non-zero."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        m = self.matrix
        if not np.all(np.isfinite(m)):
            raise ContractError("coin entries must be finite")
        if np.min(np.abs(m)) <= _ENTRY_MIN:
            raise ContractError("coin needs abcd != 0 (every entry non-zero)")
        dev = np.max(np.abs(m @ m.conj().T - np.eye(2)))
        if dev > _UNITARY_TOL:
            raise ContractError(f"coin is not unitary (deviation {dev:.2e})")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_matrix(cls, m) -> "CoinOperator":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ContractError("coin matrix must be 2x2")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


@dataclass(frozen=True)
class CoinState:
    """Normalised chirality vector ``q_L e_L + q_R e_R``."""

    qL: complex
    qR: complex

    def __post_init__(self):
        object.__setattr__(self, "qL", complex(self.qL))
        object.__setattr__(self, "qR", complex(self.qR))
        norm = abs(self.qL) ** 2 + abs(self.qR) ** 2
        if not math.isclose(norm, 1.0, rel_tol=0, abs_tol=1e-12):
            raise ContractError(f"coin state must have unit norm, got {norm!r}")

    @classmethod
    def left(cls) -> "CoinState":
        return cls(1, 0)

    @classmethod
    def right(cls) -> "CoinState":
        return cls(0, 1)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.qL, self.qR], dtype=complex)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Distribution:
    """Probability mass function on the window ``offset .. offset+len(pmf)-1``."""

    offset: int
    pmf: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise ContractError("pmf must be a non-empty 1-D array")
        if np.any(pmf < -1e-14) or not np.all(np.isfinite(pmf)):
            raise ContractError("pmf has negative or non-finite entries")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "pmf", _frozen(np.clip(pmf, 0.0, None)))

    @classmethod
    def delta(cls, x: int = 0, **meta) -> "Distribution":
        return cls(x, np.ones(1), meta)

    @classmethod
    def from_dict(cls, mass: dict, **meta) -> "Distribution":
        lo, hi = min(mass), max(mass)
        pmf = np.zeros(hi - lo + 1)
        for x, p in mass.items():
            pmf[x - lo] = p
        return cls(lo, pmf, meta)

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.pmf))

    @property
    def total(self) -> float:
        return float(np.sum(self.pmf))

    def __len__(self) -> int:
        return len(self.pmf)

    def at(self, x: int) -> float:
        i = int(x) - self.offset
        return float(self.pmf[i]) if 0 <= i < len(self.pmf) else 0.0

    def on(self, lo: int, hi: int) -> np.ndarray:
        """PMF values on the integer range ``lo .. hi`` (zero outside the window)."""
        out = np.zeros(hi - lo + 1)
        a, b = max(lo, self.offset), min(hi, self.offset + len(self.pmf) - 1)
        if a <= b:
            out[a - lo : b - lo + 1] = self.pmf[a - self.offset : b - self.offset + 1]
        return out

    def mean(self) -> float:
        return float(np.dot(self.support, self.pmf) / self.total)

    def variance(self) -> float:
        x = self.support - self.mean()
        return float(np.dot(x * x, self.pmf) / self.total)

    def stride(self) -> int:
        """2 when every other site carries exactly zero mass (parity lattice), else 1."""
        if len(self.pmf) > 1 and not np.any(self.pmf[1::2]):
            return 2
        return 1

    def trimmed(self) -> "Distribution":
        """Drop exact zeros at both ends of the window."""
        nz = np.flatnonzero(self.pmf)
        if nz.size == 0:
            raise ContractError("distribution carries no mass")
        return Distribution(self.offset + nz[0], self.pmf[nz[0] : nz[-1] + 1], self.meta)

    def scaled_support(self, factor: int) -> "Distribution":
        """Law of ``factor * X`` for an integer factor >= 1."""
        factor = int(factor)
        if factor < 1:
            raise ContractError("factor must be a positive integer")
        pmf = np.zeros((len(self.pmf) - 1) * factor + 1)
        pmf[::factor] = self.pmf
        return Distribution(self.offset * factor, pmf, self.meta)

    def with_meta(self, **meta) -> "Distribution":
        return Distribution(self.offset, self.pmf, {**self.meta, **meta})


@dataclass(frozen=True)
class WalkState:
    """Two-component amplitudes on ``offset .. offset+len(amps)-1`` after ``time`` steps.

    ``amps[:, 0]`` is the L component and ``amps[:, 1]`` the R component.
    """

    offset: int
    amps: np.ndarray
    time: int = 0

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] == 0:
            raise ContractError("amps must have shape (sites, 2)")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def point(cls, state: CoinState, x: int = 0) -> "WalkState":
        return cls(x, state.vector[None, :], 0)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def hadamard() -> CoinOperator:
    s = 1 / math.sqrt(2)
    return CoinOperator(s, s, s, -s)


def ftd_coin(r_n: float) -> CoinOperator:
    """Final-time-dependent coin ``[[sqrt r, sqrt(1-r)], [sqrt(1-r), -sqrt r]]``."""
    r_n = float(r_n)
    if not 0.0 < r_n < 1.0:
        raise ContractError(f"FTD coin needs 0 < r_n < 1, got {r_n!r}")
    p, q = math.sqrt(r_n), math.sqrt(1.0 - r_n)
    return CoinOperator(p, q, q, -p)


def _rotation(theta: float) -> CoinOperator:
    c, s = math.cos(theta), math.sin(theta)
    return CoinOperator(c, s, -s, c)


def _balanced() -> CoinOperator:
    s = 1 / math.sqrt(2)
    return CoinOperator(s, 1j * s, 1j * s, s)


def _phased(phi: float) -> CoinOperator:
    # Hadamard with a relative phase on the off-diagonal: same |a|, different phases
    s = 1 / math.sqrt(2)
    w = cmath.exp(1j * phi)
    return CoinOperator(s, s * w, s * w.conjugate(), -s)


PRESET_COINS: dict[str, Callable[..., CoinOperator]] = {
    "hadamard": hadamard,
    "balanced": _balanced,
    "rotation": lambda theta=math.pi / 5: _rotation(float(theta)),
    "phased": lambda phi=math.pi / 3: _phased(float(phi)),
    "ftd": lambda r=0.01: ftd_coin(float(r)),
}


def preset_coin(text: str) -> CoinOperator:
    """Parse ``name`` or ``name:key=value`` (e.g. ``ftd:r=0.01``)."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name not in PRESET_COINS:
        raise ContractError(f"unknown coin preset {name!r}")
    kwargs = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ContractError(f"bad coin parameter {item!r}")
            kwargs[key.strip()] = float(value)
    try:
        return PRESET_COINS[name](**kwargs)
    except TypeError as exc:
        raise ContractError(f"bad parameters for coin {name!r}: {exc}") from None


def symmetric_state(coin: CoinOperator) -> CoinState:
    """A coin state with ``|q_L| = |q_R|`` whose cross term with ``coin`` vanishes."""
    w = coin.a.conjugate() * coin.b
    phase = cmath.exp(1j * (math.pi / 2 - cmath.phase(w)))
    s = 1 / math.sqrt(2)
    return CoinState(s, s * phase)


def check_symmetric(coin: CoinOperator, state: CoinState, tol: float = 1e-12) -> bool:
    """True iff ``|q_L| = |q_R| = 1/sqrt2`` and the a-b cross term is zero."""
    s = 1 / math.sqrt(2)
    if abs(abs(state.qL) - s) > tol or abs(abs(state.qR) - s) > tol:
        return False
    u, v = coin.a * state.qL, coin.b * state.qR
    cross = u * v.conjugate() + u.conjugate() * v
    return abs(cross) <= tol


def dtqw_step(state: WalkState, coin: CoinOperator) -> WalkState:
    """One coin-then-shift step; the window grows by one site on each side."""
    psi = state.amps
    n = psi.shape[0]
    out = np.zeros((n + 2, 2), dtype=complex)
    # new L at x comes from x+1, new R at x from x-1 (window shifted by one)
    out[:n, 0] = coin.a * psi[:, 0] + coin.b * psi[:, 1]
    out[2:, 1] = coin.c * psi[:, 0] + coin.d * psi[:, 1]
    return WalkState(state.offset - 1, out, state.time + 1)


def _evolve_arrays(coin: CoinOperator, phi: np.ndarray, n: int):
    """Amplitude arrays on [-n, n] after n steps from a point start at 0."""
    size = 2 * n + 1
    L = np.zeros(size, dtype=complex)
    R = np.zeros(size, dtype=complex)
    L[n], R[n] = phi
    a, b, c, d = coin.a, coin.b, coin.c, coin.d
    lo, hi = n, n  # occupied index range
    for _ in range(n):
        Ls, Rs = L[lo : hi + 1], R[lo : hi + 1]
        newL = a * Ls + b * Rs
        newR = c * Ls + d * Rs
        L[lo : hi + 1] = 0
        R[lo : hi + 1] = 0
        L[lo - 1 : hi] = newL
        R[lo + 1 : hi + 2] = newR
        lo, hi = lo - 1, hi + 1
    return L, R


def dtqw_evolve(coin: CoinOperator, initial: CoinState, n: int) -> WalkState:
    """State after ``n`` steps from ``delta_0 (x) initial``, on the window [-n, n]."""
    n = int(n)
    if n < 0:
        raise ContractError("n must be >= 0")
    if n > MAX_STEPS:
        raise ResourceError(f"n={n} exceeds the step bound {MAX_STEPS}")
    L, R = _evolve_arrays(coin, initial.vector, n)
    state = WalkState(-n, np.stack([L, R], axis=1), n)
    if abs(state.norm - 1.0) > 1e-10:
        raise PrecisionError(f"norm drifted to {state.norm!r}")
    return state


def distribution_of(state: WalkState) -> Distribution:
    """Site-wise squared norm of the amplitudes."""
    pmf = np.sum(state.amps.real ** 2 + state.amps.imag ** 2, axis=1)
    return Distribution(state.offset, pmf, {"time": state.time})


def dtqw_distribution(coin: CoinOperator, initial: CoinState, n: int) -> Distribution:
    return distribution_of(dtqw_evolve(coin, initial, n))


def sigma_squared(a_abs: float) -> float:
    """Closed form ``1 - sqrt(1 - |a|^2)``."""
    return 1.0 - math.sqrt(1.0 - a_abs * a_abs)


def _group_velocity(coin: CoinOperator, branch: int) -> Callable[[float], float]:
    """Derivative of the eigenphase of ``diag(e^{-ik}, e^{ik}) H`` in k.

    With ``det H = e^{i delta}`` the eigenvalues are ``e^{i(delta/2 +- theta(k))}``
    where ``cos theta = Re(e^{-i delta/2} (a e^{-ik} + d e^{ik})) / 2``.
    """
    a, d = coin.a, coin.d
    det = coin.a * coin.d - coin.b * coin.c
    half = cmath.exp(-0.5j * cmath.phase(det))

    def cos_theta(k: float) -> float:
        return (half * (a * cmath.exp(-1j * k) + d * cmath.exp(1j * k))).real / 2

    def dcos_theta(k: float) -> float:
        return (half * (-1j * a * cmath.exp(-1j * k) + 1j * d * cmath.exp(1j * k))).real / 2

    def phase(k: float) -> float:
        return branch * math.acos(max(-1.0, min(1.0, cos_theta(k))))

    def h(k: float) -> float:
        c = cos_theta(k)
        s2 = 1.0 - c * c
        if s2 < 1e-16:  # |sin theta| < 1e-8: analytic form is 0/0
            eps = 1e-6
            return (phase(k + eps) - phase(k - eps)) / (2 * eps)
        return -branch * dcos_theta(k) / math.sqrt(s2)

    return h


def spectral_sigma_squared(coin: CoinOperator, branch: int = 1, tol: float = 1e-10) -> float:
    """Mean of the squared group velocity over the Brillouin zone.

    Integrates ``h(k)^2 dk / 2pi`` over ``[0, 2pi)`` by adaptive Simpson; the
    result should equal ``1 - sqrt(1 - |a|^2)``.
    """
    if branch not in (1, -1):
        raise ContractError("branch must be +1 or -1")
    h = _group_velocity(coin, branch)
    # four panels keep the initial Simpson estimate from aliasing on cos^2 k
    total = 0.0
    edges = np.linspace(0.0, 2 * math.pi, 5)
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += adaptive_simpson(lambda k: h(k) ** 2, lo, hi, tol / 4, max_depth=30)
    return total / (2 * math.pi)
