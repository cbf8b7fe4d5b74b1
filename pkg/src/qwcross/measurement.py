"""Walks interrupted by position measurements.

A measurement at the end of each span collapses the position and the walk
restarts there with a prescribed coin state, so the final position is a sum
of independent segment displacements.  Everything here reduces to exact
convolutions of segment PMFs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from ._errors import ContractError, PrecisionError, ResourceError
from .ctqw import CtqwParams, ctqw_distribution
from .walk import (CoinOperator, CoinState, Distribution, dtqw_distribution,
                   ftd_coin)

__all__ = [
    "Schedule",
    "PhasePoint",
    "AssumptionReport",
    "theta",
    "power_schedule",
    "continuous_power_schedule",
    "geometric_schedule",
    "validate_assumption",
    "convolve",
    "convolve_power",
    "compose_pm",
    "random_coin_states",
    "dtqw_pm_distribution",
    "ctqw_pm_distribution",
    "ftd_rate",
    "ftd_segment_distribution",
    "ftd_ppm_distribution",
    "MAX_SUPPORT",
    "NAIVE_LIMIT",
]

MAX_SUPPORT = 2 ** 26
NAIVE_LIMIT = 4096
_CLIP = 1e-14
_DRIFT = 1e-10


@dataclass(frozen=True)
class Schedule:
    """Measurement spans ``d_1 .. d_M`` inside a horizon ``final_time``.

    ``discarded`` is the idle remainder ``final_time - sum(d)``.
    """

    durations: tuple
    final_time: float

    def __post_init__(self):
        durations = tuple(self.durations)
        if any(d <= 0 for d in durations):
            raise ContractError("every span must be positive")
        if sum(durations) > self.final_time * (1 + 1e-12):
            raise ContractError("spans exceed the final time")
        object.__setattr__(self, "durations", durations)

    @property
    def M(self) -> int:
        return len(self.durations)

    @property
    def discarded(self) -> float:
        return self.final_time - sum(self.durations)


@dataclass(frozen=True)
class PhasePoint:
    alpha: float
    beta: float
    r: float

    def __post_init__(self):
        if not 0 <= self.alpha <= 1 or not 0 <= self.beta <= 1:
            raise ContractError("alpha and beta must lie in [0, 1]")
        if not 0 < self.r < 1:
            raise ContractError("r must lie in (0, 1)")


def theta(schedule: Schedule) -> float:
    """Root of the sum of squared spans."""
    return math.sqrt(sum(float(d) ** 2 for d in schedule.durations))


def _nearest_even(v: float) -> int:
    lo = 2 * math.floor(v / 2)
    even = lo if v - lo <= lo + 2 - v else lo + 2
    return max(2, even)


def power_schedule(n: int, beta: float, even_spans: bool = False) -> Schedule:
    """Equal spans ``d = round(n^beta)``, or ``2^(1-beta) n^beta`` rounded to an even
    integer >= 2 when ``even_spans``; ``M = n // d`` and the remainder idles."""
    n = int(n)
    if n < 4:
        raise ContractError("power_schedule needs n >= 4")
    if not 0 <= beta <= 1:
        raise ContractError("beta must lie in [0, 1]")
    if even_spans:
        d = _nearest_even(2 ** (1 - beta) * n ** beta)
    else:
        d = max(1, round(n ** beta))
    d = min(d, n)
    return Schedule((d,) * (n // d), n)


def continuous_power_schedule(t: float, beta: float) -> Schedule:
    """Real spans ``d = t^beta`` for the continuous-time walk."""
    if t <= 0 or not 0 <= beta <= 1:
        raise ContractError("need t > 0 and beta in [0, 1]")
    d = min(t ** beta, t)
    return Schedule((d,) * int(t // d + 1e-9), t)


def geometric_schedule(n: int, p: float, seed: int) -> Schedule:
    """I.i.d. geometric spans ``P(D = d) = (1-p)^(d-1) p`` kept while their sum <= n."""
    if not 0 < p < 1:
        raise ContractError("p must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    spans: list[int] = []
    total = 0
    chunk = max(16, int(2 * n * p) + 16)
    while True:
        for d in rng.geometric(p, size=chunk):
            if total + d > n:
                return Schedule(tuple(spans), n)
            spans.append(int(d))
            total += int(d)


@dataclass
class AssumptionReport:
    """Finite-sample trends of the three span conditions over an n grid.

    ``bounded`` is a hard check; ``growing`` and ``vanishing_share`` are trends.
    """

    n_grid: list
    max_span: list
    min_span: list
    max_share: list
    bounded: bool
    growing: bool
    vanishing_share: bool

    @property
    def failures(self) -> list:
        names = ("bounded", "growing", "vanishing_share")
        return [i + 1 for i, k in enumerate(names) if not getattr(self, k)]

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_assumption(schedule_family: Callable[[int], Schedule],
                        n_grid: Sequence[int]) -> AssumptionReport:
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 3 or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ContractError("n_grid must be increasing with at least 3 points")
    max_span, min_span, share = [], [], []
    bounded = True
    for n in n_grid:
        d = np.asarray(schedule_family(n).durations, dtype=float)
        if d.size == 0:
            raise ContractError(f"empty schedule at n={n}")
        bounded &= bool(d.max() <= n)
        max_span.append(float(d.max()))
        min_span.append(float(d.min()))
        share.append(float(d.max() ** 2 / np.sum(d * d)))
    growing = (all(b >= a for a, b in zip(min_span, min_span[1:]))
               and min_span[-1] > min_span[0])
    vanishing = (all(b <= a for a, b in zip(share, share[1:]))
                 and share[-1] < share[0])
    return AssumptionReport(n_grid, max_span, min_span, share, bounded, growing, vanishing)


def _fft_convolve(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    size = len(p) + len(q) - 1
    nfft = 1 << (size - 1).bit_length()
    out = np.fft.irfft(np.fft.rfft(p, nfft) * np.fft.rfft(q, nfft), nfft)[:size]
    return out


def _raw_convolve(p: np.ndarray, q: np.ndarray, method: str) -> np.ndarray:
    if method == "auto":
        method = "fft" if len(p) + len(q) - 1 > NAIVE_LIMIT else "naive"
    if method == "naive":
        return np.convolve(p, q)
    if method == "fft":
        return _fft_convolve(p, q)
    raise ContractError(f"unknown convolution method {method!r}")


def convolve(p: Distribution, q: Distribution, method: str = "auto") -> Distribution:
    """Exact law of the sum of independent variables with laws p and q.

    Direct summation below ``NAIVE_LIMIT`` output points, FFT above.  When
    both inputs live on a stride-2 sublattice they are compressed first, so
    parity zeros stay exact.  FFT round-off: negatives above -1e-14 are
    clipped and the mass is renormalised; a larger drift raises PrecisionError.
    """
    p, q = p.trimmed(), q.trimmed()
    if len(p) + len(q) - 1 > MAX_SUPPORT:
        raise ResourceError("combined support exceeds 2^26 points")
    stride = 2 if p.stride() == 2 and q.stride() == 2 else 1
    a, b = p.pmf[::stride], q.pmf[::stride]
    out = _raw_convolve(a, b, method)
    expected = float(np.sum(a)) * float(np.sum(b))
    if np.any(out < -_CLIP):
        raise PrecisionError(f"convolution produced negative mass {out.min():.3e}")
    out = np.clip(out, 0.0, None)
    drift = abs(float(np.sum(out)) - expected)
    if drift > _DRIFT:
        raise PrecisionError(f"convolution mass drift {drift:.3e}")
    if drift:
        out *= expected / np.sum(out)
    if stride == 2:
        full = np.zeros(2 * len(out) - 1)
        full[::2] = out
        out = full
    return Distribution(p.offset + q.offset, out)


def convolve_power(p: Distribution, M: int, method: str = "auto") -> Distribution:
    """M-fold self-convolution by binary exponentiation; ``M = 0`` gives delta_0."""
    M = int(M)
    if M < 0:
        raise ContractError("M must be >= 0")
    result = Distribution.delta(0)
    base = p
    first = True
    while M:
        if M & 1:
            result = base if first else convolve(result, base, method)
            first = False
        M >>= 1
        if M:
            base = convolve(base, base, method)
    return result


def compose_pm(segment_dists: Iterable[Distribution], method: str = "auto") -> Distribution:
    """Law of the sum of independent segment displacements (pairwise tree reduction)."""
    layer = list(segment_dists)
    if not layer:
        return Distribution.delta(0)
    while len(layer) > 1:
        nxt = [convolve(layer[i], layer[i + 1], method) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def random_coin_states(M: int, seed: int) -> list[CoinState]:
    """M coin states drawn uniformly from the Bloch sphere."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(M, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return [CoinState(complex(a, b), complex(c, d)) for a, b, c, d in v]


def dtqw_pm_distribution(coin: CoinOperator, schedule: Schedule,
                         states: CoinState | Sequence[CoinState]) -> Distribution:
    """DTQW restarted after every span with a prescribed coin state.

    ``states`` is one state for every segment or a sequence of M states.
    Identical (span, state) segments are evaluated once and raised to a power.
    """
    if isinstance(states, CoinState):
        states = [states] * schedule.M
    states = list(states)
    if len(states) != schedule.M:
        raise ContractError("need one coin state per segment")
    groups: dict = {}
    for d, s in zip(schedule.durations, states):
        key = (int(d), s.qL, s.qR)
        groups[key] = groups.get(key, 0) + 1
    parts = [convolve_power(dtqw_distribution(coin, CoinState(qL, qR), d), count)
             for (d, qL, qR), count in groups.items()]
    dist = compose_pm(parts)
    return dist.with_meta(final_time=schedule.final_time, M=schedule.M,
                          discarded=schedule.discarded)


def ctqw_pm_distribution(gamma: complex, schedule: Schedule) -> Distribution:
    """CTQW measured after every span (spans may be real)."""
    counts: dict = {}
    for d in schedule.durations:
        counts[float(d)] = counts.get(float(d), 0) + 1
    parts = [convolve_power(ctqw_distribution(CtqwParams(gamma, d)), c)
             for d, c in counts.items()]
    return compose_pm(parts).with_meta(final_time=schedule.final_time, M=schedule.M,
                                       discarded=schedule.discarded)


def ftd_rate(point: PhasePoint, n: int) -> float:
    """``r(n) = r^2 / n^(2 alpha)``."""
    return point.r ** 2 / float(n) ** (2 * point.alpha)


def ftd_segment_distribution(r_n: float, d: int) -> Distribution:
    """Even mixture of the d-step FTD walks started from e_L and from e_R."""
    coin = ftd_coin(r_n)
    left = dtqw_distribution(coin, CoinState.left(), d)
    right = dtqw_distribution(coin, CoinState.right(), d)
    return Distribution(left.offset, 0.5 * (left.pmf + right.pmf), {"r_n": r_n, "d": d})


def ftd_ppm_distribution(point: PhasePoint, n: int) -> Distribution:
    """FTD walk measured every ``d(n)`` steps, restarting from e_L or e_R with
    probability 1/2 each.

    ``d(n)`` is ``2^(1-beta) n^beta`` rounded to an even integer; the M(n)
    segments are i.i.d., so the result is a convolution power.
    """
    n = int(n)
    if n < 8 or n % 2:
        raise ContractError("n must be even and >= 8")
    r_n = ftd_rate(point, n)
    if r_n >= 1:
        raise ContractError(f"r(n) = {r_n} must be < 1")
    schedule = power_schedule(n, point.beta, even_spans=True)
    d = schedule.durations[0]
    segment = ftd_segment_distribution(r_n, d)
    dist = convolve_power(segment, schedule.M)
    return dist.with_meta(n=n, alpha=point.alpha, beta=point.beta, r=point.r, r_n=r_n,
                          d=d, M=schedule.M, discarded=schedule.discarded)
