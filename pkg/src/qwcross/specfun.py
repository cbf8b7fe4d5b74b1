"""Integer-order Bessel functions J_n and I_n by Miller's backward recurrence.

Both families are computed as whole rows ``f_0 .. f_N`` by running the
three-term recurrence downward from a start order far in the decaying tail,
then fixing the unknown scale with a normalisation identity::

    J:  J_0(z) + 2 * sum_{k>=1} J_{2k}(z) = 1
    I:  e^{-z} * (I_0(z) + 2 * sum_{k>=1} I_k(z)) = 1

The I row therefore comes out exponentially scaled for free, which is the
form every probability mass function in this package needs.

Magnitudes below ``UNDERFLOW`` are returned as exact zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import ContractError

__all__ = [
    "UNDERFLOW",
    "BesselRow",
    "bessel_j",
    "bessel_i",
    "bessel_i_scaled",
    "bessel_j_row",
    "bessel_i_row",
]

UNDERFLOW = 1e-280
Z_MAX = 1e6

_BIG = 1e200
_LOG_BIG = math.log(_BIG)
_LOG_UNDERFLOW = math.log(UNDERFLOW)
# normalised magnitude the start order must reach, else the headroom doubles
_START_TOL = 1e-20


@dataclass(frozen=True)
class BesselRow:
    """Values of J_0..J_N or e^{-z} I_0..I_N at a fixed argument.

    ``kind`` is ``"J"`` or ``"I"``; I rows are always stored scaled by
    ``e^{-z}``.  Indexing with a negative order applies the reflection
    formulas ``J_{-n} = (-1)^n J_n`` and ``I_{-n} = I_n``.
    """

    kind: str
    z: float
    values: np.ndarray

    @property
    def order_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, order: int) -> float:
        n = abs(int(order))
        if n > self.order_max:
            return 0.0
        v = float(self.values[n])
        if order < 0 and self.kind == "J" and n % 2:
            return -v
        return v

    def symmetric(self, halfwidth: int) -> np.ndarray:
        """Values at orders ``-halfwidth .. halfwidth`` (zero past order_max)."""
        if halfwidth < 0:
            raise ContractError("halfwidth must be non-negative")
        pos = np.zeros(halfwidth + 1)
        m = min(halfwidth, self.order_max)
        pos[: m + 1] = self.values[: m + 1]
        neg = pos[:0:-1].copy()
        if self.kind == "J":
            odd = np.arange(halfwidth, 0, -1) % 2 == 1
            neg[odd] = -neg[odd]
        return np.concatenate([neg, pos])


def _check_argument(z: float) -> float:
    z = float(z)
    if not math.isfinite(z) or z < 0:
        raise ContractError(f"Bessel argument must be finite and >= 0, got {z!r}")
    if z > Z_MAX:
        raise ContractError(f"Bessel argument {z} exceeds supported maximum {Z_MAX:g}")
    return z


def _backward(order_max: int, z: float, sign: float, n_start: int, even_only: bool):
    """Run f_{k-1} = (2k/z) f_k + sign * f_{k+1} down from n_start.

    Returns (values for 0..order_max, normalised magnitude at n_start).
    """
    mant = [0.0] * (order_max + 1)
    scale = [0] * (order_max + 1)
    nxt, cur = 0.0, 1.0
    count = 0
    norm = 0.0
    start_mant, start_count = cur, 0
    k = n_start
    while True:
        if k <= order_max:
            mant[k] = cur
            scale[k] = count
        if k == 0:
            norm += cur
            break
        if not even_only or k % 2 == 0:
            norm += 2.0 * cur
        prev = (2.0 * k / z) * cur + sign * nxt
        nxt, cur = cur, prev
        if abs(cur) > _BIG:
            cur /= _BIG
            nxt /= _BIG
            norm /= _BIG
            count += 1
        k -= 1

    log_norm = math.log(abs(norm))
    out = np.zeros(order_max + 1)
    for i in range(order_max + 1):
        m = mant[i]
        if m == 0.0:
            continue
        log_mag = math.log(abs(m)) - (count - scale[i]) * _LOG_BIG - log_norm
        if log_mag >= _LOG_UNDERFLOW:
            out[i] = math.copysign(math.exp(log_mag), m * norm)
    log_start = math.log(abs(start_mant)) - (count - start_count) * _LOG_BIG - log_norm
    return out, math.exp(log_start) if log_start > -700 else 0.0


def _j_headroom(order_max: int, z: float) -> int:
    # past the turning point J_n decays on an Airy scale ~ (z/2)^(1/3)
    return math.ceil(30 + 25 * (z / 2.0) ** (1.0 / 3.0) + 2 * math.sqrt(order_max))


def _i_headroom(order_max: int, z: float) -> int:
    # e^{-z} I_n(z) ~ exp(-n^2 / 2z) for n << z
    return math.ceil(30 + 10 * math.sqrt(z) + 2 * math.sqrt(order_max))


def bessel_j_row(order_max: int, z: float) -> BesselRow:
    """J_0(z) .. J_{order_max}(z) by backward recurrence.

    The recurrence starts at ``max(order_max, z) + headroom``; if the start
    order turns out not to lie deep enough in the tail the headroom is doubled
    and the row recomputed.
    """
    z = _check_argument(z)
    order_max = int(order_max)
    if order_max < 0:
        raise ContractError("order_max must be >= 0")
    if z == 0.0:
        values = np.zeros(order_max + 1)
        values[0] = 1.0
        return BesselRow("J", z, values)
    head = _j_headroom(order_max, z)
    base = max(order_max, math.ceil(z))
    for _ in range(8):
        n_start = base + head
        n_start += n_start % 2  # even start keeps the normalisation sum aligned
        values, tail = _backward(order_max, z, -1.0, n_start, even_only=True)
        if tail < _START_TOL:
            break
        head *= 2
    return BesselRow("J", z, values)


def bessel_i_row(order_max: int, z: float) -> BesselRow:
    """e^{-z} I_0(z) .. e^{-z} I_{order_max}(z) by backward recurrence."""
    z = _check_argument(z)
    order_max = int(order_max)
    if order_max < 0:
        raise ContractError("order_max must be >= 0")
    if z == 0.0:
        values = np.zeros(order_max + 1)
        values[0] = 1.0
        return BesselRow("I", z, values)
    head = _i_headroom(order_max, z)
    for _ in range(8):
        values, tail = _backward(order_max, z, 1.0, order_max + head, even_only=False)
        if tail < _START_TOL:
            break
        head *= 2
    return BesselRow("I", z, values)


def bessel_j(order: int, z: float, full_output: bool = False):
    """J_order(z) for integer order and real z >= 0.

    Orders with ``|order| > z + 200`` are not computed; the result is 0.
    With ``full_output=True`` returns ``(value, underflowed)`` where the flag
    marks a value set to zero by the underflow policy.
    """
    z = _check_argument(z)
    n = abs(int(order))
    if n > z + 200:
        value, flag = 0.0, True
    else:
        value = bessel_j_row(n, z)[int(order)]
        flag = value == 0.0 and not (z == 0.0 and n > 0)
    return (value, flag) if full_output else value


def bessel_i_scaled(order: int, z: float, full_output: bool = False):
    """e^{-z} I_order(z); finite for every admissible z."""
    z = _check_argument(z)
    n = abs(int(order))
    if n > z + 200 and n > 40 * math.sqrt(z + 1) + 50:
        value, flag = 0.0, True
    else:
        value = bessel_i_row(n, z)[n]
        flag = value == 0.0 and not (z == 0.0 and n > 0)
    return (value, flag) if full_output else value


def bessel_i(order: int, z: float, full_output: bool = False):
    """I_order(z).  Overflows to ``inf`` once e^z does (z > ~709)."""
    value, flag = bessel_i_scaled(order, z, full_output=True)
    with np.errstate(over="ignore"):
        value = float(value * np.exp(z)) if value else 0.0
    return (value, flag) if full_output else value
