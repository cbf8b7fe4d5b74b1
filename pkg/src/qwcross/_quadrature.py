"""Adaptive Simpson quadrature."""

from __future__ import annotations

from typing import Callable

from ._errors import PrecisionError


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 30) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Raises PrecisionError if a panel still fails the error test at ``max_depth``.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    return _refine(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4 * flm + fm) / 6
    right = (b - m) * (fm + 4 * frm + fb) / 6
    delta = left + right - whole
    if abs(delta) <= 15 * tol:
        return left + right + delta / 15
    if depth <= 0:
        raise PrecisionError(f"adaptive Simpson did not converge on [{a}, {b}]")
    return (_refine(f, a, m, fa, flm, fm, left, tol / 2, depth - 1)
            + _refine(f, m, b, fm, frm, fb, right, tol / 2, depth - 1))
