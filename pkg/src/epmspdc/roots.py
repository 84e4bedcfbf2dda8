"""Bracketed scalar root finding: bisection with secant acceleration."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from .errors import BracketError, NumericError


class Root(NamedTuple):
    x: float
    fx: float
    iterations: int


def bisect_secant(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float,
    ftol: float = 0.0,
    maxiter: int = 200,
) -> Root:
    """Find x in [a, b] with f(x) ~ 0.

    Stops when |f(x)| < ftol or the bracket is narrower than xtol. A secant
    step is taken when it lands strictly inside the bracket; otherwise, and
    whenever the previous step failed to halve the bracket, the midpoint is
    used. Never leaves the bracket.
    """
    if a > b:
        a, b = b, a
    fa, fb = f(a), f(b)
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise NumericError(f"non-finite function value at bracket ends ({fa}, {fb})")
    if abs(fa) < ftol or fa == 0.0:
        return Root(a, fa, 0)
    if abs(fb) < ftol or fb == 0.0:
        return Root(b, fb, 0)
    if (fa > 0) == (fb > 0):
        raise BracketError(
            f"no sign change on [{a!r}, {b!r}]: f(a)={fa:.3e}, f(b)={fb:.3e}"
        )

    width = b - a
    for it in range(1, maxiter + 1):
        x = b - fb * (b - a) / (fb - fa)
        if not (a < x < b) or (b - a) > 0.5 * width:
            x = 0.5 * (a + b)
        width = b - a
        fx = f(x)
        if abs(fx) < ftol or fx == 0.0:
            return Root(x, fx, it)
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        if b - a < xtol:
            return Root(a, fa, it) if abs(fa) <= abs(fb) else Root(b, fb, it)
    raise NumericError(f"root not converged after {maxiter} iterations on [{a!r}, {b!r}]")
