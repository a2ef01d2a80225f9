"""Safeguarded Newton/bisection for scalar roots on a sign-change bracket."""

from __future__ import annotations

from typing import Callable

Func = Callable[[float], float]


class RootFindingError(RuntimeError):
    pass


def bracketed_root(
    f: Func,
    lo: float,
    hi: float,
    df: Func | None = None,
    *,
    xtol: float = 1e-15,
    ftol: float = 1e-14,
    maxiter: int = 200,
) -> float:
    """Return a root of ``f`` in ``[lo, hi]``.

    ``f(lo)`` and ``f(hi)`` must differ in sign. With a derivative the
    iteration takes Newton steps and falls back to bisection whenever a
    step leaves the current bracket; without one it bisects.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootFindingError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    if flo > 0:
        lo, hi = hi, lo  # keep f(lo) < 0 < f(hi)

    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0 or abs(fx) < ftol and abs(hi - lo) < 1e-6:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        step_ok = False
        if df is not None:
            d = df(x)
            if d != 0.0:
                xn = x - fx / d
                if min(lo, hi) < xn < max(lo, hi):
                    step_ok = True
        if not step_ok:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= xtol * max(1.0, abs(x)):
            return xn
        x = xn
    raise RootFindingError(f"no convergence after {maxiter} iterations near x={x}")
