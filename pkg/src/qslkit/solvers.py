"""Bracketed scalar root finders and a golden-section maximizer.

All routines are deterministic and keep a sign-change bracket around the
root, so a bad derivative can slow them down but never send them astray.
"""

import math
from typing import Callable, NamedTuple

from ._config import CONFIG
from .errors import ConvergenceError

_EPS = 2.220446049250313e-16
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class RootResult(NamedTuple):
    x: float
    residual: float
    iterations: int


def _sign(v):
    return 1 if v > 0 else (-1 if v < 0 else 0)


def bisect(f: Callable[[float], float], lo: float, hi: float, f_lo=None, f_hi=None,
           max_iter: int = 400) -> RootResult:
    """Bisection down to adjacent floating-point numbers.

    ``f(lo)`` and ``f(hi)`` must not share a strict sign.
    """
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo == 0.0:
        return RootResult(lo, 0.0, 0)
    if f_hi == 0.0:
        return RootResult(hi, 0.0, 0)
    if _sign(f_lo) == _sign(f_hi):
        raise ConvergenceError(
            f"no sign change on [{lo!r}, {hi!r}]: f={f_lo!r}, {f_hi!r}", [lo, hi])
    s_lo = _sign(f_lo)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid <= min(lo, hi) or mid >= max(lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return RootResult(mid, 0.0, it)
        if _sign(fm) == s_lo:
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    if abs(f_lo) <= abs(f_hi):
        return RootResult(lo, abs(f_lo), it)
    return RootResult(hi, abs(f_hi), it)


def newton_bracketed(fdf: Callable[[float], tuple], lo: float, hi: float, x0: float,
                     tol: float = CONFIG.residual_tol, max_iter: int = CONFIG.max_iter,
                     f_lo=None) -> RootResult:
    """Safeguarded Newton iteration on a sign-change bracket ``[lo, hi]``.

    ``fdf(x)`` returns ``(f(x), f'(x))``.  A step that leaves the bracket is
    replaced by the bracket midpoint; two such clips in a row trigger a burst
    of plain bisection steps.  Iteration continues past ``|f| <= tol`` until
    the Newton correction reaches rounding level.  A bracket squeezed to a
    few ulps counts as converged even if ``|f| > tol``, since no float inside
    it does better; the residual is reported.
    """
    if lo > hi:
        lo, hi = hi, lo
    if f_lo is None:
        f_lo = fdf(lo)[0]
    if f_lo == 0.0:
        return RootResult(lo, 0.0, 0)
    s_lo = _sign(f_lo)
    # collapse is judged against the bracket magnitude so roots at 0 terminate
    x_scale = max(abs(lo), abs(hi), 1e-300)
    x = min(max(x0, lo), hi)
    trace = []
    clips = 0
    best = (math.inf, x)
    polish = 0
    it = 0
    collapsed = False
    last = math.inf
    while it < max_iter:
        it += 1
        fx, dfx = fdf(x)
        trace.append(x)
        if fx == 0.0:
            return RootResult(x, 0.0, it)
        if abs(fx) < best[0]:
            best = (abs(fx), x)
        if _sign(fx) == s_lo:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * _EPS * x_scale:
            collapsed = True
            break
        step = fx / dfx if dfx != 0.0 and math.isfinite(dfx) else math.nan
        x_new = x - step
        if abs(fx) <= tol and (x_new == x or abs(fx) >= last
                               or abs(step) <= 8.0 * _EPS * max(abs(x), 1e-300)):
            break
        last = abs(fx)
        if not (lo < x_new < hi):
            clips += 1
            x_new = 0.5 * (lo + hi)
            if clips >= 2:
                for _ in range(CONFIG.bisection_burst):
                    it += 1
                    fm = fdf(x_new)[0]
                    trace.append(x_new)
                    if fm == 0.0:
                        return RootResult(x_new, 0.0, it)
                    if abs(fm) < best[0]:
                        best = (abs(fm), x_new)
                    if _sign(fm) == s_lo:
                        lo = x_new
                    else:
                        hi = x_new
                    x_new = 0.5 * (lo + hi)
                clips = 0
        else:
            clips = 0
            if abs(fx) <= tol:
                polish += 1
                if polish > 4:
                    break
        x = x_new
    fx = fdf(x)[0]
    if abs(fx) > best[0]:
        x, fx = best[1], best[0]
    if abs(fx) > tol and not collapsed:
        raise ConvergenceError(
            f"residual {abs(fx):.3e} above {tol:.1e} after {it} iterations", trace)
    return RootResult(x, abs(fx), it)


def golden_max(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-6,
               max_iter: int = 200):
    """Golden-section search for the maximum of ``f`` on ``[a, b]``.

    The endpoints are compared against the interior optimum at the end, so a
    maximum sitting on the boundary is returned exactly.  Returns
    ``(x, f(x), evaluations)``.
    """
    fa, fb = f(a), f(b)
    lo, hi = a, b
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    n = 4
    while hi - lo > xtol and n < max_iter:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        n += 1
    candidates = [(f1, x1), (f2, x2), (fa, a), (fb, b)]
    fx, x = max(candidates, key=lambda c: (c[0], -c[1]))
    return x, fx, n
