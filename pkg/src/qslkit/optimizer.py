"""Optimization of the LZ, LC and CZ bounds over the exponent ``p``.

The search is deterministic: a log-spaced grid over ``[p_min, p_max]``
followed by golden-section refinement around the best grid point.  Before
searching, the behaviour of the bound as ``p -> 0+`` is classified
analytically.  With ``w*`` the largest level weight the moment tends to
``(1 - w*) * (1 + p * cbar)``, so the bound behaves like
``pi * exp(-cbar) * r0**(1/p)`` with ``r0 = (1 - sqrt(eps)) / (2 (1 - w*))``.
It diverges for ``r0 > 1``, has the finite limit ``pi * exp(-cbar)`` for
``r0 == 1`` and vanishes otherwise.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._config import p_floor
from .bounds import (BoundKind, BoundResult, cz_bound_fixed_p, lc_bound, lz_bound,
                     lz_p_ceiling, mt_bound, ml_bound, dual_ml_bound)
from .errors import DomainError
from .solvers import golden_max
from .spectrum import DiscreteSpectrum

GRID_POINTS = 64
P_XTOL = 1e-6
RATIO_TOL = 1e-12
LIMIT_TIE = 1e-9


class Verdict(str, Enum):
    DIVERGENT = "divergent"
    FINITE_LIMIT = "finite_limit"
    VANISHING = "vanishing"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DivergenceAnalysis:
    ratio_r0: float
    limit_value: float
    verdict: Verdict
    reference_energy: float


def _limit_at(state, sqrt_eps, idx):
    e, w = state.energies, state.weights
    rest = 1.0 - float(w[idx])
    others = np.arange(e.size) != idx
    cbar = float(np.dot(w[others], np.log(np.abs(e[others] - e[idx])))) / rest
    return (1.0 - sqrt_eps) / (2.0 * rest), math.pi * math.exp(-cbar)


def divergence_analysis(state: DiscreteSpectrum, epsilon, pinned_ground=False):
    """Classify the ``p -> 0+`` behaviour of the LC/CZ (or, pinned, LZ) bound.

    ``pinned_ground`` fixes the reference level at the ground energy as in
    the LZ bound; otherwise the heaviest level is used, and among several
    equally heavy levels the one with the largest limit.
    """
    if state.n < 2:
        raise DomainError("divergence analysis needs at least two levels")
    s = math.sqrt(epsilon)
    if pinned_ground:
        idx = [0]
    else:
        w = state.weights
        idx = np.flatnonzero(w >= w.max() * (1.0 - RATIO_TOL)).tolist()
    best = None
    for i in idx:
        r0, lim = _limit_at(state, s, i)
        if best is None or lim > best[1]:
            best = (r0, lim, i)
    r0, lim, i = best
    if r0 > 1.0 + RATIO_TOL:
        verdict = Verdict.DIVERGENT
    elif abs(r0 - 1.0) <= RATIO_TOL:
        verdict = Verdict.FINITE_LIMIT
    else:
        verdict = Verdict.VANISHING
    return DivergenceAnalysis(r0, lim, verdict, float(state.energies[i]))


def p_grid(p_min, p_max, n=GRID_POINTS):
    """Log-uniform grid on ``[p_min, p_max]`` that always contains ``p = 1`` if in range."""
    g = np.geomspace(p_min, p_max, n)
    if p_min < 1.0 < p_max:
        g = np.union1d(g, [1.0])
    return g


def _segment(grid, p, split_at_one):
    lo, hi = float(grid[0]), float(grid[-1])
    if split_at_one and lo < 1.0 < hi:
        return (lo, 1.0) if p <= 1.0 else (math.nextafter(1.0, 2.0), hi)
    return lo, hi


def optimize_callable(fn, kind, state, epsilon, p_min=None, p_max=2.0, analysis=None,
                      split_at_one=True):
    """Maximize ``fn(p) -> BoundResult`` over ``p`` with the divergence pre-check.

    ``analysis`` defaults to :func:`divergence_analysis` of ``state``.  The
    bound may jump at ``p = 1``; with ``split_at_one`` the refinement never
    straddles it and approaches ``1+`` from above.
    """
    p_min = p_floor() if p_min is None else float(p_min)
    if not 0.0 < p_min < p_max <= 2.0:
        raise DomainError(f"need 0 < p_min < p_max <= 2, got {p_min!r}, {p_max!r}")
    if epsilon >= 1.0:
        return BoundResult(kind, 0.0, p_used=p_min, diagnostics={"path": "epsilon=1"})
    if state.n < 2:
        return BoundResult(kind, math.inf, True, reason="degenerate state never evolves")
    if analysis is None:
        analysis = divergence_analysis(state, epsilon)
    diag = {"r0": analysis.ratio_r0, "verdict": str(analysis.verdict),
            "limit_value": analysis.limit_value, "p_min": p_min, "p_max": p_max}
    if analysis.verdict is Verdict.DIVERGENT:
        diag["path"] = "divergent"
        return BoundResult(kind, math.inf, True, p_used=0.0,
                           reason=f"bound diverges as p -> 0+ (r0 = {analysis.ratio_r0:.6g} > 1)",
                           diagnostics=diag)

    grid = p_grid(p_min, p_max)
    cache = {}

    def ev(p):
        if p not in cache:
            cache[p] = fn(p)
        return cache[p]

    vals = np.array([ev(float(p)).value for p in grid])
    i = int(np.argmax(vals))
    top = float(vals[i])
    if math.isfinite(top) and top > 0.0:
        # 0 means the bound does not depend on p and p_opt is not identifiable
        diag["grid_spread"] = (top - float(vals.min())) / top
    best_p = float(grid[i])
    lo, hi = _segment(grid, best_p, split_at_one)
    a = max(lo, float(grid[i - 1])) if i > 0 else lo
    b = min(hi, float(grid[i + 1])) if i + 1 < grid.size else hi
    if b > a:
        x, fx, _ = golden_max(lambda p: ev(p).value, a, b, xtol=P_XTOL)
        if fx > ev(best_p).value:
            best_p = x
    best = ev(best_p)
    diag["evaluations"] = len(cache)
    diag["path"] = "grid+golden"
    if best.divergent:
        diag["path"] = "overflow"
        return _rekind(best, kind, diag)
    if (analysis.verdict is Verdict.FINITE_LIMIT
            and analysis.limit_value >= best.value * (1.0 - LIMIT_TIE)):
        diag["path"] = "finite_limit"
        diag["grid_best"] = best.value
        diag["grid_best_p"] = best_p
        diag["approximation"] = "p -> 0+ limit at theta = 0"
        return BoundResult(kind, analysis.limit_value, p_used=0.0, theta_used=0.0,
                           e_r_used=analysis.reference_energy, diagnostics=diag)
    return _rekind(best, kind, diag)


def _rekind(res, kind, diag):
    merged = dict(res.diagnostics)
    merged.update(diag)
    return BoundResult(kind, res.value, res.divergent, res.p_used, res.theta_used,
                       res.e_r_used, res.reason, merged)


_FIXED = {
    BoundKind.LZ: lz_bound,
    BoundKind.LC: lc_bound,
    BoundKind.CZ: cz_bound_fixed_p,
}


def optimize_p(kind, state: DiscreteSpectrum, epsilon, p_min=None, p_max=2.0) -> BoundResult:
    """p-optimized LZ, LC or CZ bound."""
    kind = BoundKind(kind)
    if kind not in _FIXED:
        raise DomainError(f"cannot optimize {kind} over p")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside [0, 1]")
    p_min = p_floor() if p_min is None else float(p_min)
    fixed = _FIXED[kind]
    if kind is BoundKind.LZ:
        ceiling = lz_p_ceiling(epsilon)
        if ceiling <= p_min:
            return BoundResult(kind, 0.0, diagnostics={
                "path": "empty", "note": "no exponent satisfies the LZ validity condition"})
        p_max = min(p_max, ceiling)
        analysis = divergence_analysis(state, epsilon, pinned_ground=True) if state.n > 1 else None
        return optimize_callable(lambda p: fixed(state, epsilon, p), kind, state, epsilon,
                                 p_min, p_max, analysis, split_at_one=False)
    return optimize_callable(lambda p: fixed(state, epsilon, p), kind, state, epsilon,
                             p_min, p_max, split_at_one=(kind is BoundKind.CZ))


def best_bound(state: DiscreteSpectrum, epsilon, p_min=None) -> BoundResult:
    """Largest of MT, ML, dual ML and the p-optimized LZ, LC and CZ bounds."""
    results = [mt_bound(state, epsilon), ml_bound(state, epsilon), dual_ml_bound(state, epsilon)]
    results += [optimize_p(k, state, epsilon, p_min) for k in (BoundKind.LZ, BoundKind.LC,
                                                               BoundKind.CZ)]
    win = results[0]
    for r in results[1:]:
        if r.value > win.value:
            win = r
    diag = dict(win.diagnostics)
    diag["winner"] = str(win.kind)
    diag["all"] = {str(r.kind): r.value for r in results}
    return BoundResult(win.kind, win.value, win.divergent, win.p_used, win.theta_used,
                       win.e_r_used, win.reason, diag)


def mt_recovery_p(epsilon):
    """Exponent at which the optimized LC bound reproduces the MT bound."""
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside [0, 1)")
    s = math.sqrt(epsilon)
    return math.sqrt((1.0 + s) / (1.0 - s)) * math.acos(s)
