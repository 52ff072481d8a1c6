"""States in energy representation and their energy moments.

A discrete state is a list of ``(energy, weight)`` pairs with weights
``|a_j|**2``.  The central quantity is the absolute moment

    M_p(E_r) = sum_j w_j |E_j - E_r|**p

split into the part above ``E_r`` (plus) and below it (minus), together with
its minimum over the reference energy ``E_r``.
"""

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ._config import CONFIG
from .errors import DomainError, QuadratureError, ValidationError
from .solvers import newton_bracketed

RENORM_TOL = 1e-6
TIE_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    energies: np.ndarray
    weights: np.ndarray
    name: Optional[str] = None

    @property
    def n(self):
        return int(self.energies.size)

    @property
    def levels(self):
        return tuple(zip(self.energies.tolist(), self.weights.tolist()))

    @property
    def span(self):
        return float(self.energies[-1] - self.energies[0])

    def reversed(self):
        """The energy-reversed state ``E_j -> -E_j`` with the same weights."""
        return DiscreteSpectrum(_frozen(-self.energies[::-1]), _frozen(self.weights[::-1]),
                                self.name)

    def scaled(self, s):
        if not s > 0:
            raise DomainError("scale factor must be positive")
        return DiscreteSpectrum(_frozen(self.energies * s), self.weights, self.name)

    def __eq__(self, other):
        if not isinstance(other, DiscreteSpectrum):
            return NotImplemented
        return (self.name == other.name
                and np.array_equal(self.energies, other.energies)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.name, self.energies.tobytes(), self.weights.tobytes()))


def _normalize(weights, what):
    total = float(np.sum(weights))
    if not math.isfinite(total) or abs(total - 1.0) > RENORM_TOL:
        raise ValidationError(f"{what} sum to {total!r}, expected 1")
    # drift at rounding level is kept so that serialized states re-parse bit for bit
    if abs(total - 1.0) <= 4.0 * weights.size * np.finfo(float).eps:
        return weights
    return weights / total


def build_state(raw, name=None) -> DiscreteSpectrum:
    """Validate, sort, merge and normalize a list of ``(energy, weight)`` levels.

    Items may be pairs or mappings with ``energy`` and ``weight`` keys.
    Duplicate energies are merged by summing their weights; zero-weight levels
    are dropped.  A total weight within ``1e-6`` of one is renormalized,
    anything further off is rejected.
    """
    pairs = []
    for item in raw:
        if isinstance(item, dict):
            try:
                item = (item["energy"], item["weight"])
            except KeyError as exc:
                raise ValidationError(f"level is missing field {exc}") from None
        try:
            e, w = item
            e, w = float(e), float(w)
        except (TypeError, ValueError):
            raise ValidationError(f"malformed level {item!r}") from None
        if not (math.isfinite(e) and math.isfinite(w)):
            raise ValidationError(f"non-finite level {item!r}")
        if w < 0:
            raise ValidationError(f"negative weight {w!r}")
        pairs.append((e, w))
    if not pairs:
        raise ValidationError("a state needs at least one level")
    arr = np.asarray(pairs, dtype=float)
    energies, inverse = np.unique(arr[:, 0], return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=arr[:, 1], minlength=energies.size)
    weights = _normalize(weights, "weights")
    keep = weights > 0
    return DiscreteSpectrum(_frozen(energies[keep]), _frozen(weights[keep]), name)


def moments(state: DiscreteSpectrum, p, e_r):
    """Return ``(abs_moment, plus_moment, minus_moment)`` of order ``p`` about ``e_r``.

    Levels sitting exactly at ``e_r`` contribute to neither side.
    """
    if not 0 < p <= 2:
        raise DomainError(f"p={p!r} outside (0, 2]")
    d = state.energies - e_r
    w = state.weights
    up = d > 0
    down = d < 0
    plus = float(np.dot(w[up], d[up] ** p))
    minus = float(np.dot(w[down], (-d[down]) ** p))
    return plus + minus, plus, minus


@dataclass(frozen=True)
class SpectrumSummary:
    mean: float
    std_dev: float
    ground: float
    top: float
    mean_above_ground: float
    mean_below_top: float
    median: float


def _median_index(weights):
    cum = np.cumsum(weights)
    k = int(np.searchsorted(cum, 0.5 - TIE_RTOL))
    return min(k, weights.size - 1), cum


def summary(state: DiscreteSpectrum) -> SpectrumSummary:
    e, w = state.energies, state.weights
    mean = float(np.dot(w, e))
    var = float(np.dot(w, (e - mean) ** 2))
    k, _ = _median_index(w)
    return SpectrumSummary(
        mean=mean,
        std_dev=math.sqrt(max(var, 0.0)),
        ground=float(e[0]),
        top=float(e[-1]),
        mean_above_ground=float(np.dot(w, e - e[0])),
        mean_below_top=float(np.dot(w, e[-1] - e)),
        median=float(e[k]),
    )


@dataclass(frozen=True)
class MomentCandidate:
    e_r: float
    moment: float
    mu_plus: float
    mu_minus: float


@dataclass(frozen=True)
class MomentProfile:
    p: float
    e_r_opt: float
    moment: float
    mu_plus: float
    mu_minus: float
    candidates: tuple = field(default=())
    iterations: int = 0
    residual: float = 0.0


def _candidate(state, p, e_r):
    m, plus, minus = moments(state, p, e_r)
    if m > 0:
        return MomentCandidate(float(e_r), m, plus / m, minus / m)
    return MomentCandidate(float(e_r), m, 0.0, 0.0)


def _profile(p, cands, iterations=0, residual=0.0):
    first = cands[0]
    return MomentProfile(p, first.e_r, first.moment, first.mu_plus, first.mu_minus,
                         tuple(cands), iterations, residual)


def _balance(state, p, e_r):
    """Normalized ``<(E-E_r)_+^(p-1)> - <(E_r-E)_+^(p-1)>`` and its derivative."""
    d = state.energies - e_r
    w = state.weights
    a = np.abs(d)
    nz = a > 0
    q = p - 1.0
    pw = np.zeros_like(a)
    pw[nz] = a[nz] ** q
    scale = float(np.dot(w, pw)) or 1.0
    g = float(np.dot(w * np.sign(d), pw)) / scale
    if np.all(nz):
        dg = -q * float(np.dot(w, a ** (q - 1.0))) / scale
    else:
        dg = -math.inf
    return g, dg


def _convex_minimizer(state, p):
    e = state.energies
    if p == 2.0:
        return float(np.dot(state.weights, e)), 0, 0.0
    g = lambda x: _balance(state, p, x)[0]
    lo, hi = 0, e.size - 1
    g_lo = g(e[lo])
    if g_lo <= 0:
        return float(e[lo]), 0, abs(g_lo)
    g_hi = g(e[hi])
    if g_hi >= 0:
        return float(e[hi]), 0, abs(g_hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        gm = g(e[mid])
        if abs(gm) <= CONFIG.residual_tol:
            return float(e[mid]), 0, 0.0
        if gm > 0:
            lo, g_lo = mid, gm
        else:
            hi = mid
    a, b = float(e[lo]), float(e[hi])
    x0 = b - 1e-9 * state.span
    res = newton_bracketed(lambda x: _balance(state, p, x), a, b, x0, f_lo=g_lo)
    return res.x, res.iterations, res.residual


def _pairwise_moments(state, p, block=256):
    e, w = state.energies, state.weights
    out = np.empty(e.size)
    for i in range(0, e.size, block):
        d = np.abs(e[i:i + block, None] - e[None, :])
        out[i:i + block] = (d ** p) @ w
    return out


def e_r_opt(state: DiscreteSpectrum, p) -> MomentProfile:
    """Minimize the absolute moment of order ``p`` over the reference energy.

    ``p > 1`` solves the balance condition between the one-sided moments of
    order ``p - 1``; ``p == 1`` uses the median; ``p < 1`` compares every
    level, since the minimizer of a concave-between-levels objective sits on
    a level.  ``candidates`` lists every tied minimizer.  At ``p == 1`` both
    ends of a median interval are listed because the one-sided split differs
    between them; the first entry is the lowest median.
    """
    if not 0 < p <= 2:
        raise DomainError(f"p={p!r} outside (0, 2]")
    e = state.energies
    if state.n == 1:
        return MomentProfile(p, float(e[0]), 0.0, 0.0, 0.0,
                             (MomentCandidate(float(e[0]), 0.0, 0.0, 0.0),))
    if p > 1:
        x, it, res = _convex_minimizer(state, p)
        return _profile(p, [_candidate(state, p, x)], it, res)
    if p == 1:
        k, cum = _median_index(state.weights)
        cands = [_candidate(state, p, e[k])]
        if k + 1 < e.size and abs(cum[k] - 0.5) <= TIE_RTOL:
            cands.append(_candidate(state, p, e[k + 1]))
        return _profile(p, cands)
    m = _pairwise_moments(state, p)
    best = float(m.min())
    tied = np.flatnonzero(m <= best * (1.0 + TIE_RTOL))
    return _profile(p, [_candidate(state, p, e[i]) for i in tied])


def level_moments(state: DiscreteSpectrum, p, block=256):
    """One-sided moments ``(plus, minus)`` of order ``p`` with ``E_r`` at each level."""
    e, w = state.energies, state.weights
    plus, minus = np.empty(e.size), np.empty(e.size)
    for i in range(0, e.size, block):
        d = e[None, :] - e[i:i + block, None]
        pw = np.abs(d) ** p
        plus[i:i + block] = np.where(d > 0, pw, 0.0) @ w
        minus[i:i + block] = np.where(d < 0, pw, 0.0) @ w
    return plus, minus


@lru_cache(maxsize=1024)
def cached_level_moments(state: DiscreteSpectrum, p):
    plus, minus = level_moments(state, p)
    return _frozen(plus), _frozen(minus)


@lru_cache(maxsize=4096)
def cached_e_r_opt(state: DiscreteSpectrum, p) -> MomentProfile:
    """Memoized :func:`e_r_opt`; states are immutable and hashable."""
    return e_r_opt(state, p)


# continuous spectra ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ContinuousSpectrum:
    """Piecewise-linear density on a strictly increasing energy grid."""

    energies: np.ndarray
    density: np.ndarray
    name: Optional[str] = None

    @property
    def span(self):
        return float(self.energies[-1] - self.energies[0])


def build_continuous(raw, name=None) -> ContinuousSpectrum:
    pts = []
    for item in raw:
        if isinstance(item, dict):
            try:
                item = (item["energy"], item["rho"])
            except KeyError as exc:
                raise ValidationError(f"density point is missing field {exc}") from None
        try:
            e, r = (float(v) for v in item)
        except (TypeError, ValueError):
            raise ValidationError(f"malformed density point {item!r}") from None
        if not (math.isfinite(e) and math.isfinite(r)) or r < 0:
            raise ValidationError(f"invalid density point {item!r}")
        pts.append((e, r))
    if len(pts) < 2:
        raise ValidationError("a density needs at least two grid points")
    arr = np.asarray(pts)
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValidationError("density grid energies must be strictly increasing")
    total = float(np.trapezoid(arr[:, 1], arr[:, 0]))
    if not math.isfinite(total) or abs(total - 1.0) > RENORM_TOL:
        raise ValidationError(f"density integrates to {total!r}, expected 1")
    rho = arr[:, 1] / total
    return ContinuousSpectrum(_frozen(arr[:, 0]), _frozen(rho), name)


def _side_integrals(spec, q, e_r):
    """Exact ``int rho(E) (E-E_r)_+^q dE`` and its mirror for ``q > -1``."""
    x, r = spec.energies, spec.density
    x0, x1, r0, r1 = x[:-1], x[1:], r[:-1], r[1:]
    slope = (r1 - r0) / (x1 - x0)

    def piece(a, b, sign):
        # y = sign * (E - e_r) runs over [ya, yb] with ya <= yb
        ya = np.maximum(sign * (a - e_r), 0.0)
        yb = np.maximum(sign * (b - e_r), 0.0)
        lo, hi = np.minimum(ya, yb), np.maximum(ya, yb)
        # rho as a function of y: c0 + c1 * y
        c1 = sign * slope
        c0 = r0 + slope * (e_r - x0)
        val = (c0 * (hi ** (q + 1) - lo ** (q + 1)) / (q + 1)
               + c1 * (hi ** (q + 2) - lo ** (q + 2)) / (q + 2))
        return float(np.sum(val))

    return piece(x0, x1, 1.0), piece(x0, x1, -1.0)


def adaptive_simpson(f, a, b, rtol=1e-10, max_depth=50):
    """Adaptive Simpson quadrature with Richardson correction.

    Raises QuadratureError if some panel fails to meet its share of the
    tolerance at ``max_depth``.
    """
    def simpson(fa, fm, fb, a, b):
        return (b - a) * (fa + 4.0 * fm + fb) / 6.0

    fa, fb, m = f(a), f(b), 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, a, b)
    scale = abs(whole)
    stack = [(a, b, fa, fm, fb, whole, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        err = left + right - whole
        scale = max(scale, abs(left + right))
        if abs(err) <= 15.0 * rtol * scale or (b - a) <= 1e-15 * max(abs(a), abs(b), 1.0):
            total += left + right + err / 15.0
        elif depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson did not reach rtol={rtol:g} on [{a!r}, {b!r}]")
        else:
            stack.append((a, m, fa, flm, fm, left, depth + 1))
            stack.append((m, b, fm, frm, fb, right, depth + 1))
    return total


def continuous_moments(spec: ContinuousSpectrum, p, e_r, method="exact", rtol=1e-10):
    """``(abs, plus, minus)`` moments of a continuous density about ``e_r``.

    ``method="exact"`` integrates the piecewise-linear density in closed form;
    ``method="simpson"`` uses adaptive Simpson panel by panel.
    """
    if not 0 < p <= 2:
        raise DomainError(f"p={p!r} outside (0, 2]")
    if method == "exact":
        plus, minus = _side_integrals(spec, p, e_r)
        return plus + minus, plus, minus
    if method != "simpson":
        raise ValueError(f"unknown method {method!r}")
    x, r = spec.energies, spec.density
    nodes = np.union1d(x, [e_r]) if x[0] < e_r < x[-1] else x
    rho = lambda t: float(np.interp(t, x, r))
    plus = minus = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        if a >= e_r:
            plus += adaptive_simpson(lambda t: rho(t) * (t - e_r) ** p, a, b, rtol)
        else:
            minus += adaptive_simpson(lambda t: rho(t) * (e_r - t) ** p, a, b, rtol)
    return plus + minus, plus, minus


def continuous_profile(spec: ContinuousSpectrum, p, method="exact") -> MomentProfile:
    """Minimize the absolute moment of a continuous density over ``E_r``.

    Stationary points solve the balance of the one-sided moments of order
    ``p - 1``.  All sign changes on the grid nodes are refined with Brent's
    method and the one with the smallest moment wins.
    """
    if not 0 < p <= 2:
        raise DomainError(f"p={p!r} outside (0, 2]")
    q = p - 1.0

    def g(t):
        plus, minus = _side_integrals(spec, q, t)
        return plus - minus

    x = spec.energies
    probe = np.union1d(x, 0.5 * (x[:-1] + x[1:]))
    vals = [g(t) for t in probe]
    roots = []
    for a, b, ga, gb in zip(probe[:-1], probe[1:], vals[:-1], vals[1:]):
        if ga == 0.0:
            roots.append(float(a))
        elif ga > 0 > gb or ga < 0 < gb:
            roots.append(brentq(g, a, b, xtol=1e-15 * max(1.0, spec.span),
                                rtol=4 * np.finfo(float).eps,
                                maxiter=CONFIG.max_iter))
    if vals[-1] == 0.0:
        roots.append(float(probe[-1]))
    if not roots:
        roots = [float(x[0]) if vals[0] < 0 else float(x[-1])]
    cands = []
    for t in roots:
        m, plus, minus = continuous_moments(spec, p, t, method)
        cands.append(MomentCandidate(t, m, plus / m if m else 0.0, minus / m if m else 0.0))
    cands.sort(key=lambda c: (c.moment, c.e_r))
    best = cands[0]
    cands = [c for c in cands if c.moment <= best.moment * (1 + TIE_RTOL)]
    return MomentProfile(p, best.e_r, best.moment, best.mu_plus, best.mu_minus,
                         tuple(cands), 0, abs(g(best.e_r)))
