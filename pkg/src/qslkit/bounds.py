"""Quantum speed limit bounds at fixed parameters.

Every function takes a :class:`~qslkit.spectrum.DiscreteSpectrum` and a
fidelity ``epsilon`` (the squared overlap, not its root) and returns a
:class:`BoundResult` holding ``tau`` in units of hbar over the energy unit.
"""

import math
from functools import lru_cache
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import kernel
from .errors import DomainError
from .solvers import golden_max
from .spectrum import DiscreteSpectrum, cached_e_r_opt, cached_level_moments, moments, summary

_LOG_MAX = math.log(np.finfo(float).max)


class BoundKind(str, Enum):
    MT = "MT"
    ML = "ML"
    DUAL_ML = "DualML"
    LZ = "LZ"
    LC = "LC"
    CHAU = "Chau"
    CZ = "CZ"
    CZ2D = "CZ2D"
    CZ_ASYM = "CZAsym"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BoundResult:
    kind: BoundKind
    value: float
    divergent: bool = False
    p_used: Optional[float] = None
    theta_used: Optional[float] = None
    e_r_used: Optional[float] = None
    reason: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def finite(self):
        return math.isfinite(self.value)


def _check_eps(epsilon):
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside [0, 1]")
    return math.sqrt(epsilon)


def _check_p(p):
    if not 0.0 < p <= 2.0:
        raise DomainError(f"p={p!r} outside (0, 2]")


def _infinite(kind, reason, **kw):
    return BoundResult(kind, math.inf, True, reason=reason, **kw)


def root_p(ratio, p):
    """``ratio ** (1/p)`` computed in logs; ``inf`` past the float range."""
    if ratio <= 0.0:
        return 0.0
    if math.isinf(ratio):
        return math.inf
    lg = math.log(ratio) / p
    return math.inf if lg > _LOG_MAX else math.exp(lg)


def _from_ratio(kind, ratio, p, **kw):
    value = root_p(ratio, p)
    if math.isinf(value):
        return _infinite(kind, "value exceeds the floating-point range", p_used=p, **kw)
    return BoundResult(kind, value, p_used=p, **kw)


def mt_bound(state: DiscreteSpectrum, epsilon) -> BoundResult:
    s = _check_eps(epsilon)
    if s == 1.0:
        return BoundResult(BoundKind.MT, 0.0)
    de = summary(state).std_dev
    if de == 0.0:
        return _infinite(BoundKind.MT, "zero energy spread")
    return BoundResult(BoundKind.MT, math.acos(s) / de)


def _ml_core(kind, moment, epsilon):
    s = _check_eps(epsilon)
    if s == 1.0:
        return BoundResult(kind, 0.0, p_used=1.0, theta_used=0.0)
    if moment == 0.0:
        return _infinite(kind, "zero mean energy above the reference level")
    tc = kernel.theta_crit(1.0, epsilon)
    theta = -tc
    phi, a = kernel.tangent_plus(1.0, theta)
    value = (math.cos(theta) - s) / (moment * a)
    return BoundResult(kind, value, p_used=1.0, theta_used=theta,
                       diagnostics={"phi_plus": phi,
                                    "residual": abs(kernel.tangent_residual(1.0, theta, phi))})


def ml_bound(state: DiscreteSpectrum, epsilon) -> BoundResult:
    """ML bound via the single root ``theta* = -theta_crit(1, epsilon)``."""
    res = _ml_core(BoundKind.ML, summary(state).mean_above_ground, epsilon)
    return _with(res, e_r_used=float(state.energies[0]))


def dual_ml_bound(state: DiscreteSpectrum, epsilon) -> BoundResult:
    res = _ml_core(BoundKind.DUAL_ML, summary(state.reversed()).mean_above_ground, epsilon)
    return _with(res, e_r_used=float(state.energies[-1]))


def _with(res, **changes):
    d = dict(res.__dict__)
    d.update(changes)
    return BoundResult(**d)


def lz_ceiling(p):
    """Largest admissible fidelity for the LZ bound of order ``p``."""
    return math.pi ** 2 / (math.pi ** 2 + 4.0 * p * p)


def lz_p_ceiling(epsilon):
    """Largest ``p`` allowed by the LZ validity condition at this fidelity."""
    if epsilon == 0.0:
        return math.inf
    return 0.5 * math.pi * math.sqrt(1.0 / epsilon - 1.0)


def lz_bound(state: DiscreteSpectrum, epsilon, p) -> BoundResult:
    _check_p(p)
    _check_eps(epsilon)
    if epsilon > lz_ceiling(p) * (1.0 + 1e-15):
        raise DomainError(f"epsilon={epsilon!r} above the LZ ceiling {lz_ceiling(p)!r} at p={p!r}")
    num = 1.0 - math.sqrt(min(1.0, epsilon * (1.0 + 4.0 * p * p / math.pi ** 2)))
    e0 = float(state.energies[0])
    m = moments(state, p, e0)[1]
    if num <= 0.0:
        return BoundResult(BoundKind.LZ, 0.0, p_used=p, e_r_used=e0)
    if m == 0.0:
        return _infinite(BoundKind.LZ, "zero moment above the ground level", p_used=p)
    value = root_p(num / (2.0 * m), p)
    if math.isinf(value):
        return _infinite(BoundKind.LZ, "value exceeds the floating-point range",
                         p_used=p, e_r_used=e0)
    return BoundResult(BoundKind.LZ, math.pi * value, p_used=p, e_r_used=e0)


@lru_cache(maxsize=4096)
def a_p0(p):
    """Coefficient of the symmetric comparison curve at ``theta = 0``."""
    return kernel.phi_pair(p, 0.0).a_plus


def lc_bound(state: DiscreteSpectrum, epsilon, p, kind=None) -> BoundResult:
    _check_p(p)
    s = _check_eps(epsilon)
    kind = kind or (BoundKind.CHAU if p == 1.0 else BoundKind.LC)
    prof = cached_e_r_opt(state, p)
    if s == 1.0:
        return BoundResult(kind, 0.0, p_used=p, theta_used=0.0, e_r_used=prof.e_r_opt)
    if prof.moment == 0.0:
        return _infinite(kind, "degenerate state never evolves", p_used=p)
    ratio = (1.0 - s) / (a_p0(p) * prof.moment)
    return _from_ratio(kind, ratio, p, theta_used=0.0, e_r_used=prof.e_r_opt,
                       diagnostics={"moment": prof.moment, "e_r_iterations": prof.iterations,
                                    "residual": prof.residual})


@lru_cache(maxsize=65536)
def _angle_factor(p, epsilon, mu_plus):
    return kernel.cz_angle_factor(p, epsilon, mu_plus)


def cz_bound_fixed_p(state: DiscreteSpectrum, epsilon, p) -> BoundResult:
    """CZ bound at fixed ``p``, maximized over the phase and the reference level.

    For ``p > 1`` it coincides with the LC bound.  For ``p <= 1`` the
    denominator ``A+ M+ + A- M-`` is concave in ``E_r`` between levels, so the
    joint maximum is attained with ``E_r`` on a level.  The moment minimizer
    alone is not enough: the angular factor depends on the one-sided split
    and can favour a level with a larger moment (at ``p = 1``, ``E_r = E_0``
    reproduces ML).  Levels are scanned by increasing moment and the scan
    stops once ``F(1) / moment`` cannot beat the best value, using that the
    angular factor ``F(mu+)`` is convex and symmetric, hence at most ``F(1)``.
    """
    _check_p(p)
    s = _check_eps(epsilon)
    if p > 1.0:
        return lc_bound(state, epsilon, p, kind=BoundKind.CZ)
    if s == 1.0:
        return BoundResult(BoundKind.CZ, 0.0, p_used=p, theta_used=0.0,
                           e_r_used=cached_e_r_opt(state, p).e_r_opt)
    if state.n == 1:
        return _infinite(BoundKind.CZ, "degenerate state never evolves", p_used=p)
    plus, minus = cached_level_moments(state, p)
    total = plus + minus
    f_top = _angle_factor(p, epsilon, 1.0)[0]
    best = None
    scanned = 0
    for j in np.argsort(total, kind="stable"):
        m = float(total[j])
        if best is not None and f_top / m <= best[0]:
            break
        mu = float(plus[j]) / m
        factor, sol = _angle_factor(p, epsilon, mu)
        scanned += 1
        ratio = factor / m
        if best is None or ratio > best[0]:
            best = (ratio, int(j), mu, sol)
    ratio, j, mu, sol = best
    return _from_ratio(BoundKind.CZ, ratio, p, theta_used=sol.theta_opt,
                       e_r_used=float(state.energies[j]),
                       diagnostics={"moment": float(total[j]), "mu_plus": mu,
                                    "theta_crit": sol.theta_crit, "residual": sol.residual,
                                    "levels_scanned": scanned})


def cz_bound_at_theta(state: DiscreteSpectrum, epsilon, p, theta) -> BoundResult:
    """CZ expression at fixed ``(p, theta)``, maximized over the reference level only.

    Not maximized over the phase; meant for diagnostics.  For ``p > 1`` the
    reference level is the moment minimizer.
    """
    _check_p(p)
    s = _check_eps(epsilon)
    if abs(theta) > math.pi / 2:
        raise DomainError(f"|theta|={abs(theta)!r} exceeds pi/2")
    pair = kernel.phi_pair(p, theta)
    num = math.cos(theta) - s
    if p > 1.0:
        prof = cached_e_r_opt(state, p)
        e_r = prof.e_r_opt
        den = (pair.a_plus * prof.mu_plus + pair.a_minus * prof.mu_minus) * prof.moment
    else:
        plus, minus = cached_level_moments(state, p)
        dens = pair.a_plus * plus + pair.a_minus * minus
        j = int(np.argmin(dens))
        e_r, den = float(state.energies[j]), float(dens[j])
    if num <= 0.0:
        return BoundResult(BoundKind.CZ, 0.0, p_used=p, theta_used=theta, e_r_used=e_r)
    if den == 0.0:
        return _infinite(BoundKind.CZ, "degenerate state never evolves", p_used=p, theta_used=theta)
    return _from_ratio(BoundKind.CZ, num / den, p, theta_used=theta, e_r_used=e_r)


# two-level closed form -----------------------------------------------------

def _two_level(state):
    if state.n != 2:
        raise DomainError(f"closed form needs exactly 2 levels, got {state.n}")
    w0, w1 = (float(w) for w in state.weights)
    return w0, w1, state.span


def cz2d_ratio(state: DiscreteSpectrum, epsilon, p):
    """``(tau * gap)**p`` of the two-level closed form at fixed ``p``."""
    _check_p(p)
    s = _check_eps(epsilon)
    w0, w1, _ = _two_level(state)
    if p > 1.0:
        # (w0**(-1/(p-1)) + w1**(-1/(p-1)))**(p-1) via log-sum-exp
        u = 1.0 / (p - 1.0)
        terms = np.array([-u * math.log(w0), -u * math.log(w1)])
        top = float(terms.max())
        lse = top + math.log(float(np.exp(terms - top).sum()))
        log_sum = (p - 1.0) * lse
        if s == 1.0:
            return 0.0
        return math.exp(math.log(1.0 - s) - math.log(a_p0(p)) + log_sum) \
            if log_sum < _LOG_MAX else math.inf
    if s == 1.0:
        return 0.0
    tc = kernel.theta_crit(p, epsilon)
    a_plus = kernel.tangent_plus(p, -tc)[1]
    a_minus = kernel.tangent_minus(p, tc)[1]
    return (math.cos(tc) - s) / min(a_plus * w1, a_minus * w0)


def cz2d_fixed_p(state: DiscreteSpectrum, epsilon, p) -> BoundResult:
    _, _, gap = _two_level(state)
    ratio = cz2d_ratio(state, epsilon, p)
    res = _from_ratio(BoundKind.CZ2D, ratio, p)
    if res.finite:
        return _with(res, value=res.value / gap)
    return res


def cz_bound_2d(state: DiscreteSpectrum, epsilon, p_min=None, p_max=2.0) -> BoundResult:
    """p-optimized CZ bound of a two-level state from its closed form."""
    _two_level(state)
    from .optimizer import optimize_callable
    return optimize_callable(lambda p: cz2d_fixed_p(state, epsilon, p), BoundKind.CZ2D,
                             state, epsilon, p_min, p_max)


# asymmetric exponents ------------------------------------------------------

ASYM_VARIANTS = ("p=2q", "q=2p")


def _asym_exponents(q, theta, variant):
    """Exponents ``(above, below)`` and a region check for the two variants.

    ``q`` is the smaller exponent in both variants.
    """
    if variant not in ASYM_VARIANTS:
        raise DomainError(f"unknown variant {variant!r}")
    if not 0.0 < q <= 1.0 or abs(theta) > kernel.HALF_PI:
        raise DomainError(f"(q={q!r}, theta={theta!r}) outside the asymmetric region")
    if q > 0.5:
        # the doubled exponent exceeds 1 and restricts the phase sign
        if variant == "p=2q" and theta > 0.0:
            raise DomainError("variant p=2q with q > 1/2 needs theta <= 0")
        if variant == "q=2p" and theta < 0.0:
            raise DomainError("variant q=2p with q > 1/2 needs theta >= 0")
    return (2.0 * q, q) if variant == "p=2q" else (q, 2.0 * q)


def _asym_x(a, b, c):
    """Smallest ``x >= 0`` with ``a x**2 + b x >= c``; stable quadratic root."""
    if c <= 0.0:
        return 0.0
    if a == 0.0:
        return c / b if b > 0.0 else math.inf
    return 2.0 * c / (math.sqrt(b * b + 4.0 * a * c) + b)


def cz_asym_at(state: DiscreteSpectrum, epsilon, q, theta, variant, e_r):
    """Asymmetric bound at a fixed reference level ``e_r``."""
    s = _check_eps(epsilon)
    up, down = _asym_exponents(q, theta, variant)
    a_plus = kernel.tangent_plus(up, theta)[1]
    a_minus = kernel.tangent_minus(down, theta)[1]
    m_plus = moments(state, up, e_r)[1]
    m_minus = moments(state, down, e_r)[2]
    c = math.cos(theta) - s
    if variant == "p=2q":
        x = _asym_x(a_plus * m_plus, a_minus * m_minus, c)
    else:
        x = _asym_x(a_minus * m_minus, a_plus * m_plus, c)
    return 0.0 if x == 0.0 else root_p(x, q)


def cz_asymmetric(state: DiscreteSpectrum, epsilon, q, theta, variant="p=2q") -> BoundResult:
    """Asymmetric-exponent CZ bound at fixed ``(q, theta)``, searched over ``E_r``.

    The reference level is searched heuristically: every level is a candidate
    and each gap between neighbouring levels gets a golden-section pass.  The
    true maximum over ``E_r`` may be missed if a gap holds several local maxima.
    """
    up, down = _asym_exponents(q, theta, variant)
    s = _check_eps(epsilon)
    if s >= math.cos(theta):
        return BoundResult(BoundKind.CZ_ASYM, 0.0, p_used=up, theta_used=theta)
    e = state.energies
    f = lambda x: cz_asym_at(state, epsilon, q, theta, variant, x)
    best_v, best_x = -1.0, float(e[0])
    evals = 0
    for x in e:
        v = f(float(x))
        evals += 1
        if v > best_v:
            best_v, best_x = v, float(x)
    for a, b in zip(e[:-1], e[1:]):
        x, v, n = golden_max(f, float(a), float(b), xtol=1e-9 * max(1.0, state.span))
        evals += n
        if v > best_v:
            best_v, best_x = v, x
    diag = {"e_r_search": "heuristic golden-section per gap", "evaluations": evals,
            "exponents": (up, down)}
    if math.isinf(best_v):
        return _infinite(BoundKind.CZ_ASYM, "no evolution possible at this reference level",
                         p_used=up, theta_used=theta, e_r_used=best_x, diagnostics=diag)
    return BoundResult(BoundKind.CZ_ASYM, best_v, p_used=up, theta_used=theta,
                       e_r_used=best_x, diagnostics=diag)
