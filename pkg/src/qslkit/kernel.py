"""Scalar special functions behind every bound.

The central object is the tangency point of the comparison curve
``cos(theta) - A * (x - theta)**p`` with ``cos(x)``.  For an exponent ``p``
and phase ``theta`` the point ``phi_plus`` is the unique root of

    f(phi) = p * (cos(phi) - cos(theta)) + (phi - theta) * sin(phi)

in ``(|theta|, pi)``; the mirrored point is ``phi_minus(theta) =
-phi_plus(-theta)``.  The coefficient of the comparison curve is

    A = sin(phi) / (p * (phi - theta)**(p - 1)).

Angles are in radians, fidelities ``epsilon`` are squared overlaps.
"""

import math
from dataclasses import dataclass

from ._config import CONFIG
from .errors import DomainError
from .solvers import RootResult, bisect, newton_bracketed

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class TangentPair:
    """Both tangency points and coefficients for one ``(p, theta)``."""

    p: float
    theta: float
    phi_plus: float
    phi_minus: float
    a_plus: float
    a_minus: float
    residual: float = 0.0


@dataclass(frozen=True)
class AngleSolution:
    theta_crit: float
    theta_opt: float
    residual: float
    iterations: int = 0


def in_tangent_region(p, theta):
    """Whether ``(p, theta)`` admits a tangency point on the ``x >= theta`` side."""
    if 0.0 < p <= 1.0:
        return -math.pi < theta <= HALF_PI
    if 1.0 < p <= 2.0:
        return -math.pi < theta <= 0.0
    return False


def _check_region(p, theta):
    if not (math.isfinite(p) and math.isfinite(theta)) or not in_tangent_region(p, theta):
        raise DomainError(f"(p={p!r}, theta={theta!r}) outside the admissible region")


# ---------------------------------------------------------------------------
# h(x) = x cot(x/2) and its inverse

def _two_minus_h(x):
    # 2 - h(x); series near 0 keeps relative accuracy when h is close to 2
    if x < 0.2:
        x2 = x * x
        return x2 * (1.0 / 6.0 + x2 * (1.0 / 360.0 + x2 * (
            1.0 / 15120.0 + x2 * (1.0 / 604800.0 + x2 / 23950080.0))))
    return 2.0 - x / math.tan(0.5 * x)


def h(x):
    """``x * cot(x / 2)`` on ``[0, pi]``, continued by ``h(0) = 2``."""
    if not 0.0 <= x <= math.pi:
        raise DomainError(f"h is defined on [0, pi], got {x!r}")
    if x == 0.0:
        return 2.0
    if x < 0.2:
        return 2.0 - _two_minus_h(x)
    return x / math.tan(0.5 * x)


def h_inverse(y):
    """Inverse of :func:`h`, mapping ``[0, 2]`` onto ``[0, pi]``."""
    if not 0.0 <= y <= 2.0:
        raise DomainError(f"h^-1 is defined on [0, 2], got {y!r}")
    if y == 2.0:
        return 0.0
    if y == 0.0:
        return math.pi
    target = 2.0 - y
    root = bisect(lambda x: _two_minus_h(x) - target, 0.0, math.pi,
                  f_lo=-target, f_hi=2.0 - target)
    return root.x


def epsilon_c(p):
    """Smallest fidelity at which the theta = 0 bound is saturable, for p >= pi/2."""
    if not HALF_PI <= p <= 2.0:
        raise DomainError(f"epsilon_c needs p in [pi/2, 2], got {p!r}")
    return math.cos(h_inverse(p)) ** 2


# ---------------------------------------------------------------------------
# tangency points

def _tangent_fdf(p, theta):
    ct = math.cos(theta)

    def fdf(phi):
        s, c = math.sin(phi), math.cos(phi)
        return p * (c - ct) + (phi - theta) * s, (1.0 - p) * s + (phi - theta) * c

    return fdf


def _solve_phi_plus(p, theta):
    if theta == 0.0 and p > 1.0:
        # double root at 0; the other root is h^-1(p) exactly
        return RootResult(h_inverse(p), 0.0, 0)
    fdf = _tangent_fdf(p, theta)
    f = lambda x: fdf(x)[0]
    lo = max(HALF_PI, abs(theta)) if p <= 1.0 else abs(theta)
    f_lo = f(lo)
    if f_lo <= 0.0:
        if p == 1.0 or lo != theta:
            # theta = pi/2 at p = 1: the tangency degenerates onto theta
            return RootResult(lo, abs(f_lo), 0)
        step = 1e-9
        while f_lo <= 0.0 and lo + step < math.pi:
            lo, step = theta + step, step * 4.0
            f_lo = f(lo)
    hi = math.pi
    res = newton_bracketed(fdf, lo, hi, hi, f_lo=f_lo)
    if res.x - theta < CONFIG.ill_conditioned_gap:
        res = bisect(f, lo, hi, f_lo=f_lo)
    return res


def _sin_phi(p, theta, phi):
    """``sin(phi)`` at a tangency point, accurate to rounding even when ``phi ~ pi``."""
    if phi < 3.0:
        return math.sin(phi)
    # refine u = pi - phi directly; small p puts phi within ~p of pi
    ct = math.cos(theta)
    u = math.pi - phi
    for _ in range(2):
        su, cu = math.sin(u), math.cos(u)
        w = math.pi - u - theta
        f = w * su - p * (cu + ct)
        df = (p - 1.0) * su + w * cu
        if df == 0.0:
            break
        u -= f / df
    return math.sin(u)


def _coefficient(p, theta, phi):
    if p == 1.0:
        return _sin_phi(p, theta, phi)
    gap = phi - theta
    if gap <= 0.0:
        # only reachable at (p, theta) = (2, 0)
        return 0.5
    return _sin_phi(p, theta, phi) / (p * gap ** (p - 1.0))


def phi_plus(p, theta):
    """Tangency point on the ``x >= theta`` side."""
    _check_region(p, theta)
    return _solve_phi_plus(p, theta).x


def tangent_plus(p, theta):
    """``(phi_plus, A_plus)`` for a single side; see module docstring."""
    _check_region(p, theta)
    phi = _solve_phi_plus(p, theta).x
    return phi, _coefficient(p, theta, phi)


def tangent_minus(p, theta):
    """``(phi_minus, A_minus)``: the mirror image of :func:`tangent_plus` at ``-theta``."""
    phi, a = tangent_plus(p, -theta)
    return -phi, a


def phi_pair(p, theta):
    """Solve both tangency equations for ``(p, theta)``.

    Requires both ``(p, theta)`` and ``(p, -theta)`` admissible, that is
    ``p <= 1`` with ``|theta| <= pi/2`` or ``theta = 0`` with ``p <= 2``.
    """
    if not (-HALF_PI <= theta <= HALF_PI):
        raise DomainError(f"theta must lie in [-pi/2, pi/2], got {theta!r}")
    _check_region(p, theta)
    _check_region(p, -theta)
    if p == 2.0 and theta == 0.0:
        return TangentPair(p, theta, 0.0, 0.0, 0.5, 0.5, 0.0)
    plus = _solve_phi_plus(p, theta)
    minus = plus if theta == 0.0 else _solve_phi_plus(p, -theta)
    return TangentPair(
        p=p, theta=theta,
        phi_plus=plus.x, phi_minus=-minus.x,
        a_plus=_coefficient(p, theta, plus.x),
        a_minus=_coefficient(p, -theta, minus.x),
        residual=max(plus.residual, minus.residual),
    )


def tangent_residual(p, theta, phi):
    return _tangent_fdf(p, theta)(phi)[0]


# ---------------------------------------------------------------------------
# angular optimisation for p in (0, 1]

def _check_angle_args(p, epsilon):
    if not 0.0 < p <= 1.0:
        raise DomainError(f"angular search needs p in (0, 1], got {p!r}")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"fidelity must lie in [0, 1], got {epsilon!r}")


def _dphi_dtheta(p, theta, phi):
    num = math.sin(phi) - p * math.sin(theta)
    den = (phi - theta) * math.cos(phi) + (1.0 - p) * math.sin(phi)
    return num / den


def _r_minus(p, sqrt_eps):
    def fdf(theta):
        phi = -_solve_phi_plus(p, -theta).x
        dphi = _dphi_dtheta(p, -theta, -phi)
        a, b = 0.5 * (phi - theta), 0.5 * (phi + theta)
        r = math.cos(a) - sqrt_eps * math.cos(b)
        dr = -0.5 * math.sin(a) * (dphi - 1.0) + 0.5 * sqrt_eps * math.sin(b) * (dphi + 1.0)
        return r, dr

    return fdf


def theta_crit(p, epsilon):
    """Root of ``cos((phi_-(t) - t)/2) - sqrt(eps) cos((phi_-(t) + t)/2)`` on ``[0, arccos sqrt(eps)]``."""
    _check_angle_args(p, epsilon)
    sqrt_eps = math.sqrt(epsilon)
    top = math.acos(sqrt_eps)
    if top == 0.0:
        return 0.0
    fdf = _r_minus(p, sqrt_eps)
    r_top = fdf(top)[0]
    if r_top >= 0.0:
        return top
    return newton_bracketed(fdf, 0.0, top, 0.5 * top).x


def _sin_half_over_pow(d, p):
    # sin(d/2) / d**p with a series below the cancellation threshold
    if d < CONFIG.series_gap:
        d2 = d * d
        return d ** (1.0 - p) * (0.5 - d2 / 48.0 + d2 * d2 / 3840.0 - d2 * d2 * d2 / 645120.0)
    return math.sin(0.5 * d) / d ** p


def _s_plus(p, sqrt_eps, theta):
    """Return ``(s_plus(theta), d s_plus / d theta)``."""
    phi = _solve_phi_plus(p, theta).x
    d, sig = phi - theta, phi + theta
    dphi = _dphi_dtheta(p, theta, phi)
    dd, dsig = dphi - 1.0, dphi + 1.0
    r = math.cos(0.5 * d) - sqrt_eps * math.cos(0.5 * sig)
    dr = -0.5 * math.sin(0.5 * d) * dd + 0.5 * sqrt_eps * math.sin(0.5 * sig) * dsig
    q = _sin_half_over_pow(d, p)
    if d > 0.0:
        dq = (0.5 * math.cos(0.5 * d) / d ** p - p * q / d) * dd
    else:
        dq = 0.0
    return q * r, dq * r + q * dr


def s_function(p, epsilon, mu_plus, theta):
    """Stationarity function whose root is the optimal phase; returns ``(s, ds/dtheta)``."""
    sqrt_eps = math.sqrt(epsilon)
    mu_minus = 1.0 - mu_plus
    sp, dsp = _s_plus(p, sqrt_eps, theta) if mu_plus else (0.0, 0.0)
    sm, dsm = _s_plus(p, sqrt_eps, -theta) if mu_minus else (0.0, 0.0)
    return mu_plus * sp - mu_minus * sm, mu_plus * dsp + mu_minus * dsm


def theta_opt(p, epsilon, mu_plus):
    """Phase maximizing ``(cos t - sqrt eps) / (mu+ A+(t) + mu- A-(t))``."""
    _check_angle_args(p, epsilon)
    if not 0.0 <= mu_plus <= 1.0:
        raise DomainError(f"mu_plus must lie in [0, 1], got {mu_plus!r}")
    crit = theta_crit(p, epsilon)
    if crit == 0.0:
        return AngleSolution(0.0, 0.0, 0.0)
    if mu_plus == 1.0:
        return AngleSolution(crit, -crit, 0.0)
    if mu_plus == 0.0:
        return AngleSolution(crit, crit, 0.0)
    fdf = lambda t: s_function(p, epsilon, mu_plus, t)
    f_lo = fdf(-crit)[0]
    if f_lo >= 0.0:
        return AngleSolution(crit, -crit, abs(f_lo))
    f_hi = fdf(crit)[0]
    if f_hi <= 0.0:
        return AngleSolution(crit, crit, abs(f_hi))
    res = newton_bracketed(fdf, -crit, crit, 0.0, f_lo=f_lo)
    return AngleSolution(crit, res.x, res.residual, res.iterations)


def angle_objective(p, epsilon, mu_plus, theta):
    """``(cos theta - sqrt eps) / (mu+ A+ + mu- A-)`` at a given phase."""
    num = math.cos(theta) - math.sqrt(epsilon)
    den = 0.0
    if mu_plus:
        den += mu_plus * tangent_plus(p, theta)[1]
    if mu_plus != 1.0:
        den += (1.0 - mu_plus) * tangent_plus(p, -theta)[1]
    return num / den


def cz_angle_factor(p, epsilon, mu_plus):
    """Maximum of :func:`angle_objective` over the phase, with its maximizer.

    Returns ``(factor, AngleSolution)``.
    """
    sol = theta_opt(p, epsilon, mu_plus)
    if epsilon >= 1.0:
        return 0.0, sol
    return max(angle_objective(p, epsilon, mu_plus, sol.theta_opt), 0.0), sol
