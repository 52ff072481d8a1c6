"""Bound-saturating three-level states and a brute-force first-passage oracle."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernel
from .errors import DomainError, SaturabilityError
from .spectrum import DiscreteSpectrum, build_state

WEIGHT_DUST = 1e-14
TOUCH_TOL = 1e-9
_CHUNK_CELLS = 1 << 21


@dataclass(frozen=True)
class SaturatingTriple:
    e_plus: float
    e_r: float
    e_minus: float
    w_plus: float
    w_r: float
    w_minus: float
    predicted_tau: float
    p: float
    theta: float
    epsilon: float

    @property
    def params(self):
        return self.p, self.theta, self.epsilon

    def state(self, name=None) -> DiscreteSpectrum:
        return build_state([(self.e_minus, self.w_minus), (self.e_r, self.w_r),
                            (self.e_plus, self.w_plus)], name=name)


def _triple_weights(phi_plus, theta, phi_minus, sqrt_eps):
    # overlap at tau: levels sit at phases phi+, theta, phi- on the unit circle
    m = np.array([
        [1.0, 1.0, 1.0],
        [math.cos(phi_plus), math.cos(theta), math.cos(phi_minus)],
        [math.sin(phi_plus), math.sin(theta), math.sin(phi_minus)],
    ])
    return np.linalg.solve(m, np.array([1.0, sqrt_eps, 0.0]))


def saturating_state(p, epsilon, theta=0.0, e_r=0.0, scale=1.0) -> SaturatingTriple:
    """Three-level state for which the CZ bound at ``(p, theta)`` is attained.

    Energies are ``e_r + scale * (phi_pm - theta)`` and the predicted
    evolution time is ``1 / scale``.  For ``p <= 1`` the phase must satisfy
    ``|theta| <= theta_crit(p, epsilon)``; for ``1 < p < 2`` only
    ``theta = 0`` is allowed and saturation needs
    ``sqrt(epsilon) >= cos(phi_plus)``.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside [0, 1]")
    if not 0.0 < p <= 2.0:
        raise DomainError(f"p={p!r} outside (0, 2]")
    if not scale > 0.0:
        raise DomainError("scale must be positive")
    s = math.sqrt(epsilon)
    if s == 1.0:
        return SaturatingTriple(e_r + scale, e_r, e_r - scale, 0.0, 1.0, 0.0, 0.0,
                                p, theta, epsilon)
    if p == 2.0:
        raise DomainError("the p = 2 bound cannot be saturated for epsilon < 1")
    if p > 1.0:
        if theta != 0.0:
            raise DomainError("saturation for p > 1 requires theta = 0")
        phi = kernel.phi_pair(p, 0.0).phi_plus
        if s < math.cos(phi):
            raise SaturabilityError(
                f"sqrt(epsilon)={s!r} below cos(phi_plus)={math.cos(phi)!r} at p={p!r}")
    else:
        if abs(theta) > math.acos(s):
            raise DomainError(f"|theta| must not exceed arccos(sqrt(epsilon)) = {math.acos(s)!r}")
    pair = kernel.phi_pair(p, theta)
    w = _triple_weights(pair.phi_plus, theta, pair.phi_minus, s)
    if w.min() < -WEIGHT_DUST:
        raise SaturabilityError(
            f"negative weight {w.min():.3e}: theta={theta!r} lies outside "
            f"[-theta_crit, theta_crit] for p={p!r}")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    return SaturatingTriple(
        e_plus=e_r + scale * (pair.phi_plus - theta),
        e_r=e_r,
        e_minus=e_r + scale * (pair.phi_minus - theta),
        w_plus=float(w[0]), w_r=float(w[1]), w_minus=float(w[2]),
        predicted_tau=1.0 / scale,
        p=p, theta=theta, epsilon=epsilon,
    )


# ---------------------------------------------------------------------------
# first-passage oracle

@dataclass(frozen=True)
class OracleResult:
    tau_first: Optional[float]
    achieved_fidelity: Optional[float]
    horizon: float
    event: str = "none"


class _Trace:
    """Overlap ``G(t) = sum_j w_j exp(-i E_j t)`` with levels shifted to the mean."""

    def __init__(self, state):
        self.e = np.asarray(state.energies - np.dot(state.weights, state.energies))
        self.w = np.asarray(state.weights)

    def amp(self, t):
        return abs(np.dot(self.w, np.exp(-1j * self.e * t)))

    def slope(self, t):
        # d|G|^2/dt / 2
        ph = np.exp(-1j * self.e * t)
        g = np.dot(self.w, ph)
        dg = np.dot(self.w * self.e, ph) * -1j
        return float((g.conjugate() * dg).real)

    def amps(self, ts):
        return np.abs(np.exp(-1j * np.outer(ts, self.e)) @ self.w)


def _bisect(f, a, b, fa):
    # shrink [a, b] to relative width 1e-12 keeping sign(f(a)) on the left end
    for _ in range(200):
        if b - a <= 1e-12 * max(abs(a), abs(b)) or b - a <= 5e-324:
            break
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0) and fm != 0.0:
            a, fa = m, fm
        else:
            b = m
    return a, b


def evolution_time(state: DiscreteSpectrum, epsilon, horizon) -> OracleResult:
    """Smallest ``t >= 0`` with ``|<psi(0)|psi(t)>| = sqrt(epsilon)``, by dense scan.

    The scan step is ``min(pi / (20 * span), horizon / 1e4)``.  Downward
    crossings are refined by bisection; local minima of the overlap are
    refined on the derivative and count as the event when the minimum gets
    within ``1e-9`` of ``sqrt(epsilon)``, which catches touches such as
    exact orthogonality.
    """
    if not horizon > 0.0:
        raise DomainError("horizon must be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon!r} outside [0, 1]")
    s = math.sqrt(epsilon)
    if s == 1.0:
        return OracleResult(0.0, 1.0, horizon, "start")
    span = state.span
    if span == 0.0:
        return OracleResult(None, None, horizon)
    tr = _Trace(state)
    dt = min(math.pi / (20.0 * span), horizon / 1e4)
    n_total = int(math.ceil(horizon / dt))
    chunk = max(64, _CHUNK_CELLS // max(1, state.n))
    # max change of |G| over one step bounds how far a sampled minimum can hide a touch
    lip = float(np.dot(tr.w, np.abs(tr.e))) * dt
    prev = None  # last two samples from the previous chunk
    start = 0
    while start <= n_total:
        stop = min(n_total, start + chunk)
        idx = np.arange(start, stop + 1)
        ts = idx * dt
        fs = tr.amps(ts)
        if prev is not None:
            ts = np.concatenate([prev[0], ts])
            fs = np.concatenate([prev[1], fs])
        below = np.flatnonzero(fs <= s)
        first_cross = int(below[0]) if below.size else None
        interior = np.arange(1, fs.size - 1)
        mins = interior[(fs[interior] <= fs[interior - 1]) & (fs[interior] <= fs[interior + 1])
                        & (fs[interior] - s <= lip)]
        for k in mins:
            if first_cross is not None and k >= first_cross:
                break
            t_min = _refine_min(tr, ts[k - 1], ts[k + 1])
            f_min = tr.amp(t_min)
            if f_min <= s + TOUCH_TOL:
                if f_min < s:
                    a, b = _bisect(lambda t: tr.amp(t) - s, ts[k - 1], t_min,
                                   tr.amp(ts[k - 1]) - s)
                    return OracleResult(b, tr.amp(b), horizon, "crossing")
                return OracleResult(t_min, f_min, horizon, "touch")
        if first_cross is not None:
            k = first_cross
            if fs[k] == s:
                return OracleResult(float(ts[k]), s, horizon, "crossing")
            a, b = _bisect(lambda t: tr.amp(t) - s, ts[k - 1], ts[k], fs[k - 1] - s)
            t_hit = b if abs(tr.amp(b) - s) <= abs(tr.amp(a) - s) else a
            return OracleResult(t_hit, tr.amp(t_hit), horizon, "crossing")
        prev = (ts[-2:-1], fs[-2:-1])
        start = stop + 1
    return OracleResult(None, None, horizon)


def _refine_min(tr, a, b):
    da, db = tr.slope(a), tr.slope(b)
    if not (da < 0.0 < db):
        # flat or degenerate bracket: golden search on the amplitude
        from .solvers import golden_max
        x, _, _ = golden_max(lambda t: -tr.amp(t), a, b, xtol=1e-13 * max(1.0, b))
        return x
    lo, hi = _bisect(tr.slope, a, b, da)
    return lo if tr.amp(lo) <= tr.amp(hi) else hi


@dataclass(frozen=True)
class SaturationReport:
    triple: SaturatingTriple
    bound: float
    tau_oracle: Optional[float]
    relative_gap: float
    mu_plus: float
    theta_opt_residual: float


def verify_saturation(p, epsilon, theta_policy="optimal", theta=None, mu_plus=0.5,
                      horizon=None) -> SaturationReport:
    """Build a saturating triple, bound it, and compare with the oracle.

    ``theta_policy="optimal"`` takes ``theta = theta_opt(p, epsilon, mu_plus)``
    (``theta = 0`` for ``p > 1``); ``"given"`` uses ``theta`` as passed.
    """
    from .bounds import cz_bound_fixed_p

    if theta_policy == "optimal":
        theta = kernel.theta_opt(p, epsilon, mu_plus).theta_opt if p <= 1.0 else 0.0
    elif theta_policy != "given" or theta is None:
        raise DomainError("theta_policy must be 'optimal' or 'given' with a theta")
    tri = saturating_state(p, epsilon, theta)
    st = tri.state()
    bound = cz_bound_fixed_p(st, epsilon, p).value
    horizon = horizon or 4.0 * max(tri.predicted_tau, 1.0)
    orc = evolution_time(st, epsilon, horizon)
    tau = orc.tau_first
    gap = abs(bound - tau) / tau if tau else (0.0 if bound == 0.0 else math.inf)
    d_plus = (tri.e_plus - tri.e_r) ** p
    d_minus = (tri.e_r - tri.e_minus) ** p
    m_plus, m_minus = tri.w_plus * d_plus, tri.w_minus * d_minus
    mu = m_plus / (m_plus + m_minus) if m_plus + m_minus > 0 else 0.0
    # theta_opt condition: mu+ |a-|^2 (theta - phi-)^p = mu- |a+|^2 (phi+ - theta)^p
    resid = abs(mu * tri.w_minus * d_minus - (1.0 - mu) * tri.w_plus * d_plus)
    return SaturationReport(tri, bound, tau, gap, mu, resid)
