"""Compare every bound on a three-level state and check them against brute force.

The state has levels 0, 1 and 2*pi with weights 0.4, 0.45 and 0.15.  For a
few target fidelities the script prints MT, ML, the p-optimized LZ, LC and
CZ bounds, and the first time the evolved state actually reaches the target.
"""

import math

from qslkit import build_state
from qslkit.bounds import BoundKind, ml_bound, mt_bound
from qslkit.optimizer import optimize_p
from qslkit.saturation import evolution_time

state = build_state([(0.0, 0.4), (1.0, 0.45), (2 * math.pi, 0.15)], name="g")

print(f"{'sqrt(eps)':>9} {'MT':>8} {'ML':>8} {'LZ':>10} {'LC':>8} {'CZ':>8} {'tau':>8}")
for se in (0.0, 0.15, 0.35, 0.6, 0.99):
    eps = se * se
    row = [mt_bound(state, eps).value, ml_bound(state, eps).value]
    opt = [optimize_p(k, state, eps) for k in (BoundKind.LZ, BoundKind.LC, BoundKind.CZ)]
    row += [r.value for r in opt]
    tau = evolution_time(state, eps, horizon=50.0).tau_first
    # None: the overlap stays above sqrt(eps) up to the horizon
    shown = "  >50" if tau is None else f"{tau:8.4f}"
    print(f"{se:9.2f} {row[0]:8.4f} {row[1]:8.4f} {row[2]:10.3g} {row[3]:8.4f} "
          f"{row[4]:8.4f} {shown:>8}")
    # every bound is a lower bound on the true evolution time
    assert tau is None or max(row) <= tau + 1e-9

cz = optimize_p(BoundKind.CZ, state, 0.15**2)
print(f"\nCZ at sqrt(eps)=0.15 is attained at p = {cz.p_used:.3f}, theta = {cz.theta_used:+.3f}, "
      f"E_r = {cz.e_r_used:g}")
