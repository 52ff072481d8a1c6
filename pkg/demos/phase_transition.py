"""Watch the optimized LC bound jump from infinity to pi on a three-level state.

Levels 0, 1, 2 carry weights 0.3, 0.6, 0.1.  As p -> 0 the LC bound behaves
like pi * exp(-cbar) * r0**(1/p) with r0 = (1 - sqrt(eps)) / (2 (1 - w*)).
For sqrt(eps) < 0.2 the ratio exceeds 1 and the bound diverges: the overlap
never drops that low.  At sqrt(eps) = 0.2 it equals 1 and the limit pi is
exactly the evolution time.
"""

from qslkit import build_state
from qslkit.bounds import BoundKind, lc_bound
from qslkit.optimizer import divergence_analysis, optimize_p
from qslkit.saturation import evolution_time

state = build_state([(0.0, 0.3), (1.0, 0.6), (2.0, 0.1)], name="e")

for se in (0.18, 0.19, 0.199, 0.2, 0.21, 0.3):
    eps = se * se
    an = divergence_analysis(state, eps)
    res = optimize_p(BoundKind.LC, state, eps)
    tau = evolution_time(state, eps, horizon=20.0).tau_first
    shown = "never" if tau is None else f"{tau:.6f}"
    print(f"sqrt(eps)={se:5.3f}  r0={an.ratio_r0:.4f} ({an.verdict})  "
          f"LC_opt={res.value:.6f}  tau={shown}")

print("\napproach to the limit at sqrt(eps) = 0.2:")
for p in (1e-1, 1e-2, 1e-3, 1e-4):
    print(f"  p={p:g}: LC = {lc_bound(state, 0.04, p).value:.8f}")
