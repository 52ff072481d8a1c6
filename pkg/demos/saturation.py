"""Build three-level states that attain the fixed-p CZ bound, then confirm it.

For p <= 1 any phase inside the critical range gives a saturating state;
for 1 < p < 2 only theta = 0 works and only when the target overlap is at
least cos(phi+).  Near p = 2 that threshold climbs towards 1.
"""

import math

from qslkit import kernel
from qslkit.bounds import cz_bound_fixed_p
from qslkit.errors import SaturabilityError
from qslkit.saturation import evolution_time, saturating_state

for p, se, theta in ((0.5, 0.0, 0.0), (0.8, 0.3, 0.2), (1.0, 0.1, -0.1), (1.7, 0.5, 0.0)):
    tri = saturating_state(p, se * se, theta, scale=2.0)
    st = tri.state()
    bound = cz_bound_fixed_p(st, se * se, p).value
    tau = evolution_time(st, se * se, horizon=10.0).tau_first
    print(f"p={p:.2f} sqrt(eps)={se:.2f} theta={theta:+.2f}: levels {st.energies.round(4)}, "
          f"weights {st.weights.round(4)}")
    print(f"    bound {bound:.12f}  oracle {tau:.12f}  predicted {tri.predicted_tau:.12f}")

print("\nsaturability threshold eps_c(p) for p above pi/2:")
for p in (1.6, 1.75, 1.9, 1.99):
    ec = kernel.epsilon_c(p)
    try:
        saturating_state(p, max(ec - 1e-4, 0.0))
        below = "saturable"
    except SaturabilityError:
        below = "not saturable"
    print(f"  p={p:.2f}: eps_c = {ec:.6f}, just below it: {below}; "
          f"cos(phi+)^2 = {math.cos(kernel.phi_pair(p, 0.0).phi_plus) ** 2:.6f}")
