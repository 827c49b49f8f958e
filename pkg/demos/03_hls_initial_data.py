# Starting from a scaled HLS optimiser.
#
# With k = -0.5, m = 4/3 and chi = 0.35 the HLS optimiser rho* is stationary
# only at one mass scaling c*.  Starting below c* the density spreads out,
# starting above it the density concentrates.  The supercritical outcome is
# resolution sensitive: at n = 300 the 1.1c* start still spreads out.

import numpy as np

from aggdiff import NumParams, PhysParams, evolve, hls_init

p = PhysParams(m=4.0 / 3.0, k=-0.5, chi=0.35)

# %% below and above the optimiser scaling
for c, dt in ((0.4, 1e-2), (1.1, 1e-3)):
    s0, profile = hls_init(p, c, 500)
    out = evolve(s0, p, NumParams(dt=dt, t_max=5.0), keep_states=False)
    rho = out.trajectory.column("max_density")
    mono = "decreasing" if np.all(np.diff(rho) < 0) else "not monotone"
    print(f"c0 = {c}c*: {out.status.value} at t = {out.final_state.time:.4f}, "
          f"max density {rho[0]:.4f} -> {rho[-1]:.4f} ({mono})")
