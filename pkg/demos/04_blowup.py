# Finite-time collapse above the critical strength.
#
# At k = -0.5, chi = 1 (well above chi_c ~ 0.39) the Gaussian start collapses.
# The step size has to keep halving as the core contracts, and the energy
# drops without bound.

import numpy as np

from aggdiff import NumParams, PhysParams, evolve, gaussian_init

p = PhysParams.fair(-0.5, 1.0)
out = evolve(gaussian_init(0.32, 400), p, NumParams(dt=1e-3, t_max=1.0, max_halvings=40), keep_states=False)
print(f"{out.status.value} at t = {out.final_state.time:.6f} ({out.halvings} halvings, final dt {out.final_dt:.2e})")

# %% how the collapse looks in the diagnostics
tr = out.trajectory
t, e, gap = tr.column("t"), tr.column("energy"), tr.column("min_gap")
for i in np.unique(np.linspace(0, len(t) - 1, 8).astype(int)):
    print(f"  t = {t[i]:.6f}  energy {e[i]:9.3f}  min gap {gap[i]:.2e}")
