# Where does the interaction win?
#
# For k < 0 there is a critical strength chi_c: below it the rescaled flow
# reaches a steady state, above it the particles collapse.  A chi sweep at
# fixed k brackets chi_c; the discrete problem also has its own exact
# threshold, found by minimising E / (-I) over configurations.

from aggdiff import NumParams
from aggdiff.analysis import critical_chi_sweep, discrete_critical_chi

k = -0.5
num = NumParams(dt=1e-3, t_max=10.0, steady_tol=1e-5)

# %% sweep
res = critical_chi_sweep([k], [0.34, 0.36, 0.38, 0.40, 0.42, 0.44], num, n=100)
for rec in res.grid:
    print(f"chi = {rec.chi:.2f}  {rec.status.value:8s} t = {rec.final_time:.3f}")
print(f"largest steady chi: {res.chi_c[k]:g}")

# %% discrete threshold
# the n = 2 value is (1/2)^(m-2) / 2 exactly; larger n approach the continuum value
for n in (2, 10, 100):
    chi_n, _ = discrete_critical_chi(k, n)
    print(f"n = {n:4d}  discrete chi_c = {chi_n:.5f}")
