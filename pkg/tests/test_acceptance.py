"""Acceptance criteria 1-8, each at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (collected in the pytest
terminal summary).  Run alone with::

    python3 -m pytest tests/test_acceptance.py -v

Expected runtime is several minutes on one core; the long runs are shared
between criteria through module-scoped fixtures.
"""

import numpy as np
import pytest

from aggdiff.analysis import critical_chi_sweep, fit_exponential_rate, relative_energy, wasserstein_to_final
from aggdiff.dynamics import NumParams, Status, evolve, implicit_step
from aggdiff.energy import (blowup_functional_h, discrete_energy, discrete_gradient, discrete_hessian,
                            dissipation, virial_residual)
from aggdiff.initdata import gaussian_init, hls_init, indicator_init
from aggdiff.model import Frame, PhysParams
from aggdiff.state import ParticleState, dilate, moments

from conftest import ACCEPTANCE_LINES, random_positions

pytestmark = pytest.mark.slow


def report(number, ok, detail):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def fit_or_none(t, y, window=None):
    try:
        return fit_exponential_rate(t, y, window)
    except ValueError:
        return None


def clipped(window, t):
    # explicit windows cannot reach the last samples, where the distance to the final state is zero
    return (window[0], min(window[1], t[-4]))


def rescaled_run(k, chi, init, n, steady_tol):
    p = PhysParams.fair(k, chi, frame=Frame.RESCALED)
    return p, evolve(init(n), p, NumParams(dt=1e-3, t_max=20.0, steady_tol=steady_tol))


@pytest.fixture(scope="module")
def point_b():
    return rescaled_run(-0.5, 0.2, lambda n: gaussian_init(0.32, n), 1000, 1e-5)


@pytest.fixture(scope="module")
def point_c():
    return rescaled_run(-0.2, 0.7, lambda n: indicator_init(0.5, n), 200, 1e-5)


# no tolerance is fixed for D and E; the fit window [0.3, 3.5] needs runs that last beyond t = 3.5,
# which a step-distance tolerance of 1e-8 (1e-5 per unit time at dt = 1e-3) provides
@pytest.fixture(scope="module")
def point_d():
    return rescaled_run(0.2, 0.8, lambda n: indicator_init(0.5, n), 100, 1e-8)


@pytest.fixture(scope="module")
def point_e():
    return rescaled_run(0.2, 1.2, lambda n: indicator_init(0.5, n), 100, 1e-8)


def test_criterion_1_phase_map_anchors():
    num = NumParams(dt=1e-3, t_max=10.0, steady_tol=1e-5)
    chi0 = critical_chi_sweep([0.0], np.round(np.arange(0.8, 1.2 + 1e-9, 0.02), 12), num, n=100).chi_c[0.0]
    chi5 = critical_chi_sweep([-0.5], np.round(np.arange(0.30, 0.50 + 1e-9, 0.01), 12), num, n=100).chi_c[-0.5]
    ok = within(chi0, 1.0, 0.1) and abs(chi5 - 0.39) <= 0.05
    assert report(1, ok, f"chi_c(0) = {chi0:g} (1 +- 0.1), chi_c(-0.5) = {chi5:g} (0.39 +- 0.05)")


def test_criterion_2_point_b_rates(point_b):
    _, out = point_b
    tr = out.trajectory
    t = tr.column("t")
    w_fit = fit_or_none(t, wasserstein_to_final(tr))
    e_win = clipped((0.0, 0.9), t)
    e_fit = fit_or_none(t, relative_energy(tr), e_win)
    w = w_fit.slope if w_fit else np.nan
    e = e_fit.slope if e_fit else np.nan
    ok = (out.status is Status.STEADY and within(w, -4.392, 0.25) and within(e, -7.6965, 0.25)
          and w <= -1 and e <= -1)
    detail = (f"status {out.status.value} at t = {out.final_state.time:.3f}; W slope {w:.4f} (-4.392 +- 25%); energy slope {e:.4f} (-7.6965 +- 25%) on "
              f"[{e_win[0]:g}, {e_win[1]:.3f}]; floor slope <= -1")
    assert report(2, ok, detail)


def test_criterion_3_point_c_rate(point_c):
    _, out = point_c
    tr = out.trajectory
    fit = fit_or_none(tr.column("t"), wasserstein_to_final(tr))
    w = fit.slope if fit else np.nan
    ok = within(w, -1.8325, 0.25)
    detail = f"status {out.status.value} at t = {out.final_state.time:.3f}; W slope {w:.4f} (-1.8325 +- 25%)"
    assert report(3, ok, detail)


def test_criterion_4_fast_diffusion(point_d, point_e):
    parts, ok = [], True
    for name, (_, out), target in (("D", point_d, -1.9148), ("E", point_e, -1.9593)):
        tr = out.trajectory
        t = tr.column("t")
        fit = fit_or_none(t, wasserstein_to_final(tr), clipped((0.3, 3.5), t))
        w = fit.slope if fit else np.nan
        ok &= out.status is Status.STEADY and fit is not None and fit.window[1] == 3.5 and within(w, target, 0.25)
        parts.append(f"{name}: {out.status.value} at t = {out.final_state.time:.3f}, W slope {w:.4f} ({target} +- 25%)")
    rho_d = point_d[1].trajectory.column("max_density")[-1]
    rho_e = point_e[1].trajectory.column("max_density")[-1]
    ok &= rho_e > rho_d
    parts.append(f"max density E {rho_e:.4f} > D {rho_d:.4f}")
    assert report(4, ok, "; ".join(parts))


def test_criterion_5_blowup_point_f():
    p = PhysParams.fair(-0.5, 1.0, frame=Frame.ORIGINAL)
    # deeper step-halving budget than the default so the collapse is followed to small gaps
    out = evolve(gaussian_init(0.32, 1000), p, NumParams(dt=1e-3, t_max=10.0, max_halvings=60), keep_states=False)
    e = out.trajectory.column("energy")
    gap = out.trajectory.column("min_gap")[-1]
    ok = out.status is Status.BLOWUP and e[-1] < 0 and e[-1] < -10 and gap < 1e-8
    detail = (f"status {out.status.value} at t = {out.final_state.time:.6f} after {out.halvings} halvings; "
              f"last energy {e[-1]:.3f} (< -10); min gap {gap:.3e} (< 1e-8)")
    assert report(5, ok, detail)


def test_criterion_6_stationary_identities(point_b, point_c, point_d, point_e):
    parts, ok = [], True
    for name, (p, out) in (("B", point_b), ("C", point_c), ("D", point_d), ("E", point_e)):
        if out.status is not Status.STEADY:
            parts.append(f"{name}: no steady state ({out.status.value})")
            continue
        rel = abs(virial_residual(out.final_state, p)) / abs(discrete_energy(out.final_state, p).total)
        ok &= rel <= 1e-2
        parts.append(f"{name}: virial {rel:.2e}")
    p0 = PhysParams(m=1.0, k=0.0, chi=1.0, frame=Frame.ORIGINAL)
    out = evolve(gaussian_init(0.32, 500), p0, NumParams(dt=1e-3, t_max=20.0), keep_states=False)
    parts_k0 = discrete_energy(out.final_state, p0)
    ok &= out.status is Status.STEADY and abs(parts_k0.total) <= 1e-2 * abs(parts_k0.entropy)
    parts.append(f"k=0 critical run {out.status.value}: |F| = {abs(parts_k0.total):.4f} "
                 f"vs 1e-2 |entropy| = {1e-2 * abs(parts_k0.entropy):.4f}")
    assert report(6, ok, "; ".join(parts))


def test_criterion_7_hls_qualitative():
    p = PhysParams(m=4.0 / 3.0, k=-0.5, chi=0.35)
    low = evolve(hls_init(p, 0.4, 500)[0], p, NumParams(dt=1e-2, t_max=10.0), keep_states=False)
    rho_low = low.trajectory.column("max_density")
    ok_low = bool(np.all(np.diff(rho_low) < 0))
    high = evolve(hls_init(p, 1.1, 500)[0], p, NumParams(dt=1e-3, t_max=10.0), keep_states=False)
    rho_high = high.trajectory.column("max_density")
    growth = rho_high.max() / rho_high[0]
    ok_high = high.status is Status.BLOWUP or growth >= 10
    detail = (f"c0 = 0.4c*: {low.status.value}, max density {rho_low[0]:.4f} -> {rho_low[-1]:.4f}, "
              f"monotone decreasing {ok_low}; c0 = 1.1c*: {high.status.value}, max density growth {growth:.1f}x")
    assert report(7, ok_low and ok_high, detail)


def _fd_gradient(x, p, h):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (discrete_energy(x + e, p).total - discrete_energy(x - e, p).total) / (2 * h)
    return g * x.size


def _fd_hessian(x, p, h):
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((discrete_gradient(x + e, p) - discrete_gradient(x - e, p)) / (2 * h))
    return np.column_stack(cols)


def test_criterion_8_property_suites(point_b, point_d, point_e):
    rng = np.random.default_rng(8)
    branches = [PhysParams(m=1.5, k=-0.5, chi=0.7, frame=Frame.RESCALED),
                PhysParams(m=1.0, k=0.4, chi=0.9, frame=Frame.RESCALED),
                PhysParams(m=1.3, k=0.0, chi=0.6),
                PhysParams(m=1.0, k=0.0, chi=0.8, frame=Frame.RESCALED)]
    grad_err = hess_err = 0.0
    for p in branches:
        for _ in range(100):
            x = random_positions(rng, int(rng.integers(2, 15)), rng.uniform(0.5, 2.0))
            h = 1e-6 * np.ptp(x)
            g = discrete_gradient(x, p)
            grad_err = max(grad_err, np.linalg.norm(_fd_gradient(x, p, h) - g) / np.linalg.norm(g))
            H = discrete_hessian(x, p)
            hess_err = max(hess_err, np.linalg.norm(_fd_hessian(x, p, h) - H) / np.linalg.norm(H))

    homog = 0.0
    for _ in range(100):
        k = rng.uniform(-0.9, 0.9)
        p = PhysParams.fair(k, rng.uniform(0.1, 2.0))
        s = ParticleState(random_positions(rng, int(rng.integers(2, 30))))
        lam = rng.uniform(0.2, 5.0)
        e0 = discrete_energy(s, p)
        e1 = discrete_energy(dilate(s, 1 / lam), p).total
        homog = max(homog, abs(e1 - lam**k * e0.total) / max(abs(e0.total), abs(e0.entropy)))

    com = max(np.max(np.abs(out.trajectory.column("com"))) for _, out in (point_b, point_d, point_e))
    rises = 0
    for _, out in (point_b, point_d, point_e):
        e = out.trajectory.column("energy")
        rises += int(np.sum(np.diff(e) > 1e-12 * (1 + np.abs(e[:-1]))))

    h_max = -np.inf
    for _ in range(100):
        p = PhysParams.fair(rng.uniform(-0.95, -0.05), rng.uniform(0.05, 2.0))
        s = ParticleState(random_positions(rng, int(rng.integers(2, 40))))
        shat = dilate(s, np.sqrt(moments(s).second_moment))
        h_max = max(h_max, blowup_functional_h(s, p) / (1e-6 * (1 + dissipation(shat, p))))

    crit = 0.0
    for k in np.linspace(-0.9, 0.9, 7):
        m = 1 - k
        p = PhysParams(m=m, k=k, chi=0.5 ** (m - 2) / 2)
        for gap in (1e-2, 1.0, 50.0):
            x = np.array([-gap / 2, gap / 2])
            crit = max(crit, np.max(np.abs(discrete_gradient(x, p))) / (0.5 ** (m - 1) * gap**-m))
            new, _ = implicit_step(ParticleState(x), p, NumParams(dt=0.1))
            crit = max(crit, np.max(np.abs(new.positions - x)) / gap)

    checks = {
        "gradient-vs-FD": (grad_err, grad_err <= 1e-6),
        "Hessian-vs-FD": (hess_err, hess_err <= 1e-5),
        "homogeneity": (homog, homog <= 1e-12),
        "centre of mass": (com, com <= 1e-8),
        "energy rises": (rises, rises == 0),
        "H / tol_H": (h_max, h_max <= 1.0),
        "two-particle critical": (crit, crit <= 1e-12),
    }
    ok = all(v[1] for v in checks.values())
    detail = ", ".join(f"{name} {value:.2e}" if isinstance(value, float) else f"{name} {value}"
                       for name, (value, _) in checks.items())
    assert report(8, ok, detail)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
