import numpy as np
import pytest
from hypothesis import given, strategies as st

from aggdiff.model import ParameterError
from aggdiff.state import (ParticleState, dilate, from_quantile_function, midpoints, moments, to_density,
                           translate, wasserstein)

from conftest import states


def test_midpoints():
    assert np.allclose(midpoints(4), [0.125, 0.375, 0.625, 0.875])


def test_state_validation():
    with pytest.raises(ParameterError):
        ParticleState([0.0])
    with pytest.raises(ParameterError):
        ParticleState([0.0, 0.0])
    with pytest.raises(ParameterError):
        ParticleState([1.0, 0.0])
    with pytest.raises(ParameterError):
        ParticleState([0.0, np.inf])
    with pytest.raises(ParameterError):
        ParticleState([0.0, 1.0], time=-1.0)


def test_state_is_immutable_copy():
    x = np.array([-1.0, 1.0])
    s = ParticleState(x)
    x[0] = -5.0
    assert s.positions[0] == -1.0
    with pytest.raises(ValueError):
        s.positions[0] = 3.0
    assert s.deta * s.n == 1.0


def test_from_quantile_function_uniform():
    s = from_quantile_function(lambda e: 2 * e - 1, 2)
    assert np.allclose(s.positions, [-0.5, 0.5])


def test_from_quantile_function_cauchy():
    s = from_quantile_function(lambda e: np.tan(np.pi * (e - 0.5)), 4)
    t1, t3 = np.tan(np.pi / 8), np.tan(3 * np.pi / 8)
    assert np.allclose(s.positions, [-t3, -t1, t1, t3], atol=1e-14)


def test_from_quantile_function_recentres_and_rejects():
    s = from_quantile_function(lambda e: np.exp(3 * e), 7)
    assert abs(s.positions.sum()) < 1e-13
    with pytest.raises(ParameterError):
        from_quantile_function(lambda e: -e, 5)


def test_to_density_examples():
    d = to_density(ParticleState([-0.5, 0.5]))
    assert np.allclose(d.x, [0.0]) and np.allclose(d.rho, [0.5])
    d = to_density(ParticleState([-1.0, 0.0, 2.0]))
    assert np.allclose(d.x, [-0.5, 1.0]) and np.allclose(d.rho, [1 / 3, 1 / 6])
    R = 0.7
    d = to_density(ParticleState(R * (2 * midpoints(50) - 1)))
    assert np.allclose(d.rho, 1 / (2 * R))


@given(states())
def test_density_mass_is_interval_mass(s):
    d = to_density(s)
    # piecewise-constant mass carried between the first and last particle
    assert np.sum(d.rho * s.gaps) == pytest.approx(1.0 - s.deta, rel=1e-13)


def test_wasserstein_examples():
    a = ParticleState([-0.5, 0.5])
    assert wasserstein(a, a) == 0.0
    assert wasserstein(a, translate(a, 0.3)) == pytest.approx(0.3, abs=1e-15)
    lam = 2.5
    v = moments(a).second_moment
    assert wasserstein(a, dilate(a, lam)) == pytest.approx(abs(1 - 1 / lam) * np.sqrt(v))
    with pytest.raises(ParameterError):
        wasserstein(a, ParticleState([0.0, 1.0, 2.0]))


@given(states(n_min=3, n_max=3), st.integers(0, 2**31), st.floats(-5, 5))
def test_wasserstein_metric_axioms(a, seed, c):
    rng = np.random.default_rng(seed)
    b = ParticleState(np.sort(a.positions + rng.normal(size=3)) + np.arange(3) * 1e-3)
    cc = ParticleState(np.sort(rng.normal(size=3)) + np.arange(3) * 1e-3)
    assert wasserstein(a, b) == wasserstein(b, a)
    assert wasserstein(a, cc) <= wasserstein(a, b) + wasserstein(b, cc) + 1e-12
    assert wasserstein(a, translate(a, c)) == pytest.approx(abs(c), rel=1e-12, abs=1e-12)


def test_moments_examples():
    mo = moments(ParticleState([-0.5, 0.5]), m=1.5)
    assert mo.center_of_mass == 0.0 and mo.second_moment == 0.25
    R = 3.0
    assert moments(ParticleState([-R / 2, R / 2])).second_moment == pytest.approx(R**2 / 4)


@given(states())
def test_l1_norm_is_interval_mass(s):
    assert moments(s, m=1.0).lm_norm == pytest.approx(1.0 - s.deta, rel=1e-13)


def test_dilate_examples():
    s = ParticleState([-0.5, 0.5])
    assert dilate(s, 1.0) == s
    assert np.allclose(dilate(s, 2.0).positions, [-0.25, 0.25])
    with pytest.raises(ParameterError):
        dilate(s, 0.0)


@given(states(), st.floats(0.1, 10))
def test_dilate_second_moment(s, lam):
    v = moments(s).second_moment
    assert moments(dilate(s, lam)).second_moment * lam**2 == pytest.approx(v, rel=1e-13)
    assert np.all(np.diff(dilate(s, lam).positions) > 0)
