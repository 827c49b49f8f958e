import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from aggdiff.state import ParticleState

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_positions(rng, n, spread=1.0):
    """Ordered, centred positions with gaps drawn from a log-uniform range."""
    gaps = spread * np.exp(rng.uniform(np.log(0.2), np.log(5.0), n - 1)) / n
    x = np.concatenate([[0.0], np.cumsum(gaps)])
    return x - x.mean()


@st.composite
def states(draw, n_min=2, n_max=25):
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**32 - 1))
    spread = draw(st.floats(0.3, 3.0))
    return ParticleState(random_positions(np.random.default_rng(seed), n, spread))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
