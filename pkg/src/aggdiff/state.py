"""Quantile-function particle states.

A probability density on the line is represented by its pseudo-inverse
cumulative distribution function ``X(eta)``, sampled at ``n`` ordered particles
``X_1 < ... < X_n`` that each carry mass ``1/n``.  In this representation the
2-Wasserstein distance is the ``L^2(0, 1)`` distance between quantile functions.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ParameterError

__all__ = [
    "ParticleState",
    "DensityProfile",
    "Moments",
    "midpoints",
    "from_quantile_function",
    "to_density",
    "wasserstein",
    "moments",
    "dilate",
    "translate",
]


def midpoints(n):
    """Mass coordinates ``eta_i = (i - 1/2)/n`` for ``i = 1..n``."""
    return (np.arange(n, dtype=float) + 0.5) / n


@dataclass(frozen=True, eq=False)
class ParticleState:
    """Strictly increasing particle positions with equal mass ``1/n``.

    The positions array is copied and made read-only, so a state can be shared
    freely.
    """

    positions: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        x = np.array(self.positions, dtype=float, copy=True).ravel()
        if x.size < 2:
            raise ParameterError(f"a particle state needs n >= 2 particles, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise ParameterError("particle positions must be finite")
        if not np.all(np.diff(x) > 0):
            raise ParameterError("particle positions must be strictly increasing")
        if not self.time >= 0:
            raise ParameterError(f"time must be non-negative, got {self.time}")
        x.flags.writeable = False
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self):
        return self.positions.size

    @property
    def deta(self):
        """Mass per particle."""
        return 1.0 / self.positions.size

    @property
    def etas(self):
        return midpoints(self.n)

    @property
    def gaps(self):
        return np.diff(self.positions)

    def with_positions(self, positions, time=None):
        return ParticleState(positions, self.time if time is None else time)

    def __eq__(self, other):
        if not isinstance(other, ParticleState):
            return NotImplemented
        return self.time == other.time and np.array_equal(self.positions, other.positions)

    def __repr__(self):
        return f"ParticleState(n={self.n}, time={self.time:g}, span=[{self.positions[0]:.6g}, {self.positions[-1]:.6g}])"


class DensityProfile(NamedTuple):
    """Piecewise-constant density on the ``n - 1`` inter-particle intervals."""

    x: np.ndarray
    rho: np.ndarray


class Moments(NamedTuple):
    center_of_mass: float
    second_moment: float
    lm_norm: float


def from_quantile_function(q, n):
    """Sample a quantile function at the mass midpoints and recentre.

    Parameters
    ----------
    q : callable
        Vectorised, strictly increasing map ``eta -> X(eta)`` on ``(0, 1)``.
    n : int
        Number of particles.

    Returns
    -------
    ParticleState
        Positions ``q(eta_i) - c`` with ``c`` the discrete centre of mass.
    """
    n = int(n)
    if n < 2:
        raise ParameterError(f"need n >= 2 particles, got {n}")
    x = np.asarray(q(midpoints(n)), dtype=float)
    if x.shape != (n,) or not np.all(np.isfinite(x)):
        raise ParameterError("quantile function must return finite values at the midpoints")
    if not np.all(np.diff(x) > 0):
        raise ParameterError("quantile samples are not strictly increasing")
    return ParticleState(x - np.mean(x))


def to_density(state):
    """Density ``deta / (X_{i+1} - X_i)`` at the interval midpoints."""
    x = state.positions
    return DensityProfile(0.5 * (x[1:] + x[:-1]), state.deta / np.diff(x))


def wasserstein(a, b):
    """Discrete 2-Wasserstein distance between two states with the same ``n``."""
    if a.n != b.n:
        raise ParameterError(f"particle counts differ: {a.n} != {b.n}")
    d = a.positions - b.positions
    return float(np.sqrt(a.deta * np.dot(d, d)))


def moments(state, m=1.0):
    """Centre of mass, second moment and ``L^m`` norm of the reconstructed density."""
    x = state.positions
    deta = state.deta
    gaps = np.diff(x)
    rho = deta / gaps
    if m == 0:
        raise ParameterError("L^m norm undefined for m = 0")
    lm = float(np.sum(rho**m * gaps) ** (1.0 / m))
    return Moments(float(deta * np.sum(x)), float(deta * np.dot(x, x)), lm)


def dilate(state, lam):
    """Mass-preserving dilation ``rho_lam(x) = lam rho(lam x)``, i.e. ``X -> X / lam``."""
    if not lam > 0:
        raise ParameterError(f"dilation factor must be positive, got {lam}")
    return state.with_positions(state.positions / lam)


def translate(state, c):
    return state.with_positions(state.positions + c)
