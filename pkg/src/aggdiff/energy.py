"""Discrete free energy of a particle state, its metric gradient and Hessian.

With gaps ``d_i = X_{i+1} - X_i`` and ``deta = 1/n`` the discrete energy is::

    G = deta^m/(m-1) sum_i d_i^(1-m)                (entropy, m != 1)
        - deta sum_i log(d_i / deta)                (entropy, m == 1)
      + chi deta^2 sum_{i != j} |X_i - X_j|^k / k   (interaction, k != 0)
      + chi deta^2 sum_{i != j} log|X_i - X_j|      (interaction, k == 0)
      + r deta/2 sum_i X_i^2                        (confinement)

The particle flow is ``dX/dt = -g(X)`` with ``g = grad(G) / deta``, the gradient
in the ``deta``-weighted ``L^2`` metric.  A single formula covers every branch::

    g_i = deta^(m-1) (d_i^-m - d_{i-1}^-m)
          + 2 chi deta sum_{j != i} sign(X_i - X_j) |X_i - X_j|^(k-1)
          + r X_i

where the missing neighbour gaps at both ends are taken as infinite.
"""

from dataclasses import dataclass

import numpy as np

from .model import ParameterError, SingularConfigurationError
from .state import ParticleState, dilate

__all__ = [
    "EnergyBreakdown",
    "discrete_energy",
    "discrete_gradient",
    "discrete_hessian",
    "gradient_and_hessian",
    "dissipation",
    "virial_residual",
    "second_moment_rate",
    "blowup_functional_h",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    entropy: float
    interaction: float
    confinement: float

    @property
    def total(self):
        return self.entropy + self.interaction + self.confinement


def _positions(state):
    if isinstance(state, ParticleState):
        return state.positions
    x = np.asarray(state, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ParameterError("positions must be a 1-d array with at least two entries")
    return x


def _gaps(x):
    d = np.diff(x)
    if np.any(d <= 0):
        raise SingularConfigurationError("particles coincide or are out of order")
    return d


class _Evaluation:
    """Pairwise terms of one configuration, shared by energy, gradient and Hessian."""

    def __init__(self, x, params):
        self.x = x
        self.params = params
        self.n = x.size
        self.deta = 1.0 / self.n
        self.gaps = _gaps(x)
        diff = x[:, None] - x[None, :]
        adiff = np.abs(diff)
        np.fill_diagonal(adiff, 1.0)
        # |X_i - X_j|^(k-2); gradient and Hessian entries are products of it
        p = adiff ** (params.k - 2.0)
        np.fill_diagonal(p, 0.0)
        self.diff, self.adiff, self.pk2 = diff, adiff, p
        self._g = None

    def energy(self):
        prm, x, deta, d = self.params, self.x, self.deta, self.gaps
        m, k = prm.m, prm.k
        if prm.log_entropy:
            entropy = -deta * np.sum(np.log(d / deta))
        else:
            entropy = deta**m / (m - 1.0) * np.sum(d ** (1.0 - m))
        if prm.log_kernel:
            pair_sum = np.sum(np.log(self.adiff))
        else:
            pair_sum = np.sum(self.pk2 * self.adiff**2) / k
        # pair_sum runs over ordered pairs i != j, as in the definition
        interaction = prm.chi * deta**2 * pair_sum
        confinement = prm.r * 0.5 * deta * np.dot(x, x)
        return EnergyBreakdown(float(entropy), float(interaction), float(confinement))

    def gradient(self):
        if self._g is None:
            prm, deta = self.params, self.deta
            flux = _diffusive_flux(self.gaps, deta, prm.m)
            g = np.zeros(self.n)
            g[:-1] += flux
            g[1:] -= flux
            g += 2.0 * prm.chi * deta * np.sum(self.diff * self.pk2, axis=1)
            g += prm.r * self.x
            self._g = g
        return self._g

    def hessian(self):
        prm, deta, n = self.params, self.deta, self.n
        h = (2.0 * prm.chi * deta * (1.0 - prm.k)) * self.pk2
        h[np.diag_indices(n)] = -np.sum(h, axis=1) + prm.r
        a = prm.m * deta ** (prm.m - 1.0) * self.gaps ** (-prm.m - 1.0)
        idx = np.arange(n - 1)
        h[idx, idx] += a
        h[idx + 1, idx + 1] += a
        h[idx, idx + 1] -= a
        h[idx + 1, idx] -= a
        return h


def discrete_energy(state, params):
    """Discrete free energy split into its three contributions.

    Parameters
    ----------
    state : ParticleState or array_like
    params : PhysParams

    Returns
    -------
    EnergyBreakdown
    """
    return _Evaluation(_positions(state), params).energy()


def _diffusive_flux(d, deta, m):
    # deta^(m-1) d^-m; at m == 1 this is 1/d, the log-entropy derivative
    return deta ** (m - 1.0) * d ** (-m)


def discrete_gradient(state, params):
    """Metric gradient ``g`` such that the particle flow reads ``dX/dt = -g``."""
    return _Evaluation(_positions(state), params).gradient()


def discrete_hessian(state, params):
    """Jacobian ``dg/dX`` (symmetric, dense)."""
    return _Evaluation(_positions(state), params).hessian()


def gradient_and_hessian(state, params):
    """Both ``g`` and ``dg/dX`` from a single pass over the particle pairs."""
    ev = _Evaluation(_positions(state), params)
    return ev.gradient(), ev.hessian()


def dissipation(state, params):
    """Discrete dissipation ``deta * sum g_i^2``."""
    g = discrete_gradient(state, params)
    return float(np.dot(g, g) / g.size)


def _require_fair(params):
    if not params.is_fair_competition:
        raise ParameterError(f"identity holds only for m = 1 - k, got m={params.m}, k={params.k}")


def virial_residual(state, params):
    """``F_resc - (1/2 - 1/k) V``; vanishes at stationary states of the rescaled flow.

    Requires fair-competition parameters in the rescaled frame with ``k != 0``.
    """
    _require_fair(params)
    if params.r != 1:
        raise ParameterError("virial identity is stated in the rescaled frame")
    if params.log_kernel:
        raise ParameterError("virial identity is not defined for k = 0")
    x = _positions(state)
    total = discrete_energy(x, params).total
    v = np.dot(x, x) / x.size
    return float(total - (0.5 - 1.0 / params.k) * v)


def second_moment_rate(state, params):
    """Both sides of ``dV/dt = 2 (m - 1) F`` evaluated along the particle flow.

    Returns
    -------
    lhs : float
        ``2 deta sum X_i dX_i/dt`` computed from the particle velocities.
    rhs : float
        ``2 (m - 1)`` times the discrete energy.
    """
    _require_fair(params)
    if params.r != 0:
        raise ParameterError("second-moment law is stated in original variables")
    x = _positions(state)
    g = discrete_gradient(x, params)
    lhs = -2.0 * np.dot(x, g) / x.size
    rhs = 2.0 * (params.m - 1.0) * discrete_energy(x, params).total
    return float(lhs), float(rhs)


def blowup_functional_h(state, params):
    """Zero-homogeneous functional ``H = -D[s] + (m-1)^2 F[s]^2`` at unit second moment.

    The state is first dilated to unit second moment; ``D`` is the discrete
    dissipation and ``F`` the energy in original variables.  ``H <= 0`` always,
    with equality exactly at stationary states.
    """
    _require_fair(params)
    if params.k >= 0:
        raise ParameterError("H is defined for the porous-medium case k < 0")
    x = _positions(state)
    v = np.dot(x, x) / x.size
    if not v > 0:
        raise ParameterError("degenerate state with zero second moment")
    xhat = dilate(ParticleState(x), np.sqrt(v)).positions
    p0 = params.replace(frame=0)
    g = discrete_gradient(xhat, p0)
    d = np.dot(g, g) / xhat.size
    f = discrete_energy(xhat, p0).total
    return float(-d + (params.m - 1.0) ** 2 * f**2)
