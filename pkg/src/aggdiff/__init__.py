"""Particle simulations of one-dimensional aggregation-diffusion gradient flows.

Densities are stored as ordered particle positions (samples of the quantile
function) and advanced with implicit Euler steps in the Wasserstein metric.
"""

from .analysis import (critical_chi_sweep, discrete_critical_chi, fit_exponential_rate, relative_energy,
                       self_similar_reconstruct, wasserstein_to_final)
from .dynamics import NumParams, RunOutcome, Status, Trajectory, evolve, explicit_step, implicit_step
from .energy import (blowup_functional_h, discrete_energy, discrete_gradient, discrete_hessian, dissipation,
                     second_moment_rate, virial_residual)
from .initdata import cauchy_init, gaussian_init, hls_constant, hls_init, indicator_init, make_init
from .model import Frame, ParameterError, PhysParams, SingularConfigurationError, classify_regime
from .state import ParticleState, dilate, moments, to_density, translate, wasserstein

__version__ = "0.1.0"

__all__ = [
    "Frame", "ParameterError", "PhysParams", "SingularConfigurationError", "classify_regime",
    "ParticleState", "dilate", "moments", "to_density", "translate", "wasserstein",
    "blowup_functional_h", "discrete_energy", "discrete_gradient", "discrete_hessian", "dissipation",
    "second_moment_rate", "virial_residual",
    "NumParams", "RunOutcome", "Status", "Trajectory", "evolve", "explicit_step", "implicit_step",
    "cauchy_init", "gaussian_init", "hls_constant", "hls_init", "indicator_init", "make_init",
    "critical_chi_sweep", "discrete_critical_chi", "fit_exponential_rate", "relative_energy",
    "self_similar_reconstruct", "wasserstein_to_final",
]
