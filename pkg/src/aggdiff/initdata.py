"""Initial conditions expressed as quantile samples.

All generators sample at the mass midpoints ``eta_i = (i - 1/2)/n`` so that
heavy-tailed profiles (Cauchy, HLS optimisers) give finite positions.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .model import ParameterError
from .state import ParticleState, midpoints

__all__ = [
    "HlsProfile",
    "gaussian_init",
    "indicator_init",
    "cauchy_init",
    "hls_constant",
    "hls_profile",
    "hls_init",
    "make_init",
]


def _symmetric(half_quantile, n):
    """Assemble a symmetric quantile sample from its values on ``eta < 1/2``."""
    eta = midpoints(n)
    lower = eta < 0.5
    left = half_quantile(eta[lower])
    x = np.empty(n)
    x[: left.size] = left
    x[n - left.size:] = -left[::-1]
    if n % 2:
        x[n // 2] = 0.0
    return x


def gaussian_init(variance, n):
    """Centred Gaussian of the given variance."""
    if not variance > 0:
        raise ParameterError(f"variance must be positive, got {variance}")
    sigma = float(np.sqrt(variance))
    return ParticleState(_symmetric(lambda eta: sigma * special.ndtri(eta), int(n)))


def indicator_init(radius, n):
    """Uniform density on ``[-R, R]``."""
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    return ParticleState(radius * (2.0 * midpoints(int(n)) - 1.0))


def cauchy_init(lam, n):
    """Dilation ``lam rho0(lam x)`` of the Cauchy density ``1 / (pi (1 + x^2))``."""
    if not lam > 0:
        raise ParameterError(f"dilation must be positive, got {lam}")
    return ParticleState(_symmetric(lambda eta: np.tan(np.pi * (eta - 0.5)) / lam, int(n)))


@dataclass(frozen=True)
class HlsProfile:
    """Constants of the optimiser family ``c (lam / (lam^2 + x^2))^(1/m)`` (one dimension).

    ``c0`` and ``lambda0`` are the amplitude and scale actually used for the
    initial datum; ``c0 = c_scale * c_star`` and ``lambda0`` restores unit mass.
    """

    C_HLS: float
    c_star: float
    lambda_star: float
    c_scale: float
    c0: float
    lambda0: float


def hls_constant(k, dim=1):
    """Optimal HLS constant for ``p = q = 2 dim / (2 dim + k)``."""
    N = dim
    return float(
        np.pi ** (-k / 2.0)
        * special.gamma((N + k) / 2.0) / special.gamma(N + k / 2.0)
        * (special.gamma(N / 2.0) / special.gamma(N)) ** (-(N + k) / N)
    )


def _cos_power_integral(k, theta):
    """``int_0^theta cos(s)^k ds`` for ``-1 < k < 0`` (integrable endpoint singularity at pi/2)."""
    half_pi = 0.5 * np.pi
    theta = min(float(theta), half_pi)
    if theta <= 0.25 * np.pi:
        val, _ = integrate.quad(lambda s: np.cos(s) ** k, 0.0, theta, epsabs=1e-14, epsrel=1e-13)
        return val
    return _cos_power_integral(k, 0.25 * np.pi) + _cos_power_tail(k, 0.25 * np.pi) - _cos_power_tail(k, theta)


def _cos_power_tail(k, theta):
    """``int_theta^(pi/2) cos(s)^k ds`` with the algebraic weight ``(pi/2 - s)^k`` split off."""
    half_pi = 0.5 * np.pi
    if theta >= half_pi:
        return 0.0

    def smooth(s):
        u = half_pi - s
        # cos(s) / (pi/2 - s) = sin(u) / u -> 1 as u -> 0
        return (np.sinc(u / np.pi)) ** k

    val, _ = integrate.quad(smooth, theta, half_pi, weight="alg", wvar=(0.0, k), epsabs=1e-14, epsrel=1e-13)
    return val


def _unit_mass(c, k):
    # int c (1 + x^2)^(-1/m) dx with x = tan(s): (1 + x^2)^(-1/m) dx = cos(s)^(2/m - 2) ds = cos(s)^k ds
    return 2.0 * c * _cos_power_integral(k, 0.5 * np.pi)


def _check_conformal(params):
    k, m = params.k, params.m
    if not -1.0 < k < 0.0:
        raise ParameterError(f"HLS optimisers need -1 < k < 0, got k={k}")
    if abs(m - 2.0 / (2.0 + k)) > 1e-12:
        raise ParameterError(f"HLS optimisers need m = 2/(2+k) = {2.0 / (2.0 + k)!r}, got m={m}")


def hls_profile(params, c_scale=1.0):
    """Compute ``C_HLS``, ``c*``, ``lambda*`` and the unit-mass scale for ``c0 = c_scale c*``."""
    _check_conformal(params)
    if not c_scale > 0:
        raise ParameterError(f"c_scale must be positive, got {c_scale}")
    k, m, chi = params.k, params.m, params.chi
    C = hls_constant(k)
    # (2^(1-N) pi^((N+1)/2) / Gamma((N+1)/2))^(-1/m) = pi^(-1/m) at N = 1
    c_star = np.pi ** (-1.0 / m) * (chi * C) ** (1.0 / (m - 2.0))
    lambda_star = _unit_mass(c_star, k) ** (2.0 / k)
    c0 = c_scale * c_star
    lambda0 = _unit_mass(c0, k) ** (2.0 / k)
    return HlsProfile(C, float(c_star), float(lambda_star), float(c_scale), float(c0), float(lambda0))


def hls_init(params, c_scale=1.0, n=100):
    """Quantile samples of the unit-mass HLS optimiser with amplitude ``c_scale c*``.

    The CDF is written in the angle variable ``x = lambda0 tan(s)``, where the
    density becomes ``cos(s)^k`` up to a constant, and computed by adaptive
    quadrature; quantiles follow by bracketed root finding in ``s``.

    Returns
    -------
    state : ParticleState
    profile : HlsProfile
    """
    prof = hls_profile(params, c_scale)
    k = params.k
    half_total = _cos_power_integral(k, 0.5 * np.pi)

    def half(eta):
        out = np.empty(eta.size)
        for i, e in enumerate(eta):
            # mass on (x, 0) for x = -lambda0 tan(s) is (1/2) I(s) / I(pi/2)
            target = (0.5 - e) * 2.0 * half_total
            s = optimize.brentq(lambda t: _cos_power_integral(k, t) - target, 0.0, 0.5 * np.pi,
                                xtol=1e-15, rtol=4 * np.finfo(float).eps)
            out[i] = -prof.lambda0 * np.tan(s)
        return out

    state = ParticleState(_symmetric(half, int(n)))
    return state, prof


def make_init(descriptor, n, params=None):
    """Build an initial state from a ``kind:value`` string.

    ``gaussian:<variance>``, ``indicator:<R>``, ``cauchy:<lambda>`` or
    ``hls:<c_scale>`` (the last needs ``params``).
    """
    kind, _, value = descriptor.partition(":")
    kind = kind.strip().lower()
    try:
        arg = float(value) if value else None
    except ValueError:
        raise ParameterError(f"bad init argument in {descriptor!r}") from None
    if kind == "gaussian":
        return gaussian_init(0.32 if arg is None else arg, n)
    if kind == "indicator":
        return indicator_init(0.5 if arg is None else arg, n)
    if kind == "cauchy":
        return cauchy_init(1.0 if arg is None else arg, n)
    if kind == "hls":
        if params is None:
            raise ParameterError("hls initial data needs model parameters")
        return hls_init(params, 1.0 if arg is None else arg, n)[0]
    raise ParameterError(f"unknown initial condition {descriptor!r}")
