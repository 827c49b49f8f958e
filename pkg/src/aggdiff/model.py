"""Model parameters, regime classification and pointwise kernel/entropy values.

The free energy studied here is

.. math::

    F[\\rho] = \\int U_m(\\rho)\\,dx + \\chi \\iint \\rho(x) W_k(x-y) \\rho(y)\\,dx\\,dy
               + \\frac{r}{2} \\int |x|^2 \\rho(x)\\,dx

with :math:`U_m(\\rho) = \\rho^m/(m-1)` (or :math:`\\rho\\log\\rho` for ``m == 1``) and
:math:`W_k(x) = |x|^k/k` (or :math:`\\log|x|` for ``k == 0``).  ``r`` switches on the
quadratic confinement of the self-similar (rescaled) frame.
"""

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParameterError",
    "SingularConfigurationError",
    "Frame",
    "Regime",
    "Case",
    "RegimeInfo",
    "PhysParams",
    "classify_regime",
    "kernel_value",
    "entropy_value",
    "FAIR_COMPETITION_ATOL",
]

# |m + k - 1| below this counts as fair competition (decimal input of m = 1 - k)
FAIR_COMPETITION_ATOL = 1e-12


class ParameterError(ValueError):
    """Raised when a parameter lies outside its admissible domain."""


class SingularConfigurationError(ArithmeticError):
    """Raised when particles coincide (zero gap) and a singular term is evaluated."""


class Frame(enum.IntEnum):
    """Original variables (r=0) or self-similar rescaled variables (r=1)."""

    ORIGINAL = 0
    RESCALED = 1


class Regime(enum.Enum):
    FAIR_COMPETITION = "fair-competition"
    DIFFUSION_DOMINATED = "diffusion-dominated"
    ATTRACTION_DOMINATED = "attraction-dominated"


class Case(enum.Enum):
    POROUS_MEDIUM = "porous-medium"
    LOGARITHMIC = "logarithmic"
    FAST_DIFFUSION = "fast-diffusion"
    NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class RegimeInfo:
    regime: Regime
    case: Case


@dataclass(frozen=True)
class PhysParams:
    """The model triple ``(m, k, chi)`` together with the frame flag.

    Parameters
    ----------
    m : float
        Diffusion exponent, ``m > 0``.
    k : float
        Homogeneity of the interaction kernel, ``-1 < k < 1``.
    chi : float
        Interaction strength, ``chi > 0``.
    frame : Frame
        ``Frame.ORIGINAL`` (r=0) or ``Frame.RESCALED`` (r=1).
    """

    m: float
    k: float
    chi: float
    frame: Frame = Frame.ORIGINAL

    def __post_init__(self):
        m, k, chi = float(self.m), float(self.k), float(self.chi)
        if not np.isfinite([m, k, chi]).all():
            raise ParameterError(f"non-finite parameters m={m}, k={k}, chi={chi}")
        if m <= 0:
            raise ParameterError(f"diffusion exponent must be positive, got m={m}")
        if not -1.0 < k < 1.0:
            raise ParameterError(f"kernel homogeneity must satisfy -1 < k < 1, got k={k}")
        if chi <= 0:
            raise ParameterError(f"interaction strength must be positive, got chi={chi}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "frame", Frame(self.frame))

    @classmethod
    def fair(cls, k, chi, frame=Frame.ORIGINAL):
        """Fair-competition parameters ``m = 1 - k``."""
        return cls(m=1.0 - k, k=k, chi=chi, frame=frame)

    @property
    def r(self):
        return int(self.frame)

    @property
    def log_entropy(self):
        return self.m == 1.0

    @property
    def log_kernel(self):
        return self.k == 0.0

    @property
    def is_fair_competition(self):
        return abs(self.m + self.k - 1.0) <= FAIR_COMPETITION_ATOL

    def replace(self, **changes):
        fields = dict(m=self.m, k=self.k, chi=self.chi, frame=self.frame)
        fields.update(changes)
        return PhysParams(**fields)


def classify_regime(params):
    """Classify ``(m, k)`` into a regime and, for fair competition, a case.

    Parameters
    ----------
    params : PhysParams

    Returns
    -------
    RegimeInfo
    """
    balance = params.m + params.k - 1.0
    if abs(balance) <= FAIR_COMPETITION_ATOL:
        if params.k < 0:
            case = Case.POROUS_MEDIUM
        elif params.k == 0:
            case = Case.LOGARITHMIC
        else:
            case = Case.FAST_DIFFUSION
        return RegimeInfo(Regime.FAIR_COMPETITION, case)
    if balance > 0:
        return RegimeInfo(Regime.DIFFUSION_DOMINATED, Case.NOT_APPLICABLE)
    return RegimeInfo(Regime.ATTRACTION_DOMINATED, Case.NOT_APPLICABLE)


def kernel_value(k, x):
    """Interaction kernel ``W_k(x)``; ``|x|^k / k`` or ``log|x|`` when ``k == 0``.

    ``x == 0`` is singular for ``k <= 0`` and evaluates to 0 for ``k > 0``.
    """
    k = float(k)
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax == 0) and k <= 0:
        raise SingularConfigurationError(f"W_k is singular at x = 0 for k = {k}")
    if k == 0:
        out = np.log(ax)
    else:
        out = ax**k / k
    return out[()] if out.ndim == 0 else out


def entropy_value(m, rho):
    """Entropy density ``U_m(rho)``, with the convention ``0 log 0 = 0``."""
    m = float(m)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ParameterError("entropy density requires rho >= 0")
    if m == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(rho > 0, rho * np.log(np.where(rho > 0, rho, 1.0)), 0.0)
    else:
        out = rho**m / (m - 1.0)
    return out[()] if out.ndim == 0 else out
