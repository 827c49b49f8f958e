"""Time integration of the particle gradient flow.

The implicit Euler step solves ``Y - X + dt g(Y) = 0`` with a damped Newton
iteration (the optimality system of one minimizing-movement step in the
quantile representation).  :func:`evolve` chains implicit steps, halves the
time step when Newton fails, and classifies the run as converged, blown up, or
timed out.
"""

import enum
import logging
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.linalg

from .energy import _Evaluation, discrete_energy, discrete_gradient
from .model import ParameterError, SingularConfigurationError
from .state import ParticleState, wasserstein

__all__ = [
    "NumParams",
    "Status",
    "NewtonError",
    "OrderingViolated",
    "Trajectory",
    "RunOutcome",
    "implicit_step",
    "explicit_step",
    "evolve",
]

logger = logging.getLogger(__name__)

_MAX_DAMPING = 30


@dataclass(frozen=True)
class NumParams:
    """Numerical settings of a run.

    ``steady_tol`` is compared against the Wasserstein distance between two
    consecutive accepted states, so like the original criterion it depends on
    ``dt``.
    """

    dt: float = 1e-3
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    steady_tol: float = 1e-5
    t_max: float = 10.0
    max_halvings: int = 20
    gap_floor: float = 1e-12
    snapshot_stride: int = 1

    def __post_init__(self):
        for name in ("dt", "newton_tol", "steady_tol", "t_max", "gap_floor"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value}")
        for name in ("newton_max_iter", "max_halvings", "snapshot_stride"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be a positive integer")
        if not self.steady_tol > self.newton_tol:
            raise ParameterError("steady_tol must exceed newton_tol")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return NumParams(**values)


class Status(enum.Enum):
    STEADY = "Steady"
    BLOWUP = "BlowUp"
    TIMEOUT = "Timeout"


class NewtonError(RuntimeError):
    """Implicit step failed; ``reason`` is ``"diverged"`` or ``"singular"``."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class OrderingViolated(RuntimeError):
    """An explicit step would cross particles; reduce ``dt``."""


def _solve(jac, rhs):
    # I + dt H is symmetric and usually positive definite; LU covers the rest
    _, sol, info = scipy.linalg.lapack.dposv(jac, rhs)
    if info == 0:
        return sol
    try:
        return np.linalg.solve(jac, rhs)
    except np.linalg.LinAlgError as err:
        raise NewtonError("singular", f"Newton system is singular: {err}") from None


def _newton(x, params, dt, tol, max_iter, gap_floor):
    """Damped Newton for ``Y - X + dt g(Y) = 0``; returns ``(Y, iterations, evaluation at Y)``.

    The iteration starts from the better (smaller residual) of the previous
    state and the forward Euler predictor.  Convergence is tested in the max
    norm; damping asks for a decrease of the Euclidean norm, for which the
    Newton direction is always a descent direction.
    """
    n = x.size
    y = x.copy()
    ev = _Evaluation(y, params)
    res = dt * ev.gradient()
    if np.max(np.abs(res)) > tol:
        pred = x - res
        if np.min(np.diff(pred)) > gap_floor:
            ev_p = _Evaluation(pred, params)
            res_p = pred - x + dt * ev_p.gradient()
            if np.dot(res_p, res_p) < np.dot(res, res):
                y, ev, res = pred, ev_p, res_p
    res_sq = np.dot(res, res)
    for it in range(max_iter + 1):
        if np.max(np.abs(res)) <= tol:
            return y, it, ev
        if it == max_iter:
            break
        jac = dt * ev.hessian()
        jac[np.diag_indices(n)] += 1.0
        delta = _solve(jac, -res)
        if not np.all(np.isfinite(delta)):
            raise NewtonError("singular", "Newton system produced a non-finite update")
        step = 1.0
        for _ in range(_MAX_DAMPING + 1):
            trial = y + step * delta
            if np.min(np.diff(trial)) > gap_floor:
                ev_t = _Evaluation(trial, params)
                res_t = trial - x + dt * ev_t.gradient()
                sq_t = np.dot(res_t, res_t)
                if sq_t < res_sq:
                    break
            step *= 0.5
        else:
            raise NewtonError("diverged", f"no damped Newton step reduces the residual ({np.sqrt(res_sq):.3e})")
        y, ev, res, res_sq = trial, ev_t, res_t, sq_t
    raise NewtonError("diverged", f"Newton did not converge in {max_iter} iterations (residual {np.max(np.abs(res)):.3e})")


def _implicit(state, params, num, dt):
    try:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            y, iters, ev = _newton(state.positions, params, dt, num.newton_tol,
                                   num.newton_max_iter, num.gap_floor)
    except SingularConfigurationError as err:
        raise NewtonError("singular", str(err)) from None
    return ParticleState(y, state.time + dt), iters, ev


def implicit_step(state, params, num, dt=None):
    """One implicit Euler step.

    Parameters
    ----------
    state : ParticleState
    params : PhysParams
    num : NumParams
    dt : float, optional
        Overrides ``num.dt``.

    Returns
    -------
    new_state : ParticleState
    iterations : int
        Newton iterations used.

    Raises
    ------
    NewtonError
        If the iteration diverges or the linear system degenerates.
    """
    dt = num.dt if dt is None else float(dt)
    new, iters, _ = _implicit(state, params, num, dt)
    return new, iters


def explicit_step(state, params, dt):
    """Forward Euler step ``X - dt g(X)``."""
    y = state.positions - dt * discrete_gradient(state, params)
    if not np.all(np.diff(y) > 0):
        raise OrderingViolated(f"explicit step with dt={dt} crosses particles")
    return ParticleState(y, state.time + dt)


@dataclass
class Trajectory:
    """Diagnostics recorded every ``snapshot_stride`` accepted steps, plus the final state."""

    t: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    interaction: list = field(default_factory=list)
    confinement: list = field(default_factory=list)
    second_moment: list = field(default_factory=list)
    com: list = field(default_factory=list)
    min_gap: list = field(default_factory=list)
    max_density: list = field(default_factory=list)
    step_dist: list = field(default_factory=list)
    states: list = field(default_factory=list)

    COLUMNS = ("t", "energy", "entropy", "interaction", "confinement", "second_moment",
               "com", "min_gap", "max_density", "step_dist")

    def record(self, state, parts, step_dist, keep_state=True):
        x = state.positions
        gaps = np.diff(x)
        self.t.append(state.time)
        self.energy.append(parts.total)
        self.entropy.append(parts.entropy)
        self.interaction.append(parts.interaction)
        self.confinement.append(parts.confinement)
        self.second_moment.append(float(np.dot(x, x) / x.size))
        self.com.append(float(np.mean(x)))
        self.min_gap.append(float(gaps.min()))
        self.max_density.append(float(1.0 / (x.size * gaps.min())))
        self.step_dist.append(float(step_dist))
        if keep_state:
            self.states.append(state)

    def __len__(self):
        return len(self.t)

    def column(self, name):
        return np.asarray(getattr(self, name), dtype=float)

    def as_array(self):
        return np.column_stack([self.column(c) for c in self.COLUMNS])


@dataclass
class RunOutcome:
    status: Status
    final_state: ParticleState
    trajectory: Trajectory
    accepted_steps: int = 0
    halvings: int = 0
    final_dt: float = float("nan")
    message: str = ""


def evolve(s0, params, num, keep_states=True, callback=None):
    """Run implicit steps until steady state, blow-up or ``t_max``.

    Newton failures and energy increases halve ``dt`` and retry from the last
    accepted state; after ``max_halvings`` halvings the run is declared a
    blow-up, as is any accepted state whose minimal gap drops below
    ``gap_floor``.  Steady state is declared when the distance between
    consecutive states, rescaled to the nominal ``dt``, drops below
    ``steady_tol``.

    Parameters
    ----------
    s0 : ParticleState
    params : PhysParams
    num : NumParams
    keep_states : bool
        Store the particle states alongside the recorded diagnostics.
    callback : callable, optional
        Called as ``callback(state, parts)`` after every accepted step.

    Returns
    -------
    RunOutcome
    """
    traj = Trajectory()
    state = s0
    parts = discrete_energy(state, params)
    traj.record(state, parts, np.nan, keep_states)
    dt = num.dt
    halvings = 0
    accepted = 0
    since_record = 0
    # keeps the final time from drifting below t_max by accumulated roundoff
    t_eps = 1e-9 * num.dt

    def finish(status, message=""):
        if since_record:
            traj.record(state, parts, last_dist, keep_states)
        return RunOutcome(status, state, traj, accepted, halvings, dt, message)

    last_dist = np.nan
    while state.time < num.t_max - t_eps:
        step_dt = min(dt, num.t_max - state.time)
        try:
            new, _, ev = _implicit(state, params, num, step_dt)
            new_parts = ev.energy()
        except (NewtonError, SingularConfigurationError, ParameterError) as err:
            reason = str(err)
        else:
            rise = new_parts.total - parts.total
            if rise <= 1e-12 * (1.0 + abs(parts.total)):
                reason = None
            else:
                reason = f"energy increased by {rise:.3e}"
        if reason is not None:
            halvings += 1
            if halvings > num.max_halvings:
                return finish(Status.BLOWUP, f"step failed after {num.max_halvings} halvings: {reason}")
            dt *= 0.5
            logger.debug("t=%.6g: %s; halving dt to %.3e", state.time, reason, dt)
            continue

        last_dist = wasserstein(state, new)
        state, parts = new, new_parts
        accepted += 1
        since_record += 1
        if callback is not None:
            callback(state, parts)

        min_gap = np.min(np.diff(state.positions))
        if min_gap < num.gap_floor:
            return finish(Status.BLOWUP, f"minimal gap {min_gap:.3e} below floor")
        if last_dist * (num.dt / step_dt) < num.steady_tol:
            return finish(Status.STEADY)
        if since_record >= num.snapshot_stride:
            traj.record(state, parts, last_dist, keep_states)
            since_record = 0
    return finish(Status.TIMEOUT)
