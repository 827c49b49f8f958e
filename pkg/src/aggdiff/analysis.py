"""Experiment drivers: rate fits, critical-strength sweeps and self-similar reconstruction."""

import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dynamics import Status, evolve
from .energy import _Evaluation
from .initdata import make_init
from .model import Frame, ParameterError, PhysParams
from .state import ParticleState, wasserstein

__all__ = [
    "RateFit",
    "SweepRecord",
    "SweepResult",
    "fit_exponential_rate",
    "default_window",
    "wasserstein_to_final",
    "relative_energy",
    "critical_chi_sweep",
    "discrete_critical_chi",
    "self_similar_reconstruct",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateFit:
    """Least-squares line ``log y = slope t + intercept`` on a time window."""

    slope: float
    intercept: float
    window: tuple
    residual: float
    samples: int

    def as_record(self):
        return f"{self.slope!r},{self.intercept!r},{self.window[0]!r},{self.window[1]!r},{self.residual!r}"


def default_window(t, y, drop_last=3):
    """Central 80% (in time) of the positive samples, excluding the last few.

    The final samples of a distance-to-final-state series go to zero and
    would dominate a log fit.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.flatnonzero(y > 0)
    if drop_last:
        keep = keep[keep < t.size - drop_last]
    if keep.size < 5:
        raise ParameterError("fewer than 5 positive samples to fit")
    t0, t1 = t[keep[0]], t[keep[-1]]
    span = t1 - t0
    return float(t0 + 0.1 * span), float(t1 - 0.1 * span)


def fit_exponential_rate(t, y, window=None):
    """Fit an exponential rate to a positive series.

    Parameters
    ----------
    t, y : array_like
        Sample times and values.
    window : (float, float), optional
        Inclusive time window; defaults to :func:`default_window`.

    Returns
    -------
    RateFit
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = default_window(t, y)
    t0, t1 = map(float, window)
    if not t0 < t1:
        raise ParameterError(f"empty fit window ({t0}, {t1})")
    inside = (t >= t0) & (t <= t1)
    if np.any(y[inside] <= 0):
        raise ParameterError("non-positive values inside the fit window")
    if inside.sum() < 5:
        raise ParameterError(f"need at least 5 samples in the window, got {inside.sum()}")
    tt, ly = t[inside], np.log(y[inside])
    (slope, intercept), *_ = np.linalg.lstsq(np.column_stack([tt, np.ones_like(tt)]), ly, rcond=None)
    rms = float(np.sqrt(np.mean((ly - (slope * tt + intercept)) ** 2)))
    return RateFit(float(slope), float(intercept), (t0, t1), rms, int(inside.sum()))


def wasserstein_to_final(trajectory):
    """Distance of every recorded state to the last recorded one."""
    final = trajectory.states[-1]
    return np.array([wasserstein(s, final) for s in trajectory.states])


def relative_energy(trajectory):
    """``|E(t) - E(final)|`` along a trajectory."""
    e = trajectory.column("energy")
    return np.abs(e - e[-1])


@dataclass(frozen=True)
class SweepRecord:
    k: float
    chi: float
    status: Status
    final_time: float
    final_energy: float


@dataclass
class SweepResult:
    """Outcome grid of a ``(k, chi)`` sweep and the per-``k`` critical strengths.

    ``chi_c`` holds the largest steady ``chi`` per ``k`` (NaN if none); the
    optimal-constant estimate is ``1 / chi_c``.
    """

    grid: list
    chi_c: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def chi_c_rows(self):
        return [(k, c, 1.0 / c if np.isfinite(c) else np.nan) for k, c in sorted(self.chi_c.items())]

    def column(self, k):
        return [r for r in self.grid if r.k == k]


def _run_point(k, chi, m_of_k, frame, num, init, n, s0=None):
    params = PhysParams(m=m_of_k(k), k=k, chi=chi, frame=frame)
    if s0 is None:
        s0 = make_init(init, n, params)
    out = evolve(s0, params, num, keep_states=False)
    rec = SweepRecord(k, chi, out.status, out.final_state.time, out.trajectory.energy[-1])
    return rec, out


def _sweep_one(args):
    return _run_point(*args)[0]


def _sweep_warm(args):
    # one chi, ascending k; each run starts from the previous k's steady state
    k_grid, chi, m_of_k, frame, num, init, n = args
    records, start = [], None
    for k in k_grid:
        rec, out = _run_point(k, chi, m_of_k, frame, num, init, n, start)
        records.append(rec)
        start = ParticleState(out.final_state.positions) if out.status is Status.STEADY else None
    return records


def _fair_m(k):
    return 1.0 - k


def critical_chi_sweep(k_grid, chi_grid, num, init="gaussian:0.32", n=100,
                       frame=Frame.RESCALED, jobs=1, m_of_k=_fair_m, warm=False):
    """Run :func:`evolve` on every ``(k, chi)`` pair and extract ``chi_c(k)``.

    Parameters
    ----------
    k_grid, chi_grid : sequence of float
        Ascending grids.
    num : NumParams
    init : str
        Initial condition descriptor understood by :func:`make_init`.
    n : int
        Particle count.
    frame : Frame
    jobs : int
        Worker processes; results do not depend on it.
    m_of_k : callable
        Diffusion exponent for each ``k``; fair competition by default.
    warm : bool
        Cold start (``init``) for every run if false.  If true, each run at
        fixed ``chi`` starts from the steady state of the previous ``k``,
        falling back to ``init`` after a non-steady outcome.

    Returns
    -------
    SweepResult
    """
    k_grid = [float(k) for k in k_grid]
    chi_grid = [float(c) for c in chi_grid]
    if not k_grid or not chi_grid:
        raise ParameterError("sweep grids must be non-empty")
    if np.any(np.diff(k_grid) <= 0) or np.any(np.diff(chi_grid) <= 0):
        raise ParameterError("sweep grids must be strictly ascending")
    if jobs is None or jobs <= 0:
        jobs = os.cpu_count() or 1
    if warm:
        tasks = [(k_grid, c, m_of_k, frame, num, init, n) for c in chi_grid]
        worker = _sweep_warm
    else:
        tasks = [(k, c, m_of_k, frame, num, init, n) for k in k_grid for c in chi_grid]
        worker = _sweep_one
    if jobs == 1:
        chunks = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(worker, tasks))
    records = [r for chunk in chunks for r in chunk] if warm else chunks
    records.sort(key=lambda r: (r.k, r.chi))

    result = SweepResult(records)
    for k in k_grid:
        column = result.column(k)
        steady = [r.chi for r in column if r.status is Status.STEADY]
        result.chi_c[k] = max(steady) if steady else float("nan")
        if k < 0:
            blown = [r.chi for r in column if r.status is Status.BLOWUP]
            if blown and steady and max(steady) > min(blown):
                msg = f"non-monotone outcome at k={k}: steady at chi={max(steady)} above blow-up at chi={min(blown)}"
                result.warnings.append(msg)
                warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return result


def discrete_critical_chi(k, n, x0=None):
    """Critical strength of the ``n``-particle porous-medium system in original variables.

    For ``m = 1 - k`` and ``-1 < k < 0`` the entropy ``E`` and interaction
    ``I`` (per unit ``chi``) are both homogeneous of degree ``k``, so the
    energy ``E + chi I`` is bounded below by zero exactly when
    ``chi <= min E / (-I)``.  The minimiser is a stationary state at that
    ``chi``.

    Returns
    -------
    chi_c : float
    state : ParticleState
        Minimiser rescaled to unit second moment.
    """
    if not -1.0 < k < 0.0:
        raise ParameterError("discrete critical strength needs -1 < k < 0")
    params = PhysParams.fair(k, 1.0)
    if x0 is None:
        from .initdata import indicator_init
        x0 = indicator_init(1.0, n).positions

    def unpack(z):
        # positions from log-gaps, centred; the ratio is translation and scale invariant
        gaps = np.exp(z)
        x = np.concatenate([[0.0], np.cumsum(gaps)])
        return x - x.mean()

    def ratio(z):
        parts = _Evaluation(unpack(z), params).energy()
        return parts.entropy / -parts.interaction

    z0 = np.log(np.diff(x0))
    sol = optimize.minimize(ratio, z0, method="L-BFGS-B", options={"maxiter": 20000, "ftol": 1e-15, "gtol": 1e-12})
    x = unpack(sol.x)
    x /= np.sqrt(np.dot(x, x) / n)
    return float(sol.fun), ParticleState(x)


def self_similar_reconstruct(u, k, t):
    """Original-variable state at time ``t`` from a rescaled-frame profile ``u``.

    The density is ``s^(-1) u(x / s)`` with ``s = ((2 - k) t + 1)^(1/(2 - k))``,
    i.e. positions ``X_i s``.
    """
    if k == 2:
        raise ParameterError("k = 2 uses a different time change")
    if t < 0:
        raise ParameterError("reconstruction time must be non-negative")
    scale = ((2.0 - k) * t + 1.0) ** (1.0 / (2.0 - k))
    return ParticleState(u.positions * scale, t)
