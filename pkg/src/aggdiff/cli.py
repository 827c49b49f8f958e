"""Command-line entry point: ``aggdiff {evolve,sweep,rate,reconstruct} ...``.

Each command validates its parameters, runs, and writes CSV files plus a
``config_echo.txt`` into ``--out``.  Passing ``--config <config_echo.txt>``
re-runs with the recorded settings; flags given explicitly still win.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .analysis import (critical_chi_sweep, fit_exponential_rate, relative_energy,
                       self_similar_reconstruct, wasserstein_to_final)
from .dynamics import NumParams, evolve
from .initdata import make_init
from .model import Frame, ParameterError, PhysParams, SingularConfigurationError

__all__ = ["main", "build_parser", "parse_grid"]

logger = logging.getLogger("aggdiff")

_NUM_FLAGS = {
    "dt": "dt",
    "tmax": "t_max",
    "steady_tol": "steady_tol",
    "newton_tol": "newton_tol",
    "max_halvings": "max_halvings",
    "snapshot_stride": "snapshot_stride",
}


def parse_grid(text):
    """``min:max:step`` with both endpoints included, or a comma-separated list."""
    text = text.strip()
    if ":" not in text:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ParameterError(f"bad grid {text!r}") from None
        if not values:
            raise ParameterError("empty grid")
        return values
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ParameterError(f"grid must be min:max:step, got {text!r}") from None
    if not step > 0 or hi < lo:
        raise ParameterError(f"grid needs step > 0 and max >= min, got {text!r}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    # round away the float noise of lo + i*step so 0.01-step grids print cleanly
    return [float(np.round(lo + i * step, 12)) for i in range(count)]


def _add_model(p, require_k=True):
    p.add_argument("--m", type=float, default=None, help="diffusion exponent (default 1 - k)")
    p.add_argument("--k", type=float, required=require_k, default=None, help="interaction exponent")
    p.add_argument("--chi", type=float, default=None, help="interaction strength")
    frame = p.add_mutually_exclusive_group()
    frame.add_argument("--rescaled", dest="frame", action="store_const", const="rescaled")
    frame.add_argument("--original", dest="frame", action="store_const", const="original")
    p.set_defaults(frame="rescaled")


def _add_num(p):
    d = NumParams()
    p.add_argument("--n", type=int, default=100, help="particle count")
    p.add_argument("--dt", type=float, default=d.dt)
    p.add_argument("--tmax", type=float, default=d.t_max)
    p.add_argument("--steady-tol", type=float, default=d.steady_tol)
    p.add_argument("--newton-tol", type=float, default=d.newton_tol)
    p.add_argument("--max-halvings", type=int, default=d.max_halvings)
    p.add_argument("--snapshot-stride", type=int, default=d.snapshot_stride)
    p.add_argument("--init", default="gaussian:0.32", help="gaussian:<var> | indicator:<R> | cauchy:<lam> | hls:<c_scale>")


def _common(p):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", default=None, help="config_echo.txt of a previous run")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="aggdiff", description="Particle simulations of 1-d aggregation-diffusion gradient flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run one simulation")
    _add_model(p)
    _add_num(p)
    _common(p)

    p = sub.add_parser("sweep", help="(k, chi) outcome map and critical strengths")
    p.add_argument("--k-grid", required=True)
    p.add_argument("--chi-grid", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--warm", action="store_true", help="start each k from the previous k's steady state")
    frame = p.add_mutually_exclusive_group()
    frame.add_argument("--rescaled", dest="frame", action="store_const", const="rescaled")
    frame.add_argument("--original", dest="frame", action="store_const", const="original")
    p.set_defaults(frame="rescaled")
    _add_num(p)
    _common(p)

    p = sub.add_parser("rate", help="fit an exponential rate to a timeseries column")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--column", default="wasserstein_to_final")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    _common(p)

    p = sub.add_parser("reconstruct", help="self-similar solution from a rescaled steady snapshot")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--time", type=float, required=True, help="original-variable time t")
    _common(p)
    return parser


def _glue_values(argv):
    # grids such as -0.99:0:0.01 start with '-' and would be taken for flags
    out, it = [], iter(argv)
    for a in it:
        if a in _GLUED:
            out.append(f"{a}={next(it, '')}")
        else:
            out.append(a)
    return out


_GLUED = ("--k-grid", "--chi-grid")


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _parse(argv):
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    path = _config_path(argv)
    if path is None:
        return parser.parse_args(argv)
    settings = io.read_config_echo(path)
    command = settings.get("command")
    sub = parser._subparsers._group_actions[0].choices.get(command)
    if sub is None:
        raise ParameterError(f"{path}: unknown command {command!r}")
    if argv and argv[0] in parser._subparsers._group_actions[0].choices and argv[0] != command:
        raise ParameterError(f"{path} belongs to command {command!r}, not {argv[0]!r}")
    # recorded settings become defaults; flags on the command line still override
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in settings.items():
        if key in ("command", "out", "config"):
            continue
        action = known.get(key)
        if action is None:
            raise ParameterError(f"{path}: unknown setting {key!r}")
        if value == "None":
            defaults[key] = None
        elif isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value == "True"
        elif action.type is not None:
            defaults[key] = action.type(value)
        else:
            defaults[key] = value
    for action in sub._actions:
        if action.dest in defaults:
            action.required = False
    sub.set_defaults(**defaults)
    if not argv or argv[0] != command:
        argv = [command] + argv
    return parser.parse_args(argv)


def _phys(args):
    if args.chi is None:
        raise ParameterError("--chi is required")
    m = 1.0 - args.k if args.m is None else args.m
    return PhysParams(m=m, k=args.k, chi=args.chi, frame=_frame(args))


def _frame(args):
    return Frame.RESCALED if args.frame == "rescaled" else Frame.ORIGINAL


def _num(args):
    return NumParams(**{field: getattr(args, flag) for flag, field in _NUM_FLAGS.items()})


def _outdir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_test"
    probe.write_text("")
    probe.unlink()
    return out


def _echo(args, out):
    settings = {k: v for k, v in vars(args).items() if k not in ("out", "config", "verbose")}
    io.write_config_echo(out / "config_echo.txt", settings)


def _run_evolve(args, out):
    params = _phys(args)
    num = _num(args)
    s0 = make_init(args.init, args.n, params)
    result = evolve(s0, params, num, keep_states=True)
    traj = result.trajectory
    extra = {"wasserstein_to_final": wasserstein_to_final(traj), "relative_energy": relative_energy(traj)}
    io.write_timeseries(out / "timeseries.csv", traj, extra)
    io.write_snapshot(out / "snapshot_initial.csv", s0)
    io.write_snapshot(out / "snapshot_final.csv", result.final_state)
    io.write_density(out / "density_final.csv", result.final_state)
    (out / "status.txt").write_text(
        f"status={result.status.value}\nfinal_time={io.format_float(result.final_state.time)}\n"
        f"accepted_steps={result.accepted_steps}\nhalvings={result.halvings}\nmessage={result.message}\n")
    print(f"{result.status.value} t={result.final_state.time:.6g} steps={result.accepted_steps}")


def _run_sweep(args, out):
    result = critical_chi_sweep(parse_grid(args.k_grid), parse_grid(args.chi_grid), _num(args),
                                init=args.init, n=args.n, frame=_frame(args), jobs=args.jobs, warm=args.warm)
    io.write_sweep(out / "sweep.csv", result)
    io.write_chi_c(out / "chi_c.csv", result)
    for k, chi_c, c_star in result.chi_c_rows():
        print(f"k={k:g} chi_c={chi_c:g} C*={c_star:g}")
    for msg in result.warnings:
        print(f"warning: {msg}", file=sys.stderr)


def _run_rate(args, out):
    _, cols = io.read_csv(args.infile)
    if "t" not in cols or args.column not in cols:
        raise ParameterError(f"{args.infile} lacks column 't' or {args.column!r}")
    t, y = cols["t"], cols[args.column]
    window = None
    if args.t0 is not None or args.t1 is not None:
        t0 = t[0] if args.t0 is None else args.t0
        t1 = t[-1] if args.t1 is None else args.t1
        window = (t0, t1)
    fit = fit_exponential_rate(t, y, window)
    row = (fit.slope, fit.intercept, fit.window[0], fit.window[1], fit.residual)
    io.write_csv(out / "rate.csv", ("slope", "intercept", "t0", "t1", "residual"), [row])
    print(",".join(io.format_float(v) for v in row))


def _run_reconstruct(args, out):
    u = io.read_snapshot(args.infile)
    state = self_similar_reconstruct(u, args.k, args.time)
    io.write_snapshot(out / "snapshot_reconstructed.csv", state)
    io.write_density(out / "density_reconstructed.csv", state)


_COMMANDS = {"evolve": _run_evolve, "sweep": _run_sweep, "rate": _run_rate, "reconstruct": _run_reconstruct}


def main(argv=None):
    """Parse ``argv`` and run; returns the process exit status."""
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ParameterError, OSError) as err:
        print(f"aggdiff: error: {err}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        out = _outdir(args.out)
        _COMMANDS[args.command](args, out)
        _echo(args, out)
    except (ParameterError, SingularConfigurationError, OSError) as err:
        print(f"aggdiff: error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
