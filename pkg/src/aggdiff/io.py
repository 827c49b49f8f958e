"""CSV and configuration files.

Every CSV has a header row and floats are written with 17 significant digits,
so values round-trip exactly.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .model import ParameterError
from .state import ParticleState, to_density

__all__ = [
    "format_float",
    "write_csv",
    "read_csv",
    "write_snapshot",
    "read_snapshot",
    "write_density",
    "write_timeseries",
    "write_sweep",
    "write_chi_c",
    "write_config_echo",
    "read_config_echo",
]


def format_float(value):
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def _cell(value):
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path):
    """Return ``(header, columns)`` with columns keyed by name (strings kept where not numeric)."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParameterError(f"{path} is empty") from None
        rows = list(reader)
    columns = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            columns[name] = np.array([float(v) for v in raw])
        except ValueError:
            columns[name] = raw
    return header, columns


def write_snapshot(path, state):
    return write_csv(path, ("eta", "X"), zip(state.etas, state.positions))


def read_snapshot(path, time=0.0):
    _, cols = read_csv(path)
    if "X" not in cols:
        raise ParameterError(f"{path} is not a snapshot file (no X column)")
    return ParticleState(cols["X"], time)


def write_density(path, state):
    prof = to_density(state)
    return write_csv(path, ("x", "rho"), zip(prof.x, prof.rho))


def write_timeseries(path, trajectory, extra=None):
    """Write the recorded diagnostics plus optional post-pass columns.

    Parameters
    ----------
    extra : dict, optional
        Column name to array, same length as the trajectory.
    """
    extra = dict(extra or {})
    header = list(trajectory.COLUMNS) + list(extra)
    data = [trajectory.column(c) for c in trajectory.COLUMNS] + [np.asarray(v, dtype=float) for v in extra.values()]
    for name, col in zip(header, data):
        if col.size != len(trajectory):
            raise ParameterError(f"column {name} has {col.size} rows, expected {len(trajectory)}")
    return write_csv(path, header, zip(*data))


def write_sweep(path, result):
    rows = ((r.k, r.chi, r.status.value, r.final_time, r.final_energy) for r in result.grid)
    return write_csv(path, ("k", "chi", "status", "final_time", "final_energy"), rows)


def write_chi_c(path, result):
    return write_csv(path, ("k", "chi_c", "c_star_estimate"), result.chi_c_rows())


def write_config_echo(path, settings):
    """Flat ``key=value`` lines sorted by key."""
    path = Path(path)
    lines = []
    for key in sorted(settings):
        value = settings[key]
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"{key}={value}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_config_echo(path):
    settings = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"{path}:{lineno}: expected key=value")
        settings[key.strip()] = value.strip()
    return settings
