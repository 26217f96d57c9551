"""File formats: trajectory CSV, estimate JSON, per-cell results CSV.

Numbers are written with ``repr``, the shortest decimal string that
round-trips to the same double.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .estimators import Estimate
from .process import Trajectory

__all__ = [
    "RESULT_COLUMNS",
    "write_trajectory",
    "read_trajectory",
    "write_estimate",
    "read_estimate",
    "write_results",
    "read_results",
]

RESULT_COLUMNS = ("seed", "method", "n", "m", "T", "e", "epsilon", "rho", "fit_seconds")


def _fmt(x):
    return repr(float(x))


def write_trajectory(traj, path, header=True):
    """One row per time step ``t = 0..T``; optional header ``y1,...,yn``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow([f"y{i + 1}" for i in range(traj.n)])
        for row in traj.y:
            w.writerow([_fmt(v) for v in row])


def _parse_row(fields, lineno):
    try:
        return [float(f) for f in fields]
    except ValueError:
        bad = next(f for f in fields if not _is_float(f))
        raise ParseError(f"non-numeric value {bad!r}", lineno) from None


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_trajectory(path):
    """Parse a trajectory CSV. A first row with any non-numeric field is a header.

    Raises
    ------
    ParseError
        On ragged rows, non-numeric or non-finite values, or no data.
    """
    rows = []
    width = None
    with Path(path).open(newline="") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            fields = [f.strip() for f in fields]
            if not fields or all(f == "" for f in fields):
                continue
            if lineno == 1 and not all(_is_float(f) for f in fields):
                width = len(fields)
                continue
            values = _parse_row(fields, lineno)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"expected {width} columns, got {len(values)}", lineno)
            if not all(np.isfinite(values)):
                raise ParseError("non-finite value", lineno)
            rows.append(values)
    if not rows:
        raise ParseError("no data rows", 1)
    return Trajectory(y=np.array(rows))


def write_estimate(est, path):
    Path(path).write_text(json.dumps(est.to_dict(), indent=2) + "\n")


def read_estimate(path):
    return Estimate.from_dict(json.loads(Path(path).read_text()))


def write_results(rows, path):
    """Write per-(seed, method) metric rows (dicts keyed by ``RESULT_COLUMNS``)."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow(
                [
                    r["seed"],
                    r["method"],
                    r["n"],
                    r["m"],
                    r["T"],
                    _fmt(r["e"]),
                    _fmt(r["epsilon"]),
                    _fmt(r["rho"]),
                    _fmt(r["fit_seconds"]),
                ]
            )


def read_results(path):
    out = []
    with Path(path).open(newline="") as fh:
        for r in csv.DictReader(fh):
            out.append(
                {
                    "seed": int(r["seed"]),
                    "method": r["method"],
                    "n": int(r["n"]),
                    "m": int(r["m"]),
                    "T": int(r["T"]),
                    **{k: float(r[k]) for k in ("e", "epsilon", "rho", "fit_seconds")},
                }
            )
    return out
