"""Monte-Carlo studies comparing the estimators on the block-rotation design.

The design matrix is ``blockdiag(F0, 0_3) kron I_p`` with ``F0`` a 2x2
rotation-scaling block (poles ``0.99 +- 0.1i``) plus a pole at ``0.95``,
so ``n = 6p`` and the true rank is ``3p``. Noise covariance is ``I``.

Repeat ``i`` of every cell uses seed ``base_seed + i``.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import InvalidInput
from .estimators import Method, as_method, fit
from .io import write_results
from .linalg import eig_general
from .metrics import relative_estimation_error, summarize
from .moments import build_data_matrices, residual_forward, sample_moments
from .process import INIT_MODES, VarModel, simulate

__all__ = [
    "F0",
    "LOW_T_VALUES",
    "ExperimentConfig",
    "CellResult",
    "build_paper_f",
    "run_repeat",
    "run_cell",
    "run_low",
    "run_high",
    "summarize_cell",
    "timing_slope",
    "write_study",
    "max_threads",
]

F0 = np.array([[0.99, -0.1, 0.0], [0.1, 0.99, 0.0], [0.0, 0.0, 0.95]])
LOW_T_VALUES = (24, 216, 600)
ALL_METHODS = (Method.LS, Method.FB11, Method.RLS, Method.RFB)
DESK_MAX_K = 7
FULL_MAX_K = 9


def build_paper_f(p):
    """Block-rotation design model of dimension ``6p`` with ``Q = I``."""
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise InvalidInput(f"p must be a positive integer, got {p!r}")
    p = int(p)
    base = np.zeros((6, 6))
    base[:3, :3] = F0
    F = np.kron(base, np.eye(p))
    return VarModel(F=F, Q=np.eye(6 * p))


def max_threads():
    """Worker cap from ``STABLEVAR_THREADS`` (default 1)."""
    raw = os.environ.get("STABLEVAR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInput(f"STABLEVAR_THREADS must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo study on the design model with ``p = 2**k``."""

    k: int = 0
    m: int | None = None
    t_multipliers: tuple = (4, 36, 100)
    repeats: int = 1000
    base_seed: int = 0
    methods: tuple = ALL_METHODS
    init: str = "zero"

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInput("k must be >= 0")
        n = 6 * 2**self.k
        m = 3 * 2**self.k if self.m is None else int(self.m)
        if not 1 <= m <= n:
            raise InvalidInput(f"m must satisfy 1 <= m <= {n}")
        if self.repeats < 1:
            raise InvalidInput("repeats must be >= 1")
        if not self.t_multipliers or any(t < 1 for t in self.t_multipliers):
            raise InvalidInput("t_multipliers must be positive")
        if self.init not in INIT_MODES:
            raise InvalidInput(f"init must be one of {INIT_MODES}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "t_multipliers", tuple(int(t) for t in self.t_multipliers))
        object.__setattr__(self, "methods", tuple(as_method(x) for x in self.methods))

    @property
    def p(self):
        return 2**self.k

    @property
    def n(self):
        return 6 * self.p

    @property
    def T_values(self):
        return tuple(t * self.n for t in self.t_multipliers)

    def to_dict(self):
        d = asdict(self)
        d["methods"] = [x.value for x in self.methods]
        d["n"] = self.n
        return d


@dataclass
class CellResult:
    """Rows ``{seed, method, n, m, T, e, epsilon, rho, fit_seconds}`` and poles."""

    n: int
    m: int
    T: int
    rows: list = field(default_factory=list)
    poles: list = field(default_factory=list)  # (seed, method, complex ndarray)


def _residual_norm(S, F):
    """``||Y1 - F Y0||`` from moments: ``sqrt(T trace S_wf(F))``."""
    return float(np.sqrt(max(S.T * np.trace(residual_forward(S, F)), 0.0)))


def run_repeat(model, m, T, seed, methods=ALL_METHODS, init="zero", keep_poles=True):
    """Simulate one trajectory and fit every method on it.

    Returns ``(rows, poles)``. The prediction error uses the moment form
    ``||Y1 - F Y0||^2 = T trace S_wf(F)``, which costs ``O(n^3)`` instead of
    ``O(n^2 T)``.
    """
    traj = simulate(model, T, seed, init=init)
    S = sample_moments(*build_data_matrices(traj))
    F_ls = fit(S, Method.LS).F_hat
    base = _residual_norm(S, F_ls)
    rows, poles = [], []
    for method in methods:
        est = fit(S, method, rank=m)
        ps = eig_general(est.F_hat)
        rows.append(
            {
                "seed": int(seed),
                "method": est.method.value,
                "n": model.n,
                "m": est.rank,
                "T": int(T),
                "e": relative_estimation_error(est.F_hat, model.F),
                "epsilon": (_residual_norm(S, est.F_hat) - base) / base,
                "rho": ps.spectral_radius,
                "fit_seconds": est.fit_seconds,
            }
        )
        if keep_poles:
            poles.append((int(seed), est.method.value, ps.poles))
    return rows, poles


def run_cell(model, m, T, repeats, base_seed=0, methods=ALL_METHODS, init="zero",
             keep_poles=True, threads=1):
    """All repeats of one ``(n, T)`` cell, ordered by repeat index."""
    seeds = [base_seed + i for i in range(repeats)]

    def one(seed):
        return run_repeat(model, m, T, seed, methods, init, keep_poles)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, seeds))
    else:
        parts = [one(s) for s in seeds]
    cell = CellResult(n=model.n, m=m, T=T)
    for rows, poles in parts:
        cell.rows.extend(rows)
        cell.poles.extend(poles)
    return cell


def summarize_cell(cell):
    """Per-method unstable rate and error quartiles (fractions)."""
    out = {}
    methods = list(dict.fromkeys(r["method"] for r in cell.rows))
    for method in methods:
        rows = [r for r in cell.rows if r["method"] == method]
        rho = [r["rho"] for r in rows]
        e = summarize([r["e"] for r in rows], rho)
        eps = summarize([r["epsilon"] for r in rows], rho)
        out[method] = {
            "count": e.count,
            "unstable_rate": e.unstable_rate,
            "e": {"median": e.median, "q25": e.q25, "q75": e.q75},
            "epsilon": {"median": eps.median, "q25": eps.q25, "q75": eps.q75},
            "mean_fit_seconds": float(np.mean([r["fit_seconds"] for r in rows])),
        }
    return out


def run_low(repeats=1000, base_seed=0, methods=ALL_METHODS, init="zero",
            T_values=LOW_T_VALUES, m=3, threads=None):
    """Low-dimensional study (``n = 6``): one cell per ``T``."""
    model = build_paper_f(1)
    threads = max_threads() if threads is None else threads
    return {
        T: run_cell(model, m, T, repeats, base_seed, methods, init, True, threads)
        for T in T_values
    }


def run_high(k_values, t_mult=100, repeats=50, base_seed=0,
             methods=(Method.RLS, Method.RFB), init="zero", full=False, progress=None):
    """High-dimensional study over ``n = 6 * 2**k``.

    Fits run with BLAS limited to one thread and repeats run sequentially
    so ``fit_seconds`` is comparable across cells. ``k > 7`` requires
    ``full=True``.
    """
    k_values = [int(k) for k in k_values]
    limit = FULL_MAX_K if full else DESK_MAX_K
    bad = [k for k in k_values if not 0 <= k <= limit]
    if bad:
        hint = "" if full else " (use full=True for k up to 9)"
        raise InvalidInput(f"k values {bad} outside 0..{limit}{hint}")
    cells = {}
    with threadpool_limits(limits=1):
        for k in k_values:
            model = build_paper_f(2**k)
            m = 3 * 2**k
            cells[k] = run_cell(model, m, t_mult * model.n, repeats, base_seed,
                                methods, init, keep_poles=False, threads=1)
            if progress is not None:
                progress(k, cells[k])
    return cells


def timing_slope(n_values, seconds):
    """Least-squares slope of ``log(seconds)`` against ``log(n)``."""
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.asarray(seconds, dtype=float))
    if x.size < 2:
        raise InvalidInput("need at least two points for a slope")
    return float(np.polyfit(x, y, 1)[0])


def _write_poles(cells, path):
    import csv

    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "method", "T", "real", "imag", "modulus"])
        for T, cell in cells.items():
            for seed, method, poles in cell.poles:
                for z in poles:
                    w.writerow([seed, method, cell.T, repr(float(z.real)),
                                repr(float(z.imag)), repr(float(abs(z)))])


def write_study(cells, out_dir, study, meta):
    """Write per-cell results CSVs, pole moduli (if kept) and ``summary.json``.

    ``cells`` maps a cell key (``T`` for the low study, ``k`` for the high
    study) to a :class:`CellResult`. Returns the summary dict.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"study": study, **meta, "cells": []}
    for key, cell in cells.items():
        tag = f"T{cell.T}" if study == "low" else f"k{key}_T{cell.T}"
        write_results(cell.rows, out / f"results_{tag}.csv")
        summary["cells"].append(
            {"n": cell.n, "m": cell.m, "T": cell.T, "methods": summarize_cell(cell)}
        )
    if any(c.poles for c in cells.values()):
        _write_poles(cells, out / "poles.csv")
    if study == "high":
        with (out / "timing.csv").open("w") as fh:
            fh.write("method,n,T,fit_seconds\n")
            for cell in cells.values():
                for r in cell.rows:
                    fh.write(f"{r['method']},{r['n']},{r['T']},{r['fit_seconds']!r}\n")
        slopes = {}
        methods = list(dict.fromkeys(r["method"] for c in cells.values() for r in c.rows))
        if len(cells) >= 2:
            for method in methods:
                ns = [c.n for c in cells.values()]
                secs = [np.mean([r["fit_seconds"] for r in c.rows if r["method"] == method])
                        for c in cells.values()]
                slopes[method] = timing_slope(ns, secs)
        summary["timing_slope"] = slopes
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary
