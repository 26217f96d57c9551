"""Command-line interface.

Exit codes: 0 success, 1 numerical failure, 2 usage or I/O error.
"""

import json
import sys
import time
from pathlib import Path

import click

from . import _backend
from .errors import InvalidInput, InvalidRank, ParseError, StableVarError
from .estimators import Method, fit
from .experiments import (
    DESK_MAX_K,
    FULL_MAX_K,
    LOW_T_VALUES,
    build_paper_f,
    run_high,
    run_low,
    write_study,
)
from .io import read_trajectory, write_estimate, write_trajectory
from .moments import moments_from_trajectory
from .process import INIT_MODES, simulate

METHOD_CHOICES = ("ls", "fb", "rls", "rfb")


class CliError(click.ClickException):
    def __init__(self, message, exit_code=1):
        super().__init__(message)
        self.exit_code = exit_code


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ParseError, InvalidRank, InvalidInput) as exc:
        raise CliError(str(exc), 2) from exc
    except OSError as exc:
        raise CliError(f"I/O error: {exc}", 2) from exc
    except MemoryError as exc:
        raise CliError("out of memory; reduce --k-range or --repeats", 1) from exc
    except StableVarError as exc:
        raise CliError(f"numerical failure: {exc}", 1) from exc


def _parse_k_range(text):
    text = text.strip()
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected 'a-b' or 'a,b,c', got {text!r}") from None


def _pct(x):
    return f"{100.0 * x:.4g}%"


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Stable reduced-rank VAR(1) identification."""


@main.command("simulate")
@click.option("--k", "k", type=click.IntRange(0, FULL_MAX_K), default=0, show_default=True,
              help="Design size exponent: n = 6 * 2**k.")
@click.option("--T", "T", type=click.IntRange(min=1), default=None,
              help="Number of transitions (rows written: T + 1).")
@click.option("--t-mult", type=click.IntRange(min=1), default=None,
              help="Set T = t_mult * n instead of --T.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--init", type=click.Choice(INIT_MODES), default="stationary", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--header/--no-header", default=True, show_default=True)
def simulate_cmd(k, T, t_mult, seed, init, out, header):
    """Simulate the block-rotation design model and write a trajectory CSV."""
    model = build_paper_f(2**k)
    if (T is None) == (t_mult is None):
        raise click.UsageError("give exactly one of --T and --t-mult")
    T = T if T is not None else t_mult * model.n
    traj = _guard(simulate, model, T, seed, init=init)
    _guard(write_trajectory, traj, out, header=header)
    click.echo(f"wrote {T + 1} rows x {model.n} columns to {out}", err=True)


@main.command("estimate")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--method", type=click.Choice(METHOD_CHOICES), required=True)
@click.option("--rank", type=int, default=None, help="Rank for rls/rfb (default: n).")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Output JSON path (default: stdout).")
def estimate_cmd(input_path, method, rank, out):
    """Fit an estimator to a trajectory CSV and write the estimate as JSON."""
    traj = _guard(read_trajectory, input_path)
    if traj.T < traj.n:
        click.echo(f"warning: T={traj.T} < n={traj.n}; moments may be singular", err=True)
    if rank is not None and method in ("ls", "fb") and rank != traj.n:
        raise click.UsageError(f"--rank applies only to rls/rfb (full-rank methods use n={traj.n})")
    if rank is not None and not 1 <= rank <= traj.n:
        raise click.UsageError(f"--rank must lie in 1..{traj.n}")
    S = _guard(moments_from_trajectory, traj)
    est = _guard(fit, S, method, rank=rank)
    if est.method in (Method.FB11, Method.RFB) and not est.spectral_radius < 1.0:
        raise CliError(
            f"internal invariant violated: {est.method.value} estimate has spectral "
            f"radius {est.spectral_radius!r}; refusing to write",
            1,
        )
    if out is None:
        click.echo(json.dumps(est.to_dict(), indent=2))
    else:
        _guard(write_estimate, est, out)


@main.command("reproduce-low")
@click.option("--repeats", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True,
              help="Base seed; repeat i uses seed + i.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--init", type=click.Choice(INIT_MODES), default="zero", show_default=True)
def reproduce_low_cmd(repeats, base_seed, out_dir, init):
    """Low-dimensional study: n = 6, m = 3, T in {24, 216, 600}."""
    t0 = time.perf_counter()
    cells = _guard(run_low, repeats=repeats, base_seed=base_seed, init=init)
    meta = {"n": 6, "m": 3, "repeats": repeats, "base_seed": base_seed, "init": init,
            "T_values": list(LOW_T_VALUES)}
    summary = _guard(write_study, cells, out_dir, "low", meta)
    _print_summary(summary)
    click.echo(f"done in {time.perf_counter() - t0:.1f}s; results in {out_dir}", err=True)


@main.command("reproduce-high")
@click.option("--k-range", default=f"1-{DESK_MAX_K}", show_default=True,
              help="k values as 'a-b' or 'a,b,c'; n = 6 * 2**k.")
@click.option("--t-mult", type=click.IntRange(min=1), default=100, show_default=True,
              help="T = t_mult * n.")
@click.option("--repeats", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--full", is_flag=True, help=f"Allow k up to {FULL_MAX_K} (hours of runtime).")
@click.option("--init", type=click.Choice(INIT_MODES), default="zero", show_default=True)
def reproduce_high_cmd(k_range, t_mult, repeats, base_seed, out_dir, full, init):
    """High-dimensional study with timing of the RLS and RFB fits."""
    ks = _parse_k_range(k_range)

    def progress(k, cell):
        click.echo(f"k={k} n={cell.n} T={cell.T} done", err=True)

    cells = _guard(run_high, ks, t_mult=t_mult, repeats=repeats, base_seed=base_seed,
                   init=init, full=full, progress=progress)
    meta = {"k_values": ks, "t_mult": t_mult, "repeats": repeats,
            "base_seed": base_seed, "init": init}
    summary = _guard(write_study, cells, out_dir, "high", meta)
    _print_summary(summary)
    for method, slope in summary.get("timing_slope", {}).items():
        click.echo(f"timing slope log(t) vs log(n), {method}: {slope:.3f}")


def _print_summary(summary):
    click.echo(f"{'n':>5} {'T':>7} {'method':>6} {'unstable':>9} {'e median':>10} "
               f"{'eps median':>11} {'fit s':>10}")
    for cell in summary["cells"]:
        for method, s in cell["methods"].items():
            click.echo(
                f"{cell['n']:>5} {cell['T']:>7} {method:>6} {_pct(s['unstable_rate']):>9} "
                f"{_pct(s['e']['median']):>10} {_pct(s['epsilon']['median']):>11} "
                f"{s['mean_fit_seconds']:>10.3g}"
            )


@main.command("bench")
@click.option("--n", "n_values", default="6,24,96,384", show_default=True,
              help="Comma-separated state dimensions.")
@click.option("--t-mult", type=click.IntRange(min=1), default=36, show_default=True)
@click.option("--repeats", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Optional CSV of timings.")
def bench_cmd(n_values, t_mult, repeats, seed, out):
    """Time the simulation kernel backends and the RLS/RFB fits."""
    from .benchmark import run_benchmark

    ns = [int(x) for x in n_values.split(",") if x.strip()]
    click.echo(f"kernel backends available: {', '.join(_backend.BACKENDS)} "
               f"(default {_backend.DEFAULT_BACKEND})")
    rows = _guard(run_benchmark, ns, t_mult=t_mult, repeats=repeats, seed=seed)
    click.echo(f"{'n':>5} {'T':>7} {'task':>14} {'best s':>10}")
    for r in rows:
        click.echo(f"{r['n']:>5} {r['T']:>7} {r['task']:>14} {r['seconds']:>10.4g}")
    if out is not None:
        with out.open("w") as fh:
            fh.write("n,T,task,seconds\n")
            for r in rows:
                fh.write(f"{r['n']},{r['T']},{r['task']},{r['seconds']!r}\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
