"""Timing harness: compiled vs NumPy kernel, and the estimator fits."""

import time

import numpy as np
from threadpoolctl import threadpool_limits

from . import _backend
from .estimators import fit_rfb, fit_rls
from .experiments import build_paper_f
from .moments import moments_from_trajectory
from .process import simulate


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(n_values, t_mult=36, repeats=3, seed=0, backends=None):
    """Best-of-``repeats`` wall time per task.

    Tasks are ``simulate[<backend>]`` for each kernel backend, then
    ``fit_rls`` and ``fit_rfb`` on the resulting moments. ``n`` values are
    rounded up to a multiple of 6 (the design model's block size).
    """
    backends = backends or _backend.BACKENDS
    rows = []
    with threadpool_limits(limits=1):
        for n in n_values:
            p = max(1, -(-int(n) // 6))
            model = build_paper_f(p)
            T = t_mult * model.n
            for be in backends:
                secs = _best_of(lambda: simulate(model, T, seed, init="zero", backend=be),
                                repeats)
                rows.append({"n": model.n, "T": T, "task": f"simulate[{be}]", "seconds": secs})
            S = moments_from_trajectory(simulate(model, T, seed, init="zero"))
            m = 3 * p
            for name, f in (("fit_rls", fit_rls), ("fit_rfb", fit_rfb)):
                secs = _best_of(lambda: f(S, m), repeats)
                rows.append({"n": model.n, "T": T, "task": name, "seconds": secs})
    return rows
