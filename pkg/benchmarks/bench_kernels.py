"""Compare the Cython and NumPy simulation kernels across state dimensions.

    python benchmarks/bench_kernels.py [n ...]
"""

import sys

from stablevar import _backend
from stablevar.benchmark import run_benchmark


def main(argv):
    ns = [int(a) for a in argv] or [6, 12, 48, 192, 384]
    rows = run_benchmark(ns, t_mult=36, repeats=3)
    by_n = {}
    for r in rows:
        by_n.setdefault((r["n"], r["T"]), {})[r["task"]] = r["seconds"]
    print(f"backends: {_backend.BACKENDS}")
    print(f"{'n':>5} {'T':>7} {'cython s':>10} {'python s':>10} {'speedup':>8} {'rls s':>9} {'rfb s':>9}")
    for (n, T), t in by_n.items():
        c = t.get("simulate[cython]", float("nan"))
        p = t["simulate[python]"]
        print(f"{n:>5} {T:>7} {c:>10.4f} {p:>10.4f} {p / c:>8.1f} {t['fit_rls']:>9.4f} {t['fit_rfb']:>9.4f}")


if __name__ == "__main__":
    main(sys.argv[1:])
