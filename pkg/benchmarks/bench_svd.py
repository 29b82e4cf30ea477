"""Compare the compiled and pure-Python Jacobi SVD backends.

Usage::

    python benchmarks/bench_svd.py [--sizes 50 100 200] [--repeats 3]

Times a cold SVD, a warm-started SVD after a small perturbation (the
pattern inside the ADMM loop) and a full nuclear-norm solve.
"""

import argparse
import time

import numpy as np

from mnarmc import linalg
from mnarmc.nucmin import modified_candes_recht
from mnarmc.obsmodel import Quadratic, simulate


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_backend(name, sizes, repeats, solve_n):
    linalg.set_backend(name)
    rng = np.random.default_rng(0)
    rows = []
    for n in sizes:
        A = rng.uniform(-1, 1, (n, n))
        F = linalg.svd(A)
        B = A + 1e-3 * rng.standard_normal(A.shape)
        cold = best_of(lambda: linalg.svd(A), repeats)
        warm = best_of(lambda: linalg.svd(B, warm_start=F), repeats)
        rows.append((f"svd {n}x{n}", cold, warm))
    _, _, obs = simulate(solve_n, 7, Quadratic(), "none", 0)
    solve = best_of(lambda: modified_candes_recht(obs), 1)
    rows.append((f"admm solve n={solve_n}", solve, None))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--solve-n", type=int, default=60)
    args = ap.parse_args(argv)

    original = linalg.BACKEND
    results = {}
    try:
        for name in ("compiled", "python"):
            try:
                results[name] = bench_backend(name, args.sizes, args.repeats, args.solve_n)
            except ImportError as exc:
                print(f"skipping {name}: {exc}")
    finally:
        linalg.set_backend(original)

    print(f"{'case':<22}{'backend':<10}{'cold [s]':>10}{'warm [s]':>10}")
    for name, rows in results.items():
        for case, cold, warm in rows:
            warm_s = f"{warm:10.4f}" if warm is not None else f"{'-':>10}"
            print(f"{case:<22}{name:<10}{cold:10.4f}{warm_s}")
    if len(results) == 2:
        print()
        for (case, c, _), (_, p, _) in zip(results["compiled"], results["python"]):
            print(f"{case:<22}speedup x{p / c:.1f}")


if __name__ == "__main__":
    main()
