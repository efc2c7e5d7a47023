#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy/LAPACK fallbacks.

Times the two hot paths: the (nu, omega) derivative scan used by the
verification command, and the fused SOR-like tridiagonal iteration used by
single solves and the omega sweep.  Run after building the extension:

    python benchmarks/bench_kernels.py [--scan-step 0.001] [--n 2000] [--repeats 5]
"""
import argparse
import statistics
import time

import numpy as np

from avesor import _fallback
from avesor.linalg import factorize
from avesor.problems import gen_ex41

try:
    from avesor import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def bench_scan(backend, step, repeats):
    grid = np.arange(step, 1.0, step)
    return best_of(lambda: backend.g1prime_grid(grid, grid), repeats)


def bench_sor(backend, n, repeats):
    problem = gen_ex41(n)
    F = factorize(problem.A)
    sub, diag, sup = problem.A.tridiag_bands()
    omegas = np.arange(0.5, 1.5, 0.01)

    def run():
        for omega in omegas:
            backend.sor_like_tridiag(
                sub, diag, sup, ("spd", *F.data), problem.b, float(omega),
                np.zeros(n), np.zeros(n), 1e-8, 100, None,
            )

    return best_of(run, repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scan-step", type=float, default=0.001)
    parser.add_argument("--n", type=int, default=2000, help="order of the sweep test problem")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = [("python", _fallback)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    rows = []
    for name, backend in backends:
        best, median = bench_scan(backend, args.scan_step, args.repeats)
        rows.append((f"derivative scan ({args.scan_step:g} grid)", name, best, median))
    for name, backend in backends:
        best, median = bench_sor(backend, args.n, args.repeats)
        rows.append((f"sor sweep x100 (n={args.n})", name, best, median))

    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark'.ljust(width)}  backend   best [s]   median [s]")
    for label, name, best, median in rows:
        print(f"{label.ljust(width)}  {name.ljust(8)}  {best:9.4f}  {median:10.4f}")

    if _kernels is not None:
        for label in {r[0] for r in rows}:
            times = {r[1]: r[2] for r in rows if r[0] == label}
            print(f"speedup {label}: {times['python'] / times['compiled']:.1f}x")


if __name__ == "__main__":
    main()
