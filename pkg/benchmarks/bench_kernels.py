"""Benchmark the jitted kernels against their pure-numpy fallbacks.

Run as ``python benchmarks/bench_kernels.py``.  With FLOWLAB_JIT=0 the
active path IS the numpy path, so the comparison degenerates; run with JIT
enabled (the default) to see the speedups.  Timings exclude compilation:
each kernel is called once before measurement.
"""
import time

import numpy as np

from flowlab import kernels


def best_of(fn, *args, repeats=5):
    fn(*args)  # warm up / compile
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    print(f"JIT enabled: {kernels.JIT_ENABLED}")
    rows = []

    lengths = np.full(6, 1 / 6)
    vvals = np.zeros(6)
    sigmas = np.full(5, 1e3)
    lams = np.linspace(0.5, 1.5e3, 500_000)
    rows.append((
        "shoot_grid (500k lambdas, 6 segments)",
        best_of(kernels.shoot_grid, lams, lengths, vvals, sigmas),
        best_of(kernels.shoot_grid_numpy, lams, lengths, vvals, sigmas),
    ))
    rows.append((
        "count_zeros_grid (500k lambdas)",
        best_of(kernels.count_zeros_grid, lams, lengths, vvals, sigmas),
        best_of(kernels.count_zeros_grid_numpy, lams, lengths, vvals, sigmas),
    ))

    xs = np.linspace(0.0, 1.0, 1_000_000)
    coeffs = np.array([1.2, -0.7, 0.3, 2.1, -0.9])
    gamma = 6 * np.pi - 1e-3
    rows.append((
        "eval_u_grid (1M points, n=6)",
        best_of(kernels.eval_u_grid, xs, gamma, coeffs, 6),
        best_of(kernels.eval_u_grid_numpy, xs, gamma, coeffs, 6),
    ))

    nodes = np.linspace(0.0, 1.0, 7)
    rows.append((
        "transfer_eval_grid (1M points)",
        best_of(kernels.transfer_eval_grid, xs, 300.0, nodes, vvals, sigmas),
        best_of(kernels.transfer_eval_grid_numpy, xs, 300.0, nodes, vvals, sigmas),
    ))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'active':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t_active, t_numpy in rows:
        print(f"{name:<{width}}  {t_active * 1e3:>8.2f}ms  {t_numpy * 1e3:>8.2f}ms  "
              f"{t_numpy / t_active:>7.2f}x")


if __name__ == "__main__":
    main()
