#!/usr/bin/env python3
"""Benchmark the jitted kernels against their pure-numpy interpretations.

Runs the dense simplex kernel and the product-measure weight table through
both code paths (same source, compiled vs interpreted) and prints median
per-call timings.  The jitted path is what the test suite exercises by
default; set STOCOMB_NUMBA=0 to force the interpreted path everywhere.

Usage: python benchmarks/bench_kernels.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from stocomb._kernels import (
    HAVE_JIT,
    bernoulli_weights_jit,
    bernoulli_weights_py,
    simplex_jit,
    simplex_py,
)

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8


def random_lp(rng, m, n):
    A = rng.uniform(-1.0, 2.0, (m, n))
    b = rng.uniform(-1.0, 2.0, m)
    c = rng.uniform(0.05, 2.0, n)
    return A, b, c


def time_simplex(kernel, problems, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for A, b, c in problems:
            kernel(A, b, c, PIVOT_TOL, FEAS_TOL, 10_000)
        times.append((time.perf_counter() - start) / len(problems))
    return statistics.median(times) * 1e6


def time_weights(kernel, vectors, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for p in vectors:
            kernel(p)
        times.append((time.perf_counter() - start) / len(vectors))
    return statistics.median(times) * 1e6


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    sizes = [(4, 6), (8, 16), (16, 64), (24, 256)]
    print(f"numba available: {HAVE_JIT}")
    print("\ndense two-phase simplex (per-solve median, microseconds)")
    print(f"{'rows x cols':>12} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for m, n in sizes:
        problems = [random_lp(rng, m, n) for _ in range(20)]
        t_py = time_simplex(simplex_py, problems, max(3, args.repeats // 10))
        if simplex_jit is not None:
            simplex_jit(*problems[0], PIVOT_TOL, FEAS_TOL, 10_000)  # compile
            t_jit = time_simplex(simplex_jit, problems, args.repeats)
            print(f"{f'{m} x {n}':>12} {t_py:>10.1f}us {t_jit:>10.1f}us "
                  f"{t_py / t_jit:>8.1f}x")
        else:
            print(f"{f'{m} x {n}':>12} {t_py:>10.1f}us {'n/a':>12} {'n/a':>9}")

    print("\nproduct-measure weight table (per-call median, microseconds)")
    print(f"{'clients':>12} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for n in (8, 12, 16, 20):
        vectors = [rng.uniform(0.05, 0.95, n) for _ in range(5)]
        t_py = time_weights(bernoulli_weights_py, vectors, max(3, args.repeats // 10))
        if bernoulli_weights_jit is not None:
            bernoulli_weights_jit(vectors[0])
            t_jit = time_weights(bernoulli_weights_jit, vectors, args.repeats)
            print(f"{n:>12} {t_py:>10.1f}us {t_jit:>10.1f}us {t_py / t_jit:>8.1f}x")
        else:
            print(f"{n:>12} {t_py:>10.1f}us {'n/a':>12} {'n/a':>9}")


if __name__ == "__main__":
    main()
