#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

Runs the hot primitives on identical inputs with both backends, checks
the results agree, and prints a timing table.  Usage:

    python benchmarks/kernel_benchmark.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from ntplan._kernels import _py

try:
    from ntplan._kernels import _core
except ImportError:
    _core = None

RECTS = np.array([[4.2, 4.2, 10.8, 10.8], [13.0, 1.0, 16.0, 9.5]])
BOUNDS = np.array([0.0, 0.0, 20.0, 20.0])
VERTS = np.array([[0.4, -0.25], [0.4, 0.25], [-0.4, 0.25], [-0.4, -0.25]])
LENGTHS = np.array([1.0, 0.8, 0.6])
ARM_RECTS = np.array([[0.9, 0.9, 1.5, 1.5]])
ARM_BOUNDS = np.array([-3.0, -3.0, 3.0, 3.0])
EMPTY_V = np.zeros((0, 2))
EMPTY_L = np.zeros(0)
BASE0 = np.zeros(2)


def timeit(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_case(name, make_fn, repeat, rows):
    py_t, py_res = timeit(make_fn(_py), repeat)
    if _core is None:
        rows.append((name, py_t, None, None))
        return
    c_t, c_res = timeit(make_fn(_core), repeat)
    if isinstance(py_res, np.ndarray):
        agree = np.array_equal(py_res, c_res)
    elif isinstance(py_res, tuple):
        agree = all(np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
                    for a, b in zip(py_res, c_res))
    else:
        agree = py_res == c_res
    assert agree, f"backend mismatch in {name}"
    rows.append((name, py_t, c_t, py_t / c_t))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 20, (200_000, 2))
    poses = np.column_stack([rng.uniform(0, 20, (20_000, 2)),
                             rng.uniform(-math.pi, math.pi, 20_000)])
    arms = rng.uniform(-math.pi, math.pi, (20_000, 3))
    steer_pairs = rng.uniform(0, 20, (2_000, 2, 2))

    rows = []
    bench_case("point validity x200k",
               lambda m: lambda: m.configs_free(pts, 0, EMPTY_V, EMPTY_L, BASE0, 1,
                                                RECTS, BOUNDS),
               args.repeat, rows)
    bench_case("rigid validity x20k",
               lambda m: lambda: m.configs_free(poses, 1, VERTS, EMPTY_L, BASE0, 1,
                                                RECTS, BOUNDS),
               args.repeat, rows)
    bench_case("arm validity x20k",
               lambda m: lambda: m.configs_free(arms, 2, EMPTY_V, LENGTHS, BASE0, 1,
                                                ARM_RECTS, ARM_BOUNDS),
               args.repeat, rows)

    def steer_loop(m):
        def run():
            hits = 0
            for a, b in steer_pairs:
                hits += m.steer(a, b, 0, EMPTY_V, EMPTY_L, BASE0, 1, 1.0,
                                RECTS, BOUNDS, 0.05)
            return hits
        return run

    bench_case("steer x2k (point)", steer_loop, args.repeat, rows)

    def rrt(m):
        def run():
            path, _, _, n = m.rrt_star(np.array([2.0, 2.0]), np.array([18.0, 18.0]),
                                       0, EMPTY_V, EMPTY_L, BASE0, 1, 1.0,
                                       RECTS, BOUNDS, 0.05, 1500, 1.5, 0.1, 10.0, 7)
            return path
        return run

    bench_case("tree planner, 1500 iters", rrt, args.repeat, rows)

    print(f"\n{'case':<28}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, py_t, c_t, speedup in rows:
        if c_t is None:
            print(f"{name:<28}{py_t * 1e3:>10.1f}ms{'n/a':>12}{'n/a':>10}")
        else:
            print(f"{name:<28}{py_t * 1e3:>10.1f}ms{c_t * 1e3:>10.1f}ms{speedup:>9.1f}x")
    if _core is None:
        print("\ncompiled backend not built; run `pip install -e .` first")


if __name__ == "__main__":
    main()
