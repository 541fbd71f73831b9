#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy/Python fallback.

Runs each hot kernel on both backends at a desk-scale size and prints a
table of per-call times and speedups.  Usage:

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from thresholdwindow import _kernels_py as kpy
from thresholdwindow import rng as trng
from thresholdwindow.families import edge_index_table

try:
    from thresholdwindow import _ckernels as kc
except ImportError:
    kc = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    gen = trng.generator(20240)
    n = 48
    labels = gen.random(n * n)
    order = np.argsort(labels, kind="stable").astype(np.int64)
    yield ("percolation_flip_time (48x48)",
           lambda k: k.percolation_flip_time(labels, order, n))

    mask = (gen.random(n * n) < 0.5).astype(np.uint8)
    yield ("crossing_exists (48x48)",
           lambda k: k.crossing_exists(mask, n))

    closed_mask = mask.copy()
    if kpy.crossing_exists(closed_mask, n):
        closed_mask = np.ascontiguousarray(
            (1 - closed_mask.reshape(n, n)).T).reshape(-1)
    yield ("bridging_pivotal_count (48x48)",
           lambda k: k.bridging_pivotal_count(closed_mask, n))

    m, height = 3, 10
    tree_labels = gen.random(m ** height)
    yield ("itermaj_flip_time (3^10)",
           lambda k: k.itermaj_flip_time(tree_labels.copy(), m, height))

    v = 220
    eu, ew = edge_index_table(v)
    elab = gen.random(len(eu))
    eorder = np.argsort(elab, kind="stable")
    su, sw, sl = eu[eorder], ew[eorder], elab[eorder]
    yield ("connectivity_flip_time (v=220)",
           lambda k: k.connectivity_flip_time(su, sw, sl, v))
    yield ("triangle_flip_time (v=220)",
           lambda k: k.triangle_flip_time(su, sw, sl, v))

    circle = 4096
    bits = (gen.random(circle) < 0.5).astype(np.uint8)
    yield ("max_window_value (n=4096, ell=24)",
           lambda k: k.max_window_value(bits, 24))

    wl = gen.random(circle)
    worder = np.argsort(wl, kind="stable").astype(np.int64)
    thr = np.array([2 ** 23, 2 ** 24 - 2], dtype=np.int64)
    out = np.empty(2)
    yield ("window_flip_times (n=4096, ell=24)",
           lambda k: k.window_flip_times(wl, worder, 24, thr, out))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kc is None:
        print("compiled extension not built; nothing to compare")
        return
    header = f"{'kernel':40s} {'compiled':>12s} {'python':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, call in cases():
        tc = timeit(lambda: call(kc), args.repeat)
        tp = timeit(lambda: call(kpy), args.repeat)
        print(f"{name:40s} {tc * 1e3:10.3f}ms {tp * 1e3:10.3f}ms "
              f"{tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
