#!/usr/bin/env python3
"""Time the hot kernels on both backends.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Prints per-kernel best-of-N wall times for the numba and numpy
implementations plus the speedup ratio. The first numba call includes JIT
compilation and is excluded by a warmup pass.
"""

import argparse
import time

import numpy as np

from echoalign.backend import get_kernels
from echoalign.rng import stream


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases():
    gen = stream(0, 31)
    n, d, c = 20000, 64, 10
    a = gen.normal(size=(n, d))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = gen.normal(size=(n, d))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    sorted_a = np.sort(gen.normal(size=n))
    sorted_b = np.sort(gen.normal(size=n) + 0.3)
    protos = gen.normal(size=(c, d))
    protos /= np.linalg.norm(protos, axis=1, keepdims=True)
    w = gen.normal(size=(c, d)) * 0.1
    bias = np.zeros(c)
    labels = gen.integers(0, c, size=n)
    order = gen.permutation(n).astype(np.int64)

    def sgd_case(kern):
        weights = w.copy()
        bb = bias.copy()
        vw = np.zeros_like(weights)
        vb = np.zeros_like(bb)
        return lambda: kern.sgd_epoch(weights, bb, vw, vb, a, labels, order,
                                      128, 0.1, 0.9, 1e-4)

    return [
        ("row_cosine (20k x 64)", lambda k: (lambda: k.row_cosine(a, b))),
        ("ks_distance (20k vs 20k)",
         lambda k: (lambda: k.ks_distance(sorted_a, sorted_b))),
        ("nearest_rows (20k x 64, 10 protos)",
         lambda k: (lambda: k.nearest_rows(a, protos))),
        ("mean_ce_loss (20k x 64, C=10)",
         lambda k: (lambda: k.mean_ce_loss(w, bias, a, labels))),
        ("sgd_epoch (20k x 64, batch 128)", sgd_case),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = {}
    for name in ("numba", "numpy"):
        try:
            backends[name] = get_kernels(name)
        except ImportError:
            print(f"note: {name} backend unavailable, skipping")
    cases = build_cases()

    print(f"{'kernel':<36} " + " ".join(f"{n:>12}" for n in backends)
          + "     speedup")
    for label, make in cases:
        times = {}
        for name, kern in backends.items():
            fn = make(kern)
            fn()  # warmup (JIT compile for numba)
            times[name] = timeit(fn, args.repeats)
        row = f"{label:<36} " + " ".join(
            f"{times[n] * 1e3:>10.2f}ms" for n in backends)
        if len(times) == 2:
            row += f"  {times['numpy'] / times['numba']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
