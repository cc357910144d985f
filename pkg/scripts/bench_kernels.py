#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Run: python scripts/bench_kernels.py [--draws 200000]
"""

import argparse
import time

import numpy as np

from sld import kernels
from sld.channel import sample_directions


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--draws", type=int, default=200_000)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {backends}")
    if "compiled" not in backends:
        print("compiled extension not built; showing python backend only")

    rng = np.random.default_rng(0)
    print(f"\nquantize {args.draws} directions (best of 3, seconds):")
    print(f"{'n':>3} {'codewords':>10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n, b1 in [(2, 6), (2, 10), (4, 8), (4, 12), (8, 10)]:
        dirs = sample_directions(args.draws, n, rng)
        cb = sample_directions(2 ** b1, n, rng)
        times = {}
        for backend in backends:
            kernels.use(backend)
            times[backend] = _time(lambda: kernels.best_cos2(dirs, cb))
        ratio = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        row = " ".join(f"{times[b]:10.4f}" for b in backends)
        print(f"{n:>3} {2 ** b1:>10} {row}   {ratio:6.2f}x")

    print("\npairwise max correlation (best of 3, seconds):")
    print(f"{'n':>3} {'vectors':>10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n, m in [(2, 1024), (4, 2048), (8, 4096)]:
        vecs = sample_directions(m, n, rng)
        times = {}
        for backend in backends:
            kernels.use(backend)
            times[backend] = _time(lambda: kernels.max_offdiag_correlation(vecs))
        ratio = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        row = " ".join(f"{times[b]:10.4f}" for b in backends)
        print(f"{n:>3} {m:>10} {row}   {ratio:6.2f}x")

    kernels.use("compiled" if "compiled" in backends else "python")


if __name__ == "__main__":
    main()
