"""Timing comparison of the compiled kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from veronese._kernels import pykernels

try:
    from veronese._kernels import ckernels
except ImportError:
    ckernels = None


def time_pivot(impl, T0: np.ndarray, repeat: int) -> float:
    rng = np.random.default_rng(1)
    rows = rng.integers(0, T0.shape[0], size=repeat)
    cols = rng.integers(0, T0.shape[1], size=repeat)
    T = T0.copy()
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for r, c in zip(rows, cols):
            if abs(T[r, c]) < 1e-9:  # keep the pivot well defined
                T[r, c] = 1.0
            impl.pivot_update(T, int(r), int(c))
        best = min(best, time.perf_counter() - t0)
        T = T0.copy()
    return best / repeat


def time_mlmax(impl, z: np.ndarray, V: np.ndarray, repeat: int) -> float:
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            impl.multilinear_max(z, V)
        best = min(best, time.perf_counter() - t0)
    return best / repeat


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'case':34s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for rows, cols in ((40, 80), (120, 240), (300, 600)):
        T0 = rng.standard_normal((rows, cols))
        tp = time_pivot(pykernels, T0, args.repeat)
        line = f"pivot_update {rows}x{cols:<18d} {tp * 1e6:10.2f}us"
        if ckernels is not None:
            tc = time_pivot(ckernels, T0, args.repeat)
            line += f" {tc * 1e6:10.2f}us {tp / tc:8.2f}x"
        print(line)

    for n, d, K in ((3, 3, 8), (4, 3, 16), (4, 4, 16)):
        z = rng.standard_normal((n,) * d)
        V = rng.standard_normal((K, n))
        tp = time_mlmax(pykernels, z, V, max(args.repeat // 4, 10))
        line = f"multilinear_max n={n} d={d} K={K:<10d} {tp * 1e6:10.2f}us"
        if ckernels is not None:
            tc = time_mlmax(ckernels, z, V, max(args.repeat // 4, 10))
            line += f" {tc * 1e6:10.2f}us {tp / tc:8.2f}x"
        print(line)

    if ckernels is None:
        print("compiled kernels unavailable; timings cover the fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
