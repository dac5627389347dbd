"""Timing comparison of the jit-compiled and pure-numpy kernel builds.

Run as a script:

    python3 benchmarks/bench_kernels.py [--sizes 1000,100000] [--repeat 7]

Prints one table row per (kernel, batch size): median wall time of each
build and the speedup of the jit build.  The jit build is warmed up before
timing so compilation cost is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ultrabeta import kernels


def median_time(fn, args, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1000,10000,100000",
                    help="comma-separated batch sizes")
    ap.add_argument("--rows", type=int, default=6, help="row length")
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    j = args.rows
    rng = np.random.default_rng(0)

    if not kernels.USE_NUMBA:
        print("note: ULTRABETA_NO_NUMBA is set; both columns use the numpy build")

    header = f"{'kernel':24} {'batch':>8} {'numpy (ms)':>11} {'jit (ms)':>9} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        lower = np.sort(rng.normal(size=(n, j)), axis=1)
        upper = np.sort(rng.normal(size=(n, j + 1)), axis=1)
        # keep the rows strictly separated so every log argument is nonzero
        upper[:, 1:] += np.arange(1, j + 1) * 3.0
        coef = rng.uniform(0.5, 1.5, size=j)
        tri = np.cumsum(rng.uniform(0.1, 1.0, size=(n, j)), axis=1)
        coef2 = np.triu(rng.uniform(0.5, 1.5, size=(j, j)), 1)

        cases = [
            ("pair_log_abs_sum",
             kernels.numpy_pair_log_abs_sum, kernels.pair_log_abs_sum,
             (lower, upper, coef)),
            ("vandermonde_log_sum",
             kernels.numpy_vandermonde_log_sum, kernels.vandermonde_log_sum,
             (tri, coef2)),
        ]
        for name, np_fn, jit_fn, data in cases:
            jit_fn(*data)  # warm-up / compile
            np.testing.assert_allclose(jit_fn(*data), np_fn(*data), rtol=1e-12)
            t_np = median_time(np_fn, data, args.repeat)
            t_jit = median_time(jit_fn, data, args.repeat)
            print(f"{name:24} {n:>8} {t_np * 1e3:>11.3f} {t_jit * 1e3:>9.3f} "
                  f"{t_np / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()
