#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-NumPy fallbacks.

Runs each kernel pair at desk scale (PhysioNet-like 4000 x 48 x 37 by
default) and prints a comparison table. The numba column includes a warmup
call so JIT compilation does not pollute the timings.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""

import argparse
import time

import numpy as np

from maskbench import _kernels


def timeit(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=4000)
    parser.add_argument("--steps", type=int, default=48)
    parser.add_argument("--features", type=int, default=37)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    shape = (args.samples, args.steps, args.features)
    values = rng.standard_normal(shape)
    observed = rng.random(shape) < 0.7
    imputed = values + rng.standard_normal(shape) * 0.3
    u = rng.random(shape)
    z = np.abs(values)

    cases = [
        ("locf_fill", "_locf_fill", (values, observed, 0.0)),
        ("ar1_recurrence", "_ar1_recurrence", (values, 0.9)),
        ("masked_error_sums", "_masked_error_sums", (values, imputed, observed)),
        ("followup_scan", "_followup_scan", (observed, z, u, 2.0, 0.9)),
    ]

    print(f"grid {shape}, best of {args.repeat}; numba available: "
          f"{_kernels.HAVE_NUMBA} (active backend: {_kernels.BACKEND})")
    print(f"{'kernel':<20} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}")
    for name, stem, call_args in cases:
        np_fn = getattr(_kernels, stem + "_np")
        t_np = timeit(np_fn, call_args, args.repeat) * 1e3
        if _kernels.HAVE_NUMBA:
            nb_fn = getattr(_kernels, stem + "_nb")
            nb_fn(*call_args)  # warmup / compile
            t_nb = timeit(nb_fn, call_args, args.repeat) * 1e3
            print(f"{name:<20} {t_np:>12.2f} {t_nb:>12.2f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<20} {t_np:>12.2f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
