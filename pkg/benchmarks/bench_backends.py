#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the three hot kernels at full-scale problem sizes and prints the
per-call times of both backends.  Usage:

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from squintsim import kernels


def _time(fn, repeat):
    fn()  # warm-up (includes JIT compilation on the numba path)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n_paths, n_subc = 4, 128
    weights = rng.standard_normal((n_paths, n_subc)) + 1j * rng.standard_normal((n_paths, n_subc))
    ratios = 1.0 + 0.05 * rng.uniform(-1.0, 1.0, n_subc)
    coords = [rng.uniform(-1.0, 1.0, n_paths) for _ in range(4)]
    rx_params = (64, 64, 0.5, 0.5)   # 4096-antenna receive array
    tx_params = (4, 4, 0.5, 0.5)

    offsets = np.linspace(-2.0, 2.0, 1601)
    delays = rng.uniform(0.0, 31e-9, 64)

    cases = [
        (
            "channel_matrices (K=128, 4096x16, 4 paths)",
            lambda: kernels.channel_matrices(
                weights, ratios, coords[0], coords[1], coords[2], coords[3], rx_params, tx_params
            ),
        ),
        (
            "pattern_grid (1601x1601, 160x80 array)",
            lambda: kernels.pattern_grid(160, 0.5, 80, 0.5, offsets, offsets),
        ),
        (
            "pulse_taps (64 delays x 32 taps)",
            lambda: kernels.pulse_taps(delays, 32, 1e-9, 1.0),
        ),
    ]

    results = {}
    for backend in ("numpy", "numba"):
        try:
            kernels.set_backend(backend)
        except kernels.BackendError as exc:
            print(f"skipping {backend}: {exc}")
            continue
        for name, fn in cases:
            results[(backend, name)] = _time(fn, args.repeat)

    print(f"{'kernel':<45} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, _ in cases:
        t_np = results.get(("numpy", name))
        t_nb = results.get(("numba", name))
        if t_np is None or t_nb is None:
            continue
        print(f"{name:<45} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.2f}x")


if __name__ == "__main__":
    main()
