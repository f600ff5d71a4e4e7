#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the two hot kernels and a full channel synthesis under both backends
and prints a timing table.  Backend selection is the same mechanism the
library uses at import time (MMGBSM_BACKEND), switched here at runtime.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from mmgbsm import ScenarioConfig, build_scenario, set_backend, synthesize
from mmgbsm._kernels import ray_sum_series, triple_outer_sum, warm_up
from mmgbsm.channel import draw_tracks


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def make_cases():
    rng = np.random.default_rng(0)
    phase0 = rng.uniform(-np.pi, np.pi, (2000, 20))
    omega = rng.uniform(-550.0, 550.0, (2000, 20))
    times = np.linspace(0.0, 0.37, 256)
    u = np.exp(1j * rng.uniform(-np.pi, np.pi, (20, 128)))
    v = np.exp(1j * rng.uniform(-np.pi, np.pi, (20, 10)))
    w = np.exp(1j * rng.uniform(-np.pi, np.pi, (20, 256)))
    scenario = build_scenario(ScenarioConfig())
    tracks = draw_tracks(scenario, np.random.default_rng(1))
    return {
        "ray_sum_series (2000x20x256)": lambda: ray_sum_series(phase0, omega, times),
        "triple_outer_sum (20x10x128x256)": lambda: triple_outer_sum(u, v, w),
        "synthesize (10,128,21,256)": lambda: synthesize(scenario, tracks=tracks),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    cases = make_cases()
    results = {}
    for backend in ("numpy", "numba"):
        try:
            set_backend(backend)
        except ImportError:
            print(f"skipping {backend}: not importable")
            continue
        warm_up()
        for name, fn in cases.items():
            fn()  # warm caches / JIT on the real shapes
            results[(backend, name)] = best_of(fn, args.repeats)

    width = max(len(name) for name in cases)
    print(f"{'case':<{width}}  {'numpy':>9}  {'numba':>9}  {'speedup':>7}")
    for name in cases:
        t_np = results.get(("numpy", name))
        t_nb = results.get(("numba", name))
        if t_np is None or t_nb is None:
            continue
        print(f"{name:<{width}}  {t_np * 1e3:8.1f}ms  {t_nb * 1e3:8.1f}ms  {t_np / t_nb:6.1f}x")


if __name__ == "__main__":
    main()
