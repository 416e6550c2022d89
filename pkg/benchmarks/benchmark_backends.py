#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy reference path.

Usage: python benchmarks/benchmark_backends.py [--steps N]

The numpy path drives the structure-matrix right-hand side from a Python
loop; the numba path runs the fused @njit kernels end to end. Both produce
the same trajectories (see tests/test_kernels.py).
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np


def _bench(config, repeats=3):
    from vortexcyl.dynamics import integrate

    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        integrate(config)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=10_000)
    args = parser.parse_args()

    from vortexcyl import BodyParams, VortexSet
    from vortexcyl import _kernels
    from vortexcyl.dynamics import SimConfig, active_backend, integrate

    body = BodyParams(mass=np.pi, inertia=1.0, radius=1.0)
    scenarios = {
        "two vortices, momentum chart": SimConfig(
            chart="momentum",
            body=body,
            vortices=VortexSet([1.0, -1.0], [[3.0, 0.0], [0.0, 3.0]]),
            body_state=[0.0, 0.0, 0.0],
            dt=1e-3,
            t_end=args.steps * 1e-3,
            stride=max(1, args.steps // 100),
        ),
        "four vortices, velocity chart": SimConfig(
            chart="velocity",
            body=body,
            vortices=VortexSet(
                [1.0, -0.8, 0.6, -0.5],
                [[3.0, 0.0], [0.0, 3.0], [-2.8, 0.4], [0.3, -2.6]],
            ),
            body_state=[0.0, 0.05, -0.02],
            dt=1e-3,
            t_end=args.steps * 1e-3,
            stride=max(1, args.steps // 100),
        ),
    }

    if not _kernels.HAVE_NUMBA:
        print("numba not installed; timing the numpy path only")

    print(f"{args.steps} RK4 steps per scenario, best of 3\n")
    print(f"{'scenario':<34}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, cfg in scenarios.items():
        os.environ["VCL_PURE_NUMPY"] = "1"
        t_np = _bench(cfg)
        os.environ.pop("VCL_PURE_NUMPY")
        if _kernels.HAVE_NUMBA:
            integrate(cfg)  # compile outside the timed region
            t_nb = _bench(cfg)
            print(f"{name:<34}{t_np:>12.3f}{t_nb:>12.4f}{t_np / t_nb:>9.0f}x")
        else:
            print(f"{name:<34}{t_np:>12.3f}{'-':>12}{'-':>10}")
    print(f"\nactive backend without flags: {active_backend()}")


if __name__ == "__main__":
    main()
