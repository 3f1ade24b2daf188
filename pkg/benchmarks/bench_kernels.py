"""Benchmark the numba kernels against the fallback path.

Runs itself twice as a subprocess (GUIDESIM_NO_NUMBA unset/set) so each
variant is timed in a clean interpreter after an explicit warmup, then
prints a comparison table.

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_single(reps: int) -> dict:
    from guidesim import kernels

    kernels.warmup()
    rng = np.random.default_rng(2024)
    n_points, n_samples = 200_000, 100
    px = rng.uniform(0, 10, n_points)
    py = rng.uniform(0, 8, n_points)
    sx = rng.uniform(0, 10, n_samples)
    sy = rng.uniform(0, 8, n_samples)
    kernels.knn_nearest(px[:100], py[:100], sx, sy, 3.0)
    start = time.perf_counter()
    for _ in range(reps):
        idx = kernels.knn_nearest(px, py, sx, sy, 3.0)
    knn_s = (time.perf_counter() - start) / reps
    checksum = int(idx.sum())

    occ = np.zeros((80, 100), dtype=np.uint8)
    occ[10:70, 30:32] = 1
    occ[20:80, 60:62] = 1
    occ[0:50, 45:47] = 1
    kernels.astar_cells(occ, 1, 1, 78, 98)
    solves = 200 * reps
    start = time.perf_counter()
    total = 0
    for i in range(solves):
        path = kernels.astar_cells(occ, 1 + (i % 5), 1, 78, 98 - (i % 7))
        total += len(path)
    astar_s = (time.perf_counter() - start) / solves
    return {
        "variant": "numba" if kernels.NUMBA_ACTIVE else "fallback",
        "knn_s_per_call": knn_s,
        "knn_points": n_points,
        "astar_s_per_solve": astar_s,
        "astar_path_cells": total // solves,
        "checksum": checksum,
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--single", action="store_true", help="time the active variant only")
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()
    if args.single:
        print(json.dumps(bench_single(args.reps)))
        return 0
    results = {}
    for label, disable in (("numba", "0"), ("fallback", "1")):
        env = dict(os.environ, GUIDESIM_NO_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, __file__, "--single", "--reps", str(args.reps)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])
    if results["numba"]["checksum"] != results["fallback"]["checksum"]:
        print("WARNING: variants disagree on the k-NN checksum")
    print(f"{'kernel':<28}{'numba':>14}{'fallback':>14}{'speedup':>10}")
    for key, name in (
        ("knn_s_per_call", f"1-NN batch ({results['numba']['knn_points']} pts)"),
        ("astar_s_per_solve", "A* solve (80x100 grid)"),
    ):
        a, b = results["numba"][key], results["fallback"][key]
        print(f"{name:<28}{a * 1e3:>11.3f} ms{b * 1e3:>11.3f} ms{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
