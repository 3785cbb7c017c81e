#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the numpy fallback.

Covers the four hot kernels plus an end-to-end index comparison against a
naive pure-Python linear scan. Run:

    python3 benchmarks/bench_kernels.py [--entries 100000] [--queries 200]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from urbanlens import _kernels_py as py_k
from urbanlens.spatial import Aabb, SpatialIndex

try:
    from urbanlens import _ckernels as c_k
except ImportError:
    c_k = None


def timeit(fn, repeats=7):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples)


def fmt(seconds: float) -> str:
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.2f} s "


def row(name: str, c_time, py_time) -> None:
    speedup = "" if c_time is None else f"{py_time / c_time:6.1f}x"
    c_text = "    (absent)" if c_time is None else fmt(c_time)
    print(f"{name:<34} {c_text}   {fmt(py_time)}   {speedup}")


def bench_kernels(args) -> None:
    rng = np.random.default_rng(1)
    print(f"{'kernel':<34} {'compiled':>12}   {'numpy':>11}   speedup")

    # point-in-polygon batch
    angles = np.sort(rng.uniform(0, 2 * np.pi, 12))
    rx = 500 + 400 * np.cos(angles)
    ry = 500 + 400 * np.sin(angles)
    px = rng.uniform(0, 1000, args.points)
    py = rng.uniform(0, 1000, args.points)
    row(f"points_in_polygon ({args.points})",
        None if c_k is None else timeit(lambda: c_k.points_in_polygon(px, py, rx, ry)),
        timeit(lambda: py_k.points_in_polygon(px, py, rx, ry)))

    # point-to-polyline distances
    vx = np.cumsum(rng.uniform(10, 50, 12))
    vy = np.cumsum(rng.uniform(-30, 30, 12))
    row(f"points_polyline_distance ({args.points})",
        None if c_k is None else timeit(lambda: c_k.points_polyline_distance(px, py, vx, vy)),
        timeit(lambda: py_k.points_polyline_distance(px, py, vx, vy)))

    # bilinear terrain sampling
    n_cols = n_rows = 257
    elev = rng.uniform(0, 100, n_cols * n_rows)
    xs = rng.uniform(0, (n_cols - 1) * 10.0, args.points)
    ys = rng.uniform(0, (n_rows - 1) * 10.0, args.points)
    row(f"bilinear ({args.points})",
        None if c_k is None else timeit(
            lambda: c_k.bilinear(elev, n_cols, n_rows, 0.0, 0.0, 10.0, xs, ys)),
        timeit(lambda: py_k.bilinear(elev, n_cols, n_rows, 0.0, 0.0, 10.0, xs, ys)))

    # terrain ray march (single long ray, many steps)
    march_args = (elev, n_cols, n_rows, 0.0, 0.0, 10.0,
                  5.0, 5.0, 120.0, 2500.0, 2500.0, 120.0, 4000)
    row("terrain_first_hit (4000 steps)",
        None if c_k is None else timeit(lambda: c_k.terrain_first_hit(*march_args), 50),
        timeit(lambda: py_k.terrain_first_hit(*march_args), 50))


def bench_index(args) -> None:
    rng = np.random.default_rng(2)
    n = args.entries
    lo = rng.uniform(0, 8000, (n, 2))
    size = rng.uniform(2, 60, (n, 2))
    entries = [(f"b{i}", Aabb(lo[i, 0], lo[i, 1], lo[i, 0] + size[i, 0],
                              lo[i, 1] + size[i, 1])) for i in range(n)]
    idx = SpatialIndex.build(entries)
    boxes = [(b.min_x, b.min_y, b.max_x, b.max_y) for _, b in entries]
    windows = []
    for _ in range(args.queries):
        cx, cy = rng.uniform(0, 7700, 2)
        w, h = rng.uniform(50, 300, 2)
        windows.append(Aabb(cx, cy, cx + w, cy + h))

    def run_backend(backend):
        import urbanlens.spatial as spatial_mod
        old = spatial_mod.kernels
        spatial_mod.kernels = backend
        try:
            lat = []
            for window in windows:
                t0 = time.perf_counter()
                idx.query_range(window)
                lat.append(time.perf_counter() - t0)
            return statistics.median(lat)
        finally:
            spatial_mod.kernels = old

    def linear_scan_median():
        lat = []
        for window in windows[: min(30, len(windows))]:
            t0 = time.perf_counter()
            hits = []
            for name_box in boxes:
                if name_box[0] <= window.max_x and name_box[2] >= window.min_x \
                        and name_box[1] <= window.max_y and name_box[3] >= window.min_y:
                    hits.append(name_box)
            lat.append(time.perf_counter() - t0)
        return statistics.median(lat)

    print(f"\nR-tree range query over {n} boxes ({args.queries} queries, median):")
    if c_k is not None:
        print(f"  compiled kernels : {fmt(run_backend(c_k))}")
    print(f"  numpy fallback   : {fmt(run_backend(py_k))}")
    print(f"  naive linear scan: {fmt(linear_scan_median())}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--entries", type=int, default=100_000)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--points", type=int, default=200_000)
    args = parser.parse_args()
    if c_k is None:
        print("note: compiled extension not built; showing numpy fallback only\n")
    bench_kernels(args)
    bench_index(args)


if __name__ == "__main__":
    main()
