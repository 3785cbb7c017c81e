"""Compiled and numpy kernel backends must agree bit-for-bit.

Skipped when the extension was not built; the suite then runs entirely on
the fallback, which the rest of the tests already exercise.
"""

import numpy as np
import pytest

from urbanlens import _kernels_py as py_k

c_k = pytest.importorskip("urbanlens._ckernels")


def build_arrays(rng, n, fanout=16):
    from urbanlens.spatial import Aabb, SpatialIndex
    lo = rng.uniform(0, 2000, (n, 2))
    size = rng.uniform(0.5, 60, (n, 2))
    entries = [(f"e{i}", Aabb(lo[i, 0], lo[i, 1], lo[i, 0] + size[i, 0],
                              lo[i, 1] + size[i, 1])) for i in range(n)]
    idx = SpatialIndex.build(entries, fanout=fanout)
    return idx


class TestQueryRangeParity:
    @pytest.mark.parametrize("n", [1, 5, 16, 17, 257, 5000])
    def test_identical_positions(self, n):
        rng = np.random.default_rng(n)
        idx = build_arrays(rng, n)
        for _ in range(60):
            cx, cy = rng.uniform(-100, 2100, 2)
            w, h = rng.uniform(1, 500, 2)
            args = (idx._level_boxes, idx._level_start, idx._level_count,
                    idx._entry_boxes, cx, cy, cx + w, cy + h)
            assert np.array_equal(c_k.query_range(*args), py_k.query_range(*args))


class TestGeometryParity:
    def test_points_in_polygon_identical(self):
        rng = np.random.default_rng(2)
        for n_ring in (3, 4, 9, 24):
            angles = np.sort(rng.uniform(0, 2 * np.pi, n_ring))
            rx = 50 + 40 * np.cos(angles)
            ry = 50 + 40 * np.sin(angles)
            px = rng.uniform(0, 100, 4000)
            py = rng.uniform(0, 100, 4000)
            # include exact vertices and edge midpoints (boundary cases)
            px = np.concatenate([px, rx, (rx + np.roll(rx, -1)) / 2])
            py = np.concatenate([py, ry, (ry + np.roll(ry, -1)) / 2])
            a = c_k.points_in_polygon(px, py, rx, ry)
            b = py_k.points_in_polygon(px, py, rx, ry)
            assert np.array_equal(np.asarray(a, bool), np.asarray(b, bool))

    def test_polyline_distance_identical(self):
        rng = np.random.default_rng(3)
        vx = np.cumsum(rng.uniform(1, 30, 8))
        vy = np.cumsum(rng.uniform(-20, 20, 8))
        px = rng.uniform(-50, 300, 5000)
        py = rng.uniform(-100, 100, 5000)
        a = c_k.points_polyline_distance(px, py, vx, vy)
        b = py_k.points_polyline_distance(px, py, vx, vy)
        assert np.array_equal(a, b)

    def test_bilinear_identical(self):
        rng = np.random.default_rng(4)
        n_cols, n_rows, cell = 40, 30, 12.5
        elev = rng.uniform(-50, 300, n_cols * n_rows)
        xs = rng.uniform(0, (n_cols - 1) * cell, 8000)
        ys = rng.uniform(0, (n_rows - 1) * cell, 8000)
        a = c_k.bilinear(elev, n_cols, n_rows, 0.0, 0.0, cell, xs, ys)
        b = py_k.bilinear(elev, n_cols, n_rows, 0.0, 0.0, cell, xs, ys)
        assert np.array_equal(a, b)

    def test_terrain_first_hit_identical(self):
        rng = np.random.default_rng(5)
        n_cols = n_rows = 50
        cell = 10.0
        elev = rng.uniform(0, 40, n_cols * n_rows)
        for _ in range(300):
            x0, y0 = rng.uniform(0, 490, 2)
            x1, y1 = rng.uniform(0, 490, 2)
            z0, z1 = rng.uniform(-10, 80, 2)
            nsteps = int(rng.integers(2, 200))
            a = c_k.terrain_first_hit(elev, n_cols, n_rows, 0.0, 0.0, cell,
                                      x0, y0, z0, x1, y1, z1, nsteps)
            b = py_k.terrain_first_hit(elev, n_cols, n_rows, 0.0, 0.0, cell,
                                       x0, y0, z0, x1, y1, z1, nsteps)
            assert a == b
