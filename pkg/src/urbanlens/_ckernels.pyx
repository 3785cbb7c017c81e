# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; must stay op-for-op identical to _kernels_py.py.

Compiled with -ffp-contract=off so float results match numpy bit for bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()

BACKEND = "c"


def query_range(list level_boxes, list level_start, list level_count,
                cnp.ndarray entry_boxes_arr,
                double qminx, double qminy, double qmaxx, double qmaxy):
    cdef double[:, ::1] entry_boxes = np.ascontiguousarray(entry_boxes_arr)
    cdef Py_ssize_t n_entries = entry_boxes.shape[0]
    if n_entries == 0:
        return np.empty(0, dtype=np.int64)

    cdef int n_levels = len(level_boxes)
    cdef int top = n_levels - 1

    # stack capacity: one slot per node in the tree is always enough
    cdef Py_ssize_t cap = 0
    cdef int lv
    for lv in range(n_levels):
        cap += (<cnp.ndarray> level_boxes[lv]).shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack_level = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack_idx = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n_entries, dtype=np.int64)

    cdef double[:, ::1] boxes
    cdef cnp.int64_t[::1] starts
    cdef cnp.int64_t[::1] counts
    cdef Py_ssize_t sp = 0, n_out = 0
    cdef Py_ssize_t i, child, start, count
    cdef int level

    boxes = level_boxes[top]
    for i in range(boxes.shape[0]):
        if boxes[i, 0] <= qmaxx and boxes[i, 2] >= qminx \
                and boxes[i, 1] <= qmaxy and boxes[i, 3] >= qminy:
            stack_level[sp] = top
            stack_idx[sp] = i
            sp += 1

    while sp > 0:
        sp -= 1
        level = <int> stack_level[sp]
        i = stack_idx[sp]
        starts = level_start[level]
        counts = level_count[level]
        start = starts[i]
        count = counts[i]
        if level == 0:
            for child in range(start, start + count):
                if entry_boxes[child, 0] <= qmaxx and entry_boxes[child, 2] >= qminx \
                        and entry_boxes[child, 1] <= qmaxy and entry_boxes[child, 3] >= qminy:
                    out[n_out] = child
                    n_out += 1
        else:
            boxes = level_boxes[level - 1]
            for child in range(start, start + count):
                if boxes[child, 0] <= qmaxx and boxes[child, 2] >= qminx \
                        and boxes[child, 1] <= qmaxy and boxes[child, 3] >= qminy:
                    stack_level[sp] = level - 1
                    stack_idx[sp] = child
                    sp += 1

    result = out[:n_out]
    result.sort()
    return result


def points_in_polygon(px_arr, py_arr, rx_arr, ry_arr):
    cdef double[::1] px = np.ascontiguousarray(px_arr, dtype=np.float64)
    cdef double[::1] py = np.ascontiguousarray(py_arr, dtype=np.float64)
    cdef double[::1] rx = np.ascontiguousarray(rx_arr, dtype=np.float64)
    cdef double[::1] ry = np.ascontiguousarray(ry_arr, dtype=np.float64)
    cdef Py_ssize_t m = px.shape[0]
    cdef Py_ssize_t n = rx.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1, cast=True] out = np.zeros(m, dtype=bool)
    cdef Py_ssize_t p, i, j
    cdef double x, y, xi, yi, xj, yj, cross, x_hit, lo, hi
    cdef bint inside, on_edge

    for p in range(m):
        x = px[p]
        y = py[p]
        inside = False
        on_edge = False
        j = n - 1
        for i in range(n):
            xi = rx[i]
            yi = ry[i]
            xj = rx[j]
            yj = ry[j]
            cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi)
            if cross == 0.0:
                lo = xi if xi < xj else xj
                hi = xj if xi < xj else xi
                if lo <= x <= hi:
                    lo = yi if yi < yj else yj
                    hi = yj if yi < yj else yi
                    if lo <= y <= hi:
                        on_edge = True
            if (yi > y) != (yj > y):
                x_hit = (xj - xi) * (y - yi) / (yj - yi) + xi
                if x < x_hit:
                    inside = not inside
            j = i
        out[p] = inside or on_edge
    return out


def points_polyline_distance(px_arr, py_arr, vx_arr, vy_arr):
    cdef double[::1] px = np.ascontiguousarray(px_arr, dtype=np.float64)
    cdef double[::1] py = np.ascontiguousarray(py_arr, dtype=np.float64)
    cdef double[::1] vx = np.ascontiguousarray(vx_arr, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(vy_arr, dtype=np.float64)
    cdef Py_ssize_t m = px.shape[0]
    cdef Py_ssize_t nseg = vx.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t p, i
    cdef double x, y, ax, ay, dx, dy, len2, t, ex, ey, d2, best

    for p in range(m):
        x = px[p]
        y = py[p]
        best = INFINITY
        for i in range(nseg):
            ax = vx[i]
            ay = vy[i]
            dx = vx[i + 1] - ax
            dy = vy[i + 1] - ay
            len2 = dx * dx + dy * dy
            t = ((x - ax) * dx + (y - ay) * dy) / len2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            ex = x - (ax + t * dx)
            ey = y - (ay + t * dy)
            d2 = ex * ex + ey * ey
            if d2 < best:
                best = d2
        out[p] = sqrt(best)
    return out


cdef inline double _bilinear_one(double[::1] elev, Py_ssize_t n_cols, Py_ssize_t n_rows,
                                 double ox, double oy, double cell,
                                 double x, double y) nogil:
    cdef double fx = (x - ox) / cell
    cdef double fy = (y - oy) / cell
    cdef Py_ssize_t col0 = <Py_ssize_t> fx
    cdef Py_ssize_t row0 = <Py_ssize_t> fy
    if fx < 0:
        col0 = 0
    elif col0 > n_cols - 2:
        col0 = n_cols - 2
    if fy < 0:
        row0 = 0
    elif row0 > n_rows - 2:
        row0 = n_rows - 2
    cdef double tx = fx - col0
    cdef double ty = fy - row0
    cdef Py_ssize_t base = row0 * n_cols + col0
    return (
        elev[base] * (1.0 - tx) * (1.0 - ty)
        + elev[base + 1] * tx * (1.0 - ty)
        + elev[base + n_cols] * (1.0 - tx) * ty
        + elev[base + n_cols + 1] * tx * ty
    )


def bilinear(elev_arr, n_cols, n_rows, double ox, double oy, double cell,
             xs_arr, ys_arr):
    cdef double[::1] elev = np.ascontiguousarray(elev_arr, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(xs_arr, dtype=np.float64)
    cdef double[::1] ys = np.ascontiguousarray(ys_arr, dtype=np.float64)
    cdef Py_ssize_t nc = n_cols
    cdef Py_ssize_t nr = n_rows
    cdef Py_ssize_t m = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = _bilinear_one(elev, nc, nr, ox, oy, cell, xs[i], ys[i])
    return out


def terrain_first_hit(elev_arr, n_cols, n_rows, double ox, double oy, double cell,
                      double x0, double y0, double z0,
                      double x1, double y1, double z1, nsteps):
    cdef double[::1] elev = np.ascontiguousarray(elev_arr, dtype=np.float64)
    cdef Py_ssize_t nc = n_cols
    cdef Py_ssize_t nr = n_rows
    cdef Py_ssize_t steps = nsteps
    if steps < 2:
        return -1.0
    cdef Py_ssize_t i
    cdef double t, x, y, z, ground
    for i in range(1, steps):
        t = i / (<double> steps)
        x = x0 + (x1 - x0) * t
        y = y0 + (y1 - y0) * t
        z = z0 + (z1 - z0) * t
        ground = _bilinear_one(elev, nc, nr, ox, oy, cell, x, y)
        if z < ground - 1e-9:
            return t
    return -1.0
