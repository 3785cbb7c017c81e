"""Numpy implementations of the hot kernels.

Fallback backend used when the compiled extension (`urbanlens._ckernels`)
is unavailable. Formulas are written op-for-op identical to the Cython
versions so both backends produce bit-identical results.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def query_range(level_boxes, level_start, level_count, entry_boxes,
                qminx, qminy, qmaxx, qmaxy):
    """Positions (ascending) of entries whose box intersects the closed window.

    ``level_boxes[-1]`` is the root level; each level's start/count spans index
    the level below, level 0 spans index ``entry_boxes`` rows.
    """
    if entry_boxes.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    top = len(level_boxes) - 1
    boxes = level_boxes[top]
    hit = np.nonzero(
        (boxes[:, 0] <= qmaxx) & (boxes[:, 2] >= qminx)
        & (boxes[:, 1] <= qmaxy) & (boxes[:, 3] >= qminy)
    )[0]
    for lev in range(top, -1, -1):
        if hit.size == 0:
            return np.empty(0, dtype=np.int64)
        child = _expand_spans(level_start[lev][hit], level_count[lev][hit])
        boxes = entry_boxes[child] if lev == 0 else level_boxes[lev - 1][child]
        mask = (
            (boxes[:, 0] <= qmaxx) & (boxes[:, 2] >= qminx)
            & (boxes[:, 1] <= qmaxy) & (boxes[:, 3] >= qminy)
        )
        hit = child[mask]
    return np.sort(hit)


def _expand_spans(starts, counts):
    """Concatenate ranges [start, start+count) without a Python loop."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    if starts.shape[0] > 1:
        boundaries = np.cumsum(counts)[:-1]
        out[boundaries] = starts[1:] - (starts[:-1] + counts[:-1] - 1)
    return np.cumsum(out)


def points_in_polygon(px, py, rx, ry):
    """Boundary-inclusive containment test for many points against one ring."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    n = rx.shape[0]
    inside = np.zeros(px.shape[0], dtype=bool)
    on_edge = np.zeros(px.shape[0], dtype=bool)
    j = n - 1
    for i in range(n):
        xi, yi = rx[i], ry[i]
        xj, yj = rx[j], ry[j]
        cross = (xj - xi) * (py - yi) - (yj - yi) * (px - xi)
        on_edge |= (
            (cross == 0.0)
            & (px >= min(xi, xj)) & (px <= max(xi, xj))
            & (py >= min(yi, yj)) & (py <= max(yi, yj))
        )
        crosses = (yi > py) != (yj > py)
        if yj != yi:
            x_hit = (xj - xi) * (py - yi) / (yj - yi) + xi
            inside ^= crosses & (px < x_hit)
        j = i
    return inside | on_edge


def points_polyline_distance(px, py, vx, vy):
    """Min planar distance from each point to the polyline (vx, vy)."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    best = np.full(px.shape[0], np.inf)
    for i in range(vx.shape[0] - 1):
        ax, ay = vx[i], vy[i]
        dx, dy = vx[i + 1] - ax, vy[i + 1] - ay
        len2 = dx * dx + dy * dy
        t = ((px - ax) * dx + (py - ay) * dy) / len2
        t = np.clip(t, 0.0, 1.0)
        ex = px - (ax + t * dx)
        ey = py - (ay + t * dy)
        d2 = ex * ex + ey * ey
        np.minimum(best, d2, out=best)
    return np.sqrt(best)


def bilinear(elev, n_cols, n_rows, ox, oy, cell, xs, ys):
    """Bilinear elevation samples; callers guarantee points are in extent."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    fx = (xs - ox) / cell
    fy = (ys - oy) / cell
    col0 = np.clip(np.floor(fx).astype(np.int64), 0, n_cols - 2)
    row0 = np.clip(np.floor(fy).astype(np.int64), 0, n_rows - 2)
    tx = fx - col0
    ty = fy - row0
    base = row0 * n_cols + col0
    z00 = elev[base]
    z10 = elev[base + 1]
    z01 = elev[base + n_cols]
    z11 = elev[base + n_cols + 1]
    return (
        z00 * (1.0 - tx) * (1.0 - ty)
        + z10 * tx * (1.0 - ty)
        + z01 * (1.0 - tx) * ty
        + z11 * tx * ty
    )


def terrain_first_hit(elev, n_cols, n_rows, ox, oy, cell,
                      x0, y0, z0, x1, y1, z1, nsteps):
    """First interior parameter t where the segment dips below the terrain.

    Samples t = i/nsteps for i in 1..nsteps-1; returns -1.0 when clear.
    """
    if nsteps < 2:
        return -1.0
    i = np.arange(1, nsteps)
    t = i / float(nsteps)
    xs = x0 + (x1 - x0) * t
    ys = y0 + (y1 - y0) * t
    zs = z0 + (z1 - z0) * t
    ground = bilinear(elev, n_cols, n_rows, ox, oy, cell, xs, ys)
    below = np.nonzero(zs < ground - 1e-9)[0]
    if below.size == 0:
        return -1.0
    return float(t[below[0]])
