"""Planar geometry primitives and 3D symbolization of flat GIS data.

Convention: polygon boundaries count as inside, so containment and buffer
predicates are closed sets. All distances are planar (z ignored) unless a
function says otherwise.
"""

from __future__ import annotations

import math

import numpy as np

from urbanlens import kernels
from urbanlens.errors import InvalidGeometryError
from urbanlens.model import Building, GeoPoint, Mesh, Polygon, Polyline


def polygon_area(p: Polygon) -> float:
    """Shoelace area in square meters.

    Vertices are re-anchored at the first vertex before summing, which keeps
    the result stable under large translations of the frame.
    """
    ring = p.ring
    distinct = {(v.x, v.y) for v in ring}
    if len(distinct) < 3:
        raise InvalidGeometryError(f"degenerate polygon: {len(distinct)} distinct vertices")
    x0, y0 = ring[0].x, ring[0].y
    acc = 0.0
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i].x - x0, ring[i].y - y0
        bx, by = ring[(i + 1) % n].x - x0, ring[(i + 1) % n].y - y0
        acc += ax * by - ay * bx
    return abs(acc) * 0.5


def signed_ring_area(ring: tuple[GeoPoint, ...]) -> float:
    """Signed shoelace area: positive for counter-clockwise rings."""
    x0, y0 = ring[0].x, ring[0].y
    acc = 0.0
    n = len(ring)
    for i in range(n):
        ax, ay = ring[i].x - x0, ring[i].y - y0
        bx, by = ring[(i + 1) % n].x - x0, ring[(i + 1) % n].y - y0
        acc += ax * by - ay * bx
    return acc * 0.5


def point_in_polygon(pt: GeoPoint, p: Polygon) -> bool:
    """True iff pt is strictly inside or on the boundary of p."""
    xy = p.xy()
    res = kernels.points_in_polygon(
        np.array([pt.x]), np.array([pt.y]), xy[:, 0], xy[:, 1]
    )
    return bool(res[0])


def point_segment_distance(px: float, py: float,
                           ax: float, ay: float, bx: float, by: float) -> float:
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy
    if len2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / len2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_polyline_distance(pt: GeoPoint, line: Polyline) -> float:
    """Minimum planar distance from pt to any segment of the polyline."""
    xy = line.xy()
    res = kernels.points_polyline_distance(
        np.array([pt.x]), np.array([pt.y]), xy[:, 0], xy[:, 1]
    )
    return float(res[0])


def project_onto_polyline(pt: GeoPoint, line: Polyline) -> float:
    """Arc-length position (chainage) of the closest point on the polyline."""
    verts = line.vertices
    best_d = math.inf
    best_chain = 0.0
    chain = 0.0
    for i in range(len(verts) - 1):
        ax, ay = verts[i].x, verts[i].y
        bx, by = verts[i + 1].x, verts[i + 1].y
        seg_len = math.hypot(bx - ax, by - ay)
        d = point_segment_distance(pt.x, pt.y, ax, ay, bx, by)
        if d < best_d:
            dx, dy = bx - ax, by - ay
            len2 = dx * dx + dy * dy
            t = 0.0 if len2 == 0.0 else min(1.0, max(0.0, ((pt.x - ax) * dx + (pt.y - ay) * dy) / len2))
            best_d = d
            best_chain = chain + t * seg_len
        chain += seg_len
    return best_chain


def polyline_length(line: Polyline) -> float:
    xy = line.xy()
    return float(np.sum(np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))))


def _triangle_contains(ax, ay, bx, by, cx, cy, px, py) -> bool:
    # closed containment via consistent half-plane signs (abc is CCW)
    d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
    d3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
    return d1 >= 0 and d2 >= 0 and d3 >= 0


def ear_clip(p: Polygon) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon by ear clipping.

    Returns index triples into p.ring, each with strictly positive area, so
    collinear vertices never produce degenerate triangles.
    """
    ring = p.ring
    n = len(ring)
    if n < 3:
        raise InvalidGeometryError("polygon needs at least 3 vertices")
    if signed_ring_area(ring) <= 0:
        raise InvalidGeometryError("polygon ring must be counter-clockwise with nonzero area")
    xs = [v.x for v in ring]
    ys = [v.y for v in ring]
    idx = list(range(n))
    triangles: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 2 * n * n:
            raise InvalidGeometryError("ear clipping failed; polygon is likely not simple")
        m = len(idx)
        clipped = False
        for k in range(m):
            ia, ib, ic = idx[k - 1], idx[k], idx[(k + 1) % m]
            ax, ay, bx, by, cx, cy = xs[ia], ys[ia], xs[ib], ys[ib], xs[ic], ys[ic]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if cross <= 1e-12:
                continue  # reflex or collinear corner, not an ear
            blocked = False
            for other in idx:
                if other in (ia, ib, ic):
                    continue
                if _triangle_contains(ax, ay, bx, by, cx, cy, xs[other], ys[other]):
                    blocked = True
                    break
            if not blocked:
                triangles.append((ia, ib, ic))
                del idx[k]
                clipped = True
                break
        if not clipped:
            raise InvalidGeometryError("no ear found; polygon is not simple")
    ia, ib, ic = idx
    ax, ay, bx, by, cx, cy = xs[ia], ys[ia], xs[ib], ys[ib], xs[ic], ys[ic]
    if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) <= 0:
        raise InvalidGeometryError("degenerate final triangle; polygon is not simple")
    triangles.append((ia, ib, ic))
    return triangles


def extrude_building(b: Building) -> Mesh:
    """Closed prism mesh for a building: n footprint vertices -> 2n mesh vertices.

    Bottom ring first (z = base_elevation), then top ring (z = base + height).
    Side walls are two triangles per footprint edge with outward normals;
    caps are ear-clipped, top facing up, bottom facing down.
    """
    if b.height <= 0:
        raise InvalidGeometryError(f"building {b.id}: height must be positive")
    ring = b.footprint.ring
    cap = ear_clip(b.footprint)  # validates the footprint
    n = len(ring)
    z0 = b.base_elevation
    z1 = b.base_elevation + b.height
    vertices = tuple(
        [GeoPoint(v.x, v.y, z0) for v in ring] + [GeoPoint(v.x, v.y, z1) for v in ring]
    )
    triangles: list[tuple[int, int, int]] = []
    for i in range(n):
        j = (i + 1) % n
        triangles.append((i, j, n + j))
        triangles.append((i, n + j, n + i))
    for (a, bb, c) in cap:
        triangles.append((n + a, n + bb, n + c))  # top cap, normal up
        triangles.append((a, c, bb))              # bottom cap, normal down
    return Mesh(vertices=vertices, triangles=tuple(triangles))


def mesh_volume(mesh: Mesh) -> float:
    """Signed volume by the divergence theorem; positive for outward normals."""
    total = 0.0
    verts = mesh.vertices
    for (a, b, c) in mesh.triangles:
        va, vb, vc = verts[a], verts[b], verts[c]
        total += (
            va.x * (vb.y * vc.z - vb.z * vc.y)
            - va.y * (vb.x * vc.z - vb.z * vc.x)
            + va.z * (vb.x * vc.y - vb.y * vc.x)
        )
    return total / 6.0


def mesh_is_watertight(mesh: Mesh) -> bool:
    """Every undirected edge must be shared by exactly two triangles."""
    counts: dict[tuple[int, int], int] = {}
    for (a, b, c) in mesh.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            counts[key] = counts.get(key, 0) + 1
    return all(v == 2 for v in counts.values())


def segment_prism_entry(footprint: Polygon, z_base: float, z_top: float,
                        p0: GeoPoint, p1: GeoPoint,
                        t_min: float, t_max: float) -> float | None:
    """Earliest parameter t in [t_min, t_max] where segment p0->p1 is inside
    the extruded prism, or None if it stays outside.

    Works for any simple footprint: breakpoints are collected where the 2D
    projection crosses a footprint edge and where z crosses the base/top
    planes, then each sub-interval's midpoint is classified.
    """
    if t_min >= t_max:
        return None
    dx, dy, dz = p1.x - p0.x, p1.y - p0.y, p1.z - p0.z
    ring = footprint.ring
    n = len(ring)
    breaks = [t_min, t_max]
    for i in range(n):
        ax, ay = ring[i].x, ring[i].y
        ex, ey = ring[(i + 1) % n].x - ax, ring[(i + 1) % n].y - ay
        denom = dx * ey - dy * ex
        if denom == 0.0:
            continue
        rx, ry = ax - p0.x, ay - p0.y
        t = (rx * ey - ry * ex) / denom
        s = (rx * dy - ry * dx) / denom
        if -1e-12 <= s <= 1.0 + 1e-12 and t_min < t < t_max:
            breaks.append(t)
    if dz != 0.0:
        for plane in (z_base, z_top):
            t = (plane - p0.z) / dz
            if t_min < t < t_max:
                breaks.append(t)
    breaks.sort()
    xy = footprint.xy()
    for ta, tb in zip(breaks, breaks[1:]):
        if tb - ta <= 1e-15:
            continue
        tm = (ta + tb) * 0.5
        z = p0.z + tm * dz
        if not (z_base <= z <= z_top):
            continue
        inside = kernels.points_in_polygon(
            np.array([p0.x + tm * dx]), np.array([p0.y + tm * dy]),
            xy[:, 0], xy[:, 1],
        )
        if inside[0]:
            return ta
    return None


def polygon_bbox(p: Polygon) -> tuple[float, float, float, float]:
    xy = p.xy()
    return (
        float(xy[:, 0].min()), float(xy[:, 1].min()),
        float(xy[:, 0].max()), float(xy[:, 1].max()),
    )


def polyline_bbox(line: Polyline) -> tuple[float, float, float, float]:
    xy = line.xy()
    return (
        float(xy[:, 0].min()), float(xy[:, 1].min()),
        float(xy[:, 0].max()), float(xy[:, 1].max()),
    )
