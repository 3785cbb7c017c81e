"""Invariant checks with collect-all semantics.

Used by ingest so a bad file reports every violation (id + rule) instead of
stopping at the first. Operations reuse the same predicates for their
single-error preconditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from urbanlens.geometry import point_in_polygon, signed_ring_area
from urbanlens.model import (
    Building,
    CityScene,
    CommunityRecord,
    GeoPoint,
    Polygon,
    Polyline,
    RoadSegment,
    TerrainGrid,
)

LAYER_KINDS = {"terrain", "buildings", "roads", "metro", "communities", "analysis-result"}


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str        # object family, e.g. "building"
    object_id: str
    rule: str        # short rule name, e.g. "height > 0"
    message: str

    def __str__(self) -> str:
        return f"{self.kind} {self.object_id!r} violates [{self.rule}]: {self.message}"


def _finite_xy(points) -> bool:
    return all(math.isfinite(p.x) and math.isfinite(p.y) and math.isfinite(p.z)
               for p in points)


def _segments_properly_intersect(p1, p2, p3, p4) -> bool:
    """True if segment p1p2 crosses p3p4 at a point interior to both."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and \
        d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


def polygon_rules(p: Polygon) -> list[str]:
    """Violated rule descriptions for one ring (empty when valid)."""
    problems: list[str] = []
    ring = p.ring
    if len(ring) < 3:
        return [f"ring needs >= 3 vertices, has {len(ring)}"]
    if not _finite_xy(ring):
        return ["ring coordinates must be finite"]
    if len({(v.x, v.y) for v in ring}) != len(ring):
        problems.append("ring vertices must be distinct")
    area = signed_ring_area(ring)
    if area == 0:
        problems.append("ring area must be nonzero")
    elif area < 0:
        problems.append("ring must wind counter-clockwise")
    n = len(ring)
    pts = [(v.x, v.y) for v in ring]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex
            if _segments_properly_intersect(pts[i], pts[(i + 1) % n],
                                            pts[j], pts[(j + 1) % n]):
                problems.append(f"ring self-intersects (edges {i} and {j})")
                return problems
    return problems


def polyline_rules(line: Polyline) -> list[str]:
    problems: list[str] = []
    verts = line.vertices
    if len(verts) < 2:
        return [f"polyline needs >= 2 vertices, has {len(verts)}"]
    if not _finite_xy(verts):
        return ["polyline coordinates must be finite"]
    for i in range(len(verts) - 1):
        if (verts[i].x, verts[i].y) == (verts[i + 1].x, verts[i + 1].y):
            problems.append(f"consecutive vertices {i} and {i + 1} coincide")
    return problems


def building_rules(b: Building) -> list[str]:
    problems = [f"footprint: {msg}" for msg in polygon_rules(b.footprint)]
    if not (math.isfinite(b.height) and b.height > 0):
        problems.append(f"height > 0 required, got {b.height}")
    if not math.isfinite(b.base_elevation):
        problems.append("base_elevation must be finite")
    if not problems:
        z0, z1 = b.base_elevation, b.base_elevation + b.height
        for i, room in enumerate(b.rooms):
            if not (room.min_x <= room.max_x and room.min_y <= room.max_y
                    and room.min_z <= room.max_z):
                problems.append(f"room {i}: min must not exceed max")
                continue
            if room.min_z < z0 - 1e-9 or room.max_z > z1 + 1e-9:
                problems.append(f"room {i}: outside prism z range [{z0}, {z1}]")
            corners = [(room.min_x, room.min_y), (room.min_x, room.max_y),
                       (room.max_x, room.min_y), (room.max_x, room.max_y)]
            if not all(point_in_polygon(GeoPoint(x, y), b.footprint) for x, y in corners):
                problems.append(f"room {i}: footprint does not contain the room")
    return problems


def road_rules(r: RoadSegment) -> list[str]:
    problems = [f"path: {msg}" for msg in polyline_rules(r.path)]
    if r.lanes < 1:
        problems.append(f"lanes >= 1 required, got {r.lanes}")
    if not (math.isfinite(r.free_flow_speed) and r.free_flow_speed > 0):
        problems.append(f"free_flow_speed > 0 required, got {r.free_flow_speed}")
    return problems


def community_rules(c: CommunityRecord) -> list[str]:
    problems = [f"boundary: {msg}" for msg in polygon_rules(c.boundary)]
    if c.population < 0:
        problems.append(f"population >= 0 required, got {c.population}")
    for name, bins in (("age", c.age_bins), ("education", c.education_bins)):
        if any(v < 0 for v in bins.values()):
            problems.append(f"{name} bins must be non-negative")
        elif sum(bins.values()) != c.population:
            problems.append(
                f"{name} bins sum to {sum(bins.values())}, population is {c.population}"
            )
    return problems


def terrain_rules(t: TerrainGrid) -> list[str]:
    problems: list[str] = []
    if not (math.isfinite(t.cell_size) and t.cell_size > 0):
        problems.append(f"cell_size > 0 required, got {t.cell_size}")
    if t.n_cols < 2 or t.n_rows < 2:
        problems.append(f"grid must be at least 2x2, got {t.n_cols}x{t.n_rows}")
    if t.elevations.shape != (t.n_cols * t.n_rows,):
        problems.append(
            f"elevations length {t.elevations.shape[0]} != n_cols*n_rows "
            f"{t.n_cols * t.n_rows}"
        )
    elif not bool(np.isfinite(t.elevations).all()):
        problems.append("elevations must all be finite")
    return problems


def validate_scene(scene: CityScene) -> list[Violation]:
    """All invariant violations in the scene, in a stable order."""
    out: list[Violation] = []
    out.extend(Violation("terrain", "terrain", rule, rule)
               for rule in terrain_rules(scene.terrain))
    if not (-90 <= scene.geo_anchor.lat <= 90 and -180 <= scene.geo_anchor.lon <= 180):
        out.append(Violation("scene", "geo_anchor", "lat/lon in range",
                             f"({scene.geo_anchor.lat}, {scene.geo_anchor.lon})"))

    for family, items, rules in (
        ("building", scene.buildings, building_rules),
        ("road", scene.roads, road_rules),
        ("community", scene.communities, community_rules),
    ):
        seen: set[str] = set()
        for obj in items:
            if obj.id in seen:
                out.append(Violation(family, obj.id, "unique id",
                                     f"duplicate {family} id"))
            seen.add(obj.id)
            out.extend(Violation(family, obj.id, _short(rule), rule)
                       for rule in rules(obj))

    seen_metro: set[str] = set()
    for line in scene.metro_lines:
        if line.id in seen_metro:
            out.append(Violation("metro", line.id, "unique id", "duplicate metro id"))
        seen_metro.add(line.id)
        out.extend(Violation("metro", line.id, _short(rule), rule)
                   for rule in polyline_rules(line.path))

    seen_layers: set[str] = set()
    for node in scene.layer_root.walk():
        if node.id in seen_layers:
            out.append(Violation("layer", node.id, "unique id", "duplicate layer id"))
        seen_layers.add(node.id)
        if node.kind not in LAYER_KINDS:
            out.append(Violation("layer", node.id, "known kind",
                                 f"unknown layer kind {node.kind!r}"))
    return out


def _short(rule: str) -> str:
    return rule.split(",")[0][:60]
