"""Quadtree scene tiles over the local planar extent.

The scene extent (the terrain bounding square) is divided into 2^z x 2^z
tiles; tile (x, y) counts from the southwest corner. Below the detail zoom
buildings ship as footprint + height; at or above it they carry full
meshes and rooms, implementing the building -> room drill-down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from urbanlens.errors import NotFoundError
from urbanlens.geometry import extrude_building
from urbanlens.model import Building, CityScene, GeoPoint, Mesh, MetroLine, Polyline, RoadSegment
from urbanlens.spatial import Aabb, SpatialIndex, building_entries, road_entries

DEFAULT_DETAIL_ZOOM = 15


@dataclass(frozen=True, slots=True)
class TileKey:
    zoom: int
    x: int
    y: int

    def valid(self) -> bool:
        return self.zoom >= 0 and 0 <= self.x < 2 ** self.zoom and 0 <= self.y < 2 ** self.zoom


@dataclass(frozen=True, slots=True)
class TileBuilding:
    building: Building
    mesh: Mesh | None  # populated at detail zoom


@dataclass(frozen=True, slots=True)
class TerrainPatch:
    origin: GeoPoint
    cell_size: float
    n_cols: int
    n_rows: int
    elevations: np.ndarray


@dataclass(frozen=True, slots=True)
class SceneTile:
    key: TileKey
    bounds: Aabb
    detail: bool
    buildings: tuple[TileBuilding, ...]
    roads: tuple[tuple[str, tuple[Polyline, ...]], ...]
    metro_lines: tuple[tuple[str, tuple[Polyline, ...]], ...]
    terrain: TerrainPatch


class TileService:
    """Tile assembly over immutable scene + indices; safe to share."""

    def __init__(self, scene: CityScene, detail_zoom: int = DEFAULT_DETAIL_ZOOM):
        self.scene = scene
        self.detail_zoom = detail_zoom
        grid = scene.terrain
        self.extent = Aabb(grid.origin.x, grid.origin.y, grid.max_x, grid.max_y)
        self._building_index = SpatialIndex.build(building_entries(scene.buildings))
        self._road_index = SpatialIndex.build(road_entries(scene.roads))
        self._buildings = {b.id: b for b in scene.buildings}
        self._roads = {r.id: r for r in scene.roads}

    def tile_bounds(self, key: TileKey) -> Aabb:
        n = 2 ** key.zoom
        width = (self.extent.max_x - self.extent.min_x) / n
        height = (self.extent.max_y - self.extent.min_y) / n
        return Aabb(
            self.extent.min_x + key.x * width,
            self.extent.min_y + key.y * height,
            self.extent.min_x + (key.x + 1) * width,
            self.extent.min_y + (key.y + 1) * height,
        )

    def get_tile(self, key: TileKey) -> SceneTile:
        if not key.valid():
            raise NotFoundError(f"tile key z={key.zoom} x={key.x} y={key.y} out of range")
        bounds = self.tile_bounds(key)
        detail = key.zoom >= self.detail_zoom

        buildings = []
        for bid in sorted(self._building_index.query_range(bounds)):
            b = self._buildings[bid]
            mesh = extrude_building(b) if detail else None
            if not detail:
                b = Building(id=b.id, footprint=b.footprint, height=b.height,
                             base_elevation=b.base_elevation, rooms=())
            buildings.append(TileBuilding(building=b, mesh=mesh))

        roads = []
        for rid in sorted(self._road_index.query_range(bounds)):
            pieces = clip_polyline(self._roads[rid].path, bounds)
            roads.append((rid, tuple(pieces)))

        metro = []
        for line in sorted(self.scene.metro_lines, key=lambda m: m.id):
            if _bbox_intersects(line, bounds):
                metro.append((line.id, tuple(clip_polyline(line.path, bounds))))

        return SceneTile(
            key=key, bounds=bounds, detail=detail,
            buildings=tuple(buildings), roads=tuple(roads), metro_lines=tuple(metro),
            terrain=self._terrain_patch(bounds),
        )

    def _terrain_patch(self, bounds: Aabb) -> TerrainPatch:
        grid = self.scene.terrain
        c0 = max(0, int((bounds.min_x - grid.origin.x) / grid.cell_size))
        r0 = max(0, int((bounds.min_y - grid.origin.y) / grid.cell_size))
        c1 = min(grid.n_cols - 1, int(np.ceil((bounds.max_x - grid.origin.x) / grid.cell_size)))
        r1 = min(grid.n_rows - 1, int(np.ceil((bounds.max_y - grid.origin.y) / grid.cell_size)))
        c0 = min(c0, c1 - 1) if c1 > 0 else 0
        r0 = min(r0, r1 - 1) if r1 > 0 else 0
        rows = []
        for r in range(r0, r1 + 1):
            rows.append(grid.elevations[r * grid.n_cols + c0: r * grid.n_cols + c1 + 1])
        return TerrainPatch(
            origin=GeoPoint(grid.origin.x + c0 * grid.cell_size,
                            grid.origin.y + r0 * grid.cell_size),
            cell_size=grid.cell_size,
            n_cols=c1 - c0 + 1, n_rows=r1 - r0 + 1,
            elevations=np.concatenate(rows),
        )


def _bbox_intersects(line: MetroLine, bounds: Aabb) -> bool:
    xy = line.path.xy()
    return not (
        xy[:, 0].min() > bounds.max_x or xy[:, 0].max() < bounds.min_x
        or xy[:, 1].min() > bounds.max_y or xy[:, 1].max() < bounds.min_y
    )


def clip_polyline(line: Polyline, window: Aabb) -> list[Polyline]:
    """Positive-length pieces of the polyline inside the closed window."""
    pieces: list[list[GeoPoint]] = []
    current: list[GeoPoint] = []
    verts = line.vertices
    for i in range(len(verts) - 1):
        seg = _clip_segment(verts[i], verts[i + 1], window)
        if seg is None:
            if len(current) >= 2:
                pieces.append(current)
            current = []
            continue
        a, b = seg
        if (a.x, a.y) == (b.x, b.y):
            continue
        if current and (current[-1].x, current[-1].y) == (a.x, a.y):
            current.append(b)
        else:
            if len(current) >= 2:
                pieces.append(current)
            current = [a, b]
    if len(current) >= 2:
        pieces.append(current)
    return [Polyline(tuple(p)) for p in pieces]


def _clip_segment(a: GeoPoint, b: GeoPoint, w: Aabb) -> tuple[GeoPoint, GeoPoint] | None:
    # Liang-Barsky against the closed rectangle
    dx, dy = b.x - a.x, b.y - a.y
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, a.x - w.min_x), (dx, w.max_x - a.x),
                 (-dy, a.y - w.min_y), (dy, w.max_y - a.y)):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    if t0 > t1:
        return None
    start = a if t0 == 0.0 else GeoPoint(a.x + t0 * dx, a.y + t0 * dy, a.z + t0 * (b.z - a.z))
    end = b if t1 == 1.0 else GeoPoint(a.x + t1 * dx, a.y + t1 * dy, a.z + t1 * (b.z - a.z))
    return (start, end)
