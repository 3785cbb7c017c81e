"""Domain types for the city scene.

Dataclasses here are plain carriers: invariants are checked by
:mod:`urbanlens.validate` (collect-all semantics for file loading) and by the
operations that consume them. All coordinates live in a local planar
east/north frame in meters, anchored at ``CityScene.geo_anchor``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Literal

import numpy as np

LayerKind = Literal["terrain", "buildings", "roads", "metro", "communities", "analysis-result"]


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """Point in the local planar frame; x east, y north, z above datum (m)."""

    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True, slots=True)
class LatLong:
    lat: float
    lon: float


@dataclass(frozen=True, slots=True)
class Polygon:
    """Simple counter-clockwise ring, implicit closure, vertices in meters."""

    ring: tuple[GeoPoint, ...]

    def __post_init__(self):
        if not isinstance(self.ring, tuple):
            object.__setattr__(self, "ring", tuple(self.ring))

    def xy(self) -> np.ndarray:
        """Ring vertices as an (n, 2) float array."""
        return np.array([(p.x, p.y) for p in self.ring], dtype=np.float64)


@dataclass(frozen=True, slots=True)
class Polyline:
    """Open chain of at least two vertices with positive planar length."""

    vertices: tuple[GeoPoint, ...]

    def __post_init__(self):
        if not isinstance(self.vertices, tuple):
            object.__setattr__(self, "vertices", tuple(self.vertices))

    def xy(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.vertices], dtype=np.float64)


@dataclass(frozen=True, slots=True)
class Box:
    """Axis-aligned box, used for building rooms."""

    min_x: float
    min_y: float
    min_z: float
    max_x: float
    max_y: float
    max_z: float


@dataclass(frozen=True, slots=True)
class Building:
    """Extruded footprint prism from base_elevation to base_elevation + height."""

    id: str
    footprint: Polygon
    height: float
    base_elevation: float = 0.0
    rooms: tuple[Box, ...] = ()

    def __post_init__(self):
        if not isinstance(self.rooms, tuple):
            object.__setattr__(self, "rooms", tuple(self.rooms))


@dataclass(frozen=True, slots=True)
class RoadSegment:
    id: str
    path: Polyline
    lanes: int
    free_flow_speed: float  # km/h


@dataclass(frozen=True, slots=True)
class MetroLine:
    id: str
    name: str
    path: Polyline


@dataclass(frozen=True, slots=True)
class MonitoringPoint:
    """Ground-deformation sample site; history in (timestamp, signed mm).

    Positive deformation is lifting, negative is sinking.
    """

    id: str
    position: GeoPoint
    history: tuple[tuple[datetime, float], ...] = ()

    def __post_init__(self):
        if not isinstance(self.history, tuple):
            object.__setattr__(self, "history", tuple(tuple(e) for e in self.history))


@dataclass(frozen=True, slots=True)
class CommunityRecord:
    id: str
    name: str
    boundary: Polygon
    population: int
    age_bins: dict[str, int]
    education_bins: dict[str, int]


@dataclass(frozen=True, eq=False, slots=True)
class TerrainGrid:
    """Regular elevation raster; origin is the southwest node, row-major storage.

    Node (col, row) sits at (origin.x + col*cell_size, origin.y + row*cell_size)
    and stores elevations[row*n_cols + col].
    """

    origin: GeoPoint
    cell_size: float
    n_cols: int
    n_rows: int
    elevations: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.elevations, dtype=np.float64)
        object.__setattr__(self, "elevations", arr)

    def __eq__(self, other):
        if not isinstance(other, TerrainGrid):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.cell_size == other.cell_size
            and self.n_cols == other.n_cols
            and self.n_rows == other.n_rows
            and np.array_equal(self.elevations, other.elevations)
        )

    @property
    def max_x(self) -> float:
        return self.origin.x + (self.n_cols - 1) * self.cell_size

    @property
    def max_y(self) -> float:
        return self.origin.y + (self.n_rows - 1) * self.cell_size

    def contains(self, x: float, y: float) -> bool:
        return (
            self.origin.x <= x <= self.max_x
            and self.origin.y <= y <= self.max_y
        )


@dataclass(frozen=True, slots=True)
class LayerNode:
    id: str
    name: str
    kind: LayerKind
    visible: bool = True
    children: tuple["LayerNode", ...] = ()

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True, slots=True)
class Mesh:
    """Indexed triangle mesh; triangles wind counter-clockwise seen from outside."""

    vertices: tuple[GeoPoint, ...]
    triangles: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True, slots=True)
class SceneEdit:
    """Journal entry for one apply_edit call; before/after enable exact undo."""

    op: Literal["add", "update", "delete"]
    kind: Literal["building", "road"]
    object_id: str
    before: Building | RoadSegment | None = None
    after: Building | RoadSegment | None = None


@dataclass(frozen=True, slots=True)
class CityScene:
    """Immutable scene value; edits produce new scenes (see urbanlens.scene)."""

    terrain: TerrainGrid
    buildings: tuple[Building, ...]
    roads: tuple[RoadSegment, ...]
    metro_lines: tuple[MetroLine, ...]
    communities: tuple[CommunityRecord, ...]
    layer_root: LayerNode
    geo_anchor: LatLong
    journal: tuple[SceneEdit, ...] = field(default=(), compare=False)
    stale_indices: frozenset[str] = field(default=frozenset(), compare=False)

    def __post_init__(self):
        for name in ("buildings", "roads", "metro_lines", "communities"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))

    def building_by_id(self, building_id: str) -> Building | None:
        for b in self.buildings:
            if b.id == building_id:
                return b
        return None

    def road_by_id(self, road_id: str) -> RoadSegment | None:
        for r in self.roads:
            if r.id == road_id:
                return r
        return None

    def metro_by_id(self, line_id: str) -> MetroLine | None:
        for m in self.metro_lines:
            if m.id == line_id:
                return m
        return None

    def community_by_id(self, community_id: str) -> CommunityRecord | None:
        for c in self.communities:
            if c.id == community_id:
                return c
        return None
