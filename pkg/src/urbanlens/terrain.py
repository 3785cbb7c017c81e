"""Terrain queries: elevation, slope/aspect, profiles, line-of-sight."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from urbanlens import kernels
from urbanlens.errors import InvalidArgumentError, OutOfBoundsError
from urbanlens.geometry import segment_prism_entry
from urbanlens.model import CityScene, GeoPoint, Polyline, TerrainGrid
from urbanlens.spatial import Aabb, SpatialIndex, building_entries

FLAT_SLOPE_DEG = 0.01
_ENDPOINT_EPS = 1e-9


def elevation_at(grid: TerrainGrid, pt: GeoPoint) -> float:
    """Bilinear interpolation of the four surrounding nodes."""
    if not grid.contains(pt.x, pt.y):
        raise OutOfBoundsError(
            f"point ({pt.x}, {pt.y}) outside terrain extent "
            f"[{grid.origin.x}, {grid.max_x}] x [{grid.origin.y}, {grid.max_y}]"
        )
    z = kernels.bilinear(
        grid.elevations, grid.n_cols, grid.n_rows,
        grid.origin.x, grid.origin.y, grid.cell_size,
        np.array([pt.x]), np.array([pt.y]),
    )
    return float(z[0])


def elevations_at(grid: TerrainGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Batch bilinear sampling; all points must be inside the extent."""
    if (xs < grid.origin.x).any() or (xs > grid.max_x).any() \
            or (ys < grid.origin.y).any() or (ys > grid.max_y).any():
        raise OutOfBoundsError("sample point outside terrain extent")
    return kernels.bilinear(
        grid.elevations, grid.n_cols, grid.n_rows,
        grid.origin.x, grid.origin.y, grid.cell_size, xs, ys,
    )


def slope_aspect(grid: TerrainGrid, col: int, row: int) -> tuple[float, float | None]:
    """Horn 3x3 slope and aspect at an interior node.

    Slope in degrees; aspect is the downslope direction in degrees clockwise
    from north, or None when the cell is flat (slope < 0.01 deg).
    """
    if not (1 <= col <= grid.n_cols - 2 and 1 <= row <= grid.n_rows - 2):
        raise OutOfBoundsError(f"({col}, {row}) is not an interior node")

    def z(c: int, r: int) -> float:
        return float(grid.elevations[r * grid.n_cols + c])

    # row+1 is north in this grid (origin at the southwest corner)
    dzdx = (
        (z(col + 1, row - 1) + 2.0 * z(col + 1, row) + z(col + 1, row + 1))
        - (z(col - 1, row - 1) + 2.0 * z(col - 1, row) + z(col - 1, row + 1))
    ) / (8.0 * grid.cell_size)
    dzdy = (
        (z(col - 1, row + 1) + 2.0 * z(col, row + 1) + z(col + 1, row + 1))
        - (z(col - 1, row - 1) + 2.0 * z(col, row - 1) + z(col + 1, row - 1))
    ) / (8.0 * grid.cell_size)

    slope = math.degrees(math.atan(math.hypot(dzdx, dzdy)))
    if slope < FLAT_SLOPE_DEG:
        return slope, None
    aspect = math.degrees(math.atan2(-dzdx, -dzdy)) % 360.0
    return slope, aspect


def profile(grid: TerrainGrid, line: Polyline, spacing: float) -> list[tuple[float, float]]:
    """(distance, elevation) samples at 0, spacing, 2*spacing, ... plus the endpoint."""
    if spacing <= 0:
        raise InvalidArgumentError("spacing must be positive")
    for v in line.vertices:
        if not grid.contains(v.x, v.y):
            raise OutOfBoundsError(f"profile line exits terrain extent at ({v.x}, {v.y})")

    verts = line.xy()
    seg_len = np.hypot(np.diff(verts[:, 0]), np.diff(verts[:, 1]))
    total = float(seg_len.sum())
    distances = [i * spacing for i in range(int(total / spacing) + 1)]
    if distances[-1] < total - 1e-12:
        distances.append(total)
    else:
        distances[-1] = total

    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    out: list[tuple[float, float]] = []
    for d in distances:
        seg = min(int(np.searchsorted(cum, d, side="right")) - 1, len(seg_len) - 1)
        t = 0.0 if seg_len[seg] == 0 else (d - cum[seg]) / seg_len[seg]
        x = verts[seg, 0] + t * (verts[seg + 1, 0] - verts[seg, 0])
        y = verts[seg, 1] + t * (verts[seg + 1, 1] - verts[seg, 1])
        out.append((d, elevation_at(grid, GeoPoint(x, y))))
    return out


@dataclass(frozen=True, slots=True)
class LosResult:
    visible: bool
    blocker_id: str | None = None       # building that blocks first, if any
    blocked_by_terrain: bool = False
    t: float | None = None              # parameter of the first obstruction


def line_of_sight(scene: CityScene, a: GeoPoint, b: GeoPoint,
                  index: SpatialIndex | None = None) -> LosResult:
    """Cast segment a->b against terrain and building prisms.

    z components are absolute heights. Grazing contacts at the endpoints'
    own surfaces are excluded: only obstructions strictly inside the open
    parameter interval count.
    """
    grid = scene.terrain
    for p in (a, b):
        if not grid.contains(p.x, p.y):
            raise OutOfBoundsError(f"endpoint ({p.x}, {p.y}) outside terrain extent")
    if index is None:
        index = SpatialIndex.build(building_entries(scene.buildings))

    t_lo, t_hi = _ENDPOINT_EPS, 1.0 - _ENDPOINT_EPS
    horizontal = math.hypot(b.x - a.x, b.y - a.y)
    nsteps = max(8, int(math.ceil(horizontal / (grid.cell_size / 4.0))))
    t_terr = kernels.terrain_first_hit(
        grid.elevations, grid.n_cols, grid.n_rows,
        grid.origin.x, grid.origin.y, grid.cell_size,
        a.x, a.y, a.z, b.x, b.y, b.z, nsteps,
    )

    best_t = t_terr if t_terr >= 0 else math.inf
    best_building: str | None = None
    window = Aabb(min(a.x, b.x), min(a.y, b.y), max(a.x, b.x), max(a.y, b.y))
    for bid in sorted(index.query_range(window)):
        building = scene.building_by_id(bid)
        if building is None:
            continue
        t_hit = segment_prism_entry(
            building.footprint, building.base_elevation,
            building.base_elevation + building.height,
            a, b, t_lo, min(t_hi, best_t),
        )
        if t_hit is not None and t_hit < best_t:
            best_t = t_hit
            best_building = bid

    if best_building is not None:
        return LosResult(False, blocker_id=best_building, t=best_t)
    if not math.isinf(best_t):
        return LosResult(False, blocked_by_terrain=True, t=best_t)
    return LosResult(True)
