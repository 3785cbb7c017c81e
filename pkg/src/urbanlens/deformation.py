"""Metro-line deformation: buffer selection, cylinder glyphs, trend.

Glyph semantics: an up cylinder above ground encodes lifting (positive mm),
a down cylinder below ground encodes sinking (negative mm), and a zero
reading degenerates to a point marker. Height is |deformation| times the
display scale, so bigger movement reads as a taller cylinder.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from urbanlens.errors import InsufficientDataError, InvalidArgumentError
from urbanlens.geometry import project_onto_polyline
from urbanlens.model import GeoPoint, MetroLine, MonitoringPoint, TerrainGrid
from urbanlens.spatial import SpatialIndex, point_entries
from urbanlens.terrain import elevation_at

BUFFER_PRESETS_M = (100.0, 50.0)
DEFAULT_SCALE_M_PER_MM = 0.5
STABLE_SLOPE_MM_PER_DAY = 0.1 / 30.0  # 0.1 mm per 30 days


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"


class Trend(enum.Enum):
    LIFTING = "lifting"
    SINKING = "sinking"
    STABLE = "stable"


@dataclass(frozen=True, slots=True)
class CylinderGlyph:
    point_id: str
    base: GeoPoint            # on the terrain surface
    height: float             # meters, >= 0
    direction: Direction
    style: str                # "cylinder" | "point"
    deformation_mm: float


@dataclass(frozen=True, slots=True)
class GlyphBuild:
    glyphs: tuple[CylinderGlyph, ...]
    skipped: tuple[str, ...]  # point ids with no history


def select_points(line: MetroLine, points: list[MonitoringPoint], buffer: float,
                  index: SpatialIndex | None = None) -> list[MonitoringPoint]:
    """Points within `buffer` meters of the line, ordered by chainage of
    their projection onto the line (ties by id)."""
    if buffer <= 0:
        raise InvalidArgumentError("buffer must be positive")
    if index is None:
        index = SpatialIndex.build(point_entries(points))
    by_id = {p.id: p for p in points}
    selected = index.query_buffer(line.path, buffer, lambda pid: by_id[pid].position)
    chosen = [by_id[pid] for pid in selected]
    chosen.sort(key=lambda p: (project_onto_polyline(p.position, line.path), p.id))
    return chosen


def make_glyphs(points: list[MonitoringPoint], scale: float,
                terrain: TerrainGrid) -> GlyphBuild:
    """Latest-reading cylinder glyphs; empty-history points are skipped and
    reported instead of raising."""
    if scale <= 0:
        raise InvalidArgumentError("scale must be positive")
    glyphs: list[CylinderGlyph] = []
    skipped: list[str] = []
    for p in points:
        if not p.history:
            skipped.append(p.id)
            continue
        d = p.history[-1][1]
        ground = elevation_at(terrain, p.position)
        if d > 0:
            direction = Direction.UP
        elif d < 0:
            direction = Direction.DOWN
        else:
            direction = Direction.FLAT
        height = abs(d) * scale
        glyphs.append(CylinderGlyph(
            point_id=p.id,
            base=GeoPoint(p.position.x, p.position.y, ground),
            height=height,
            direction=direction,
            style="point" if height == 0 else "cylinder",
            deformation_mm=d,
        ))
    return GlyphBuild(glyphs=tuple(glyphs), skipped=tuple(skipped))


def ols_slope_mm_per_day(p: MonitoringPoint) -> float:
    """Least-squares slope of deformation (mm) against time (days)."""
    if len(p.history) < 2:
        raise InsufficientDataError(
            f"point {p.id}: need at least 2 history entries, have {len(p.history)}"
        )
    t0 = p.history[0][0]
    xs = [(ts - t0).total_seconds() / 86400.0 for ts, _ in p.history]
    ys = [d for _, d in p.history]
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / sxx  # sxx > 0 since timestamps strictly increase


def trend(p: MonitoringPoint,
          stable_eps: float = STABLE_SLOPE_MM_PER_DAY) -> Trend:
    """Trend classification of the OLS slope against +-stable_eps (mm/day)."""
    slope = ols_slope_mm_per_day(p)
    if slope > stable_eps:
        return Trend.LIFTING
    if slope < -stable_eps:
        return Trend.SINKING
    return Trend.STABLE
