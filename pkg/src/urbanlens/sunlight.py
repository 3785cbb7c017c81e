"""Solar position, shadow testing against the extruded city, sunshine hours.

Solar geometry uses the NOAA low-accuracy formulation: fractional-year
series for declination and the equation of time, then the hour angle gives
elevation/azimuth. Accuracy is a few tenths of a degree, plenty for urban
shadow work. Atmospheric refraction is deliberately ignored, so night is
exactly elevation <= 0 and shadow boundaries are hard (point sun).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as date_type
from datetime import datetime, timedelta, timezone
from typing import Literal

import numpy as np

from urbanlens import kernels
from urbanlens.errors import InvalidArgumentError, OutOfBoundsError
from urbanlens.geometry import segment_prism_entry
from urbanlens.model import CityScene, GeoPoint, LatLong
from urbanlens.spatial import Aabb, SpatialIndex, building_entries

ShadowState = Literal["lit", "shadowed", "night"]
LIT: ShadowState = "lit"
SHADOWED: ShadowState = "shadowed"
NIGHT: ShadowState = "night"

_START_EPS = 1e-6  # meters to advance the ray start, excludes self-grazing


@dataclass(frozen=True, slots=True)
class SunPosition:
    azimuth: float    # degrees clockwise from north, [0, 360)
    elevation: float  # degrees above horizon, [-90, 90]


@dataclass(frozen=True, slots=True)
class SunlightReport:
    point: GeoPoint
    date: date_type
    step_minutes: int
    lit_intervals: tuple[tuple[datetime, datetime], ...]
    sunshine_hours: float


def _to_utc(t: datetime) -> datetime:
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


_TROPICAL_YEAR_DAYS = 365.24219
_EPOCH_2000 = datetime(2000, 1, 1, 12, tzinfo=timezone.utc)


def _fractional_year(t: datetime) -> float:
    """Phase angle of the year in radians, zero at the 2000-01-01 12:00 UTC epoch.

    Anchoring on a fixed epoch with the mean tropical year keeps the phase
    aligned with the seasons across the whole 1950-2050 window (a plain
    day-of-year anchor wobbles by most of a day over the leap cycle).
    """
    days = (t - _EPOCH_2000).total_seconds() / 86400.0
    return 2.0 * math.pi * ((days % _TROPICAL_YEAR_DAYS) / _TROPICAL_YEAR_DAYS)


def sun_position(loc: LatLong, t: datetime) -> SunPosition:
    """Sun azimuth/elevation for a UTC timestamp (naive input = UTC)."""
    t = _to_utc(t)
    if not (1950 <= t.year <= 2050):
        raise InvalidArgumentError(f"timestamp year {t.year} outside supported 1950-2050")
    if not (-90.0 <= loc.lat <= 90.0 and -180.0 <= loc.lon <= 180.0):
        raise InvalidArgumentError(f"invalid location ({loc.lat}, {loc.lon})")

    hours = t.hour + t.minute / 60.0 + t.second / 3600.0 + t.microsecond / 3.6e9
    g = _fractional_year(t)

    eqtime = 229.18 * (
        0.000075
        + 0.001868 * math.cos(g) - 0.032077 * math.sin(g)
        - 0.014615 * math.cos(2 * g) - 0.040849 * math.sin(2 * g)
    )
    decl = (
        0.006918
        - 0.399912 * math.cos(g) + 0.070257 * math.sin(g)
        - 0.006758 * math.cos(2 * g) + 0.000907 * math.sin(2 * g)
        - 0.002697 * math.cos(3 * g) + 0.00148 * math.sin(3 * g)
    )

    tst = hours * 60.0 + eqtime + 4.0 * loc.lon  # true solar time, minutes
    ha_deg = tst / 4.0 - 180.0
    ha_deg = (ha_deg + 180.0) % 360.0 - 180.0
    ha = math.radians(ha_deg)
    lat = math.radians(loc.lat)

    cos_zen = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(ha)
    cos_zen = min(1.0, max(-1.0, cos_zen))
    zen = math.acos(cos_zen)
    elevation = 90.0 - math.degrees(zen)

    denom = math.cos(lat) * math.sin(zen)
    if abs(denom) < 1e-12:
        azimuth = 0.0  # sun at zenith/nadir (or exact pole): azimuth degenerate
    else:
        cos_az = (math.sin(decl) - math.sin(lat) * cos_zen) / denom
        cos_az = min(1.0, max(-1.0, cos_az))
        azimuth = math.degrees(math.acos(cos_az))
        if ha_deg > 0:
            azimuth = 360.0 - azimuth
    return SunPosition(azimuth=azimuth % 360.0, elevation=elevation)


class ShadowCaster:
    """Reusable shadow-ray evaluator over one scene (index and caps cached)."""

    def __init__(self, scene: CityScene, index: SpatialIndex | None = None):
        self.scene = scene
        self.index = index if index is not None else SpatialIndex.build(
            building_entries(scene.buildings)
        )
        grid = scene.terrain
        z_cap = float(grid.elevations.max())
        for b in scene.buildings:
            z_cap = max(z_cap, b.base_elevation + b.height)
        self.z_cap = z_cap + 1.0

    def test(self, pt: GeoPoint, sun: SunPosition) -> ShadowState:
        grid = self.scene.terrain
        if not grid.contains(pt.x, pt.y):
            raise OutOfBoundsError(f"point ({pt.x}, {pt.y}) outside terrain extent")
        if sun.elevation <= 0.0:
            return NIGHT

        az = math.radians(sun.azimuth)
        el = math.radians(sun.elevation)
        dx = math.sin(az) * math.cos(el)
        dy = math.cos(az) * math.cos(el)
        dz = math.sin(el)

        # ray length: stop at the horizontal extent exit or above every obstacle
        # (dz > 0 here since elevation > 0, so the vertical cap is always finite)
        length = max(0.0, (self.z_cap - pt.z) / dz)
        if dx > 1e-15:
            length = min(length, (grid.max_x - pt.x) / dx)
        elif dx < -1e-15:
            length = min(length, (grid.origin.x - pt.x) / dx)
        if dy > 1e-15:
            length = min(length, (grid.max_y - pt.y) / dy)
        elif dy < -1e-15:
            length = min(length, (grid.origin.y - pt.y) / dy)
        if length <= _START_EPS:
            return LIT

        x0 = pt.x + dx * _START_EPS
        y0 = pt.y + dy * _START_EPS
        z0 = pt.z + dz * _START_EPS
        x1, y1, z1 = pt.x + dx * length, pt.y + dy * length, pt.z + dz * length

        horizontal = math.hypot(x1 - x0, y1 - y0)
        nsteps = max(8, int(math.ceil(horizontal / (grid.cell_size / 4.0))))
        t_terr = kernels.terrain_first_hit(
            grid.elevations, grid.n_cols, grid.n_rows,
            grid.origin.x, grid.origin.y, grid.cell_size,
            x0, y0, z0, x1, y1, z1, nsteps,
        )
        if t_terr >= 0:
            return SHADOWED

        window = Aabb(min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))
        p0 = GeoPoint(x0, y0, z0)
        p1 = GeoPoint(x1, y1, z1)
        for bid in self.index.query_range(window):
            building = self.scene.building_by_id(bid)
            if building is None:
                continue
            hit = segment_prism_entry(
                building.footprint, building.base_elevation,
                building.base_elevation + building.height,
                p0, p1, 0.0, 1.0,
            )
            if hit is not None:
                return SHADOWED
        return LIT


def shadow_test(scene: CityScene, pt: GeoPoint, sun: SunPosition,
                index: SpatialIndex | None = None) -> ShadowState:
    """lit / shadowed / night for one point and sun position."""
    return ShadowCaster(scene, index).test(pt, sun)


def sunshine_hours(scene: CityScene, pt: GeoPoint, loc: LatLong,
                   day: date_type, step: int,
                   index: SpatialIndex | None = None) -> SunlightReport:
    """Sample the UTC day every `step` minutes and merge lit runs."""
    if not isinstance(step, int) or not (1 <= step <= 60):
        raise InvalidArgumentError("step must be an integer number of minutes in [1, 60]")
    caster = ShadowCaster(scene, index)
    day_start = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
    day_end = day_start + timedelta(days=1)

    samples: list[tuple[datetime, bool]] = []
    t = day_start
    while t < day_end:
        sun = sun_position(loc, t)
        samples.append((t, caster.test(pt, sun) == LIT))
        t += timedelta(minutes=step)

    intervals: list[tuple[datetime, datetime]] = []
    lit_count = 0
    run_start: datetime | None = None
    for ts, lit in samples:
        if lit:
            lit_count += 1
            if run_start is None:
                run_start = ts
        elif run_start is not None:
            intervals.append((run_start, ts))
            run_start = None
    if run_start is not None:
        intervals.append((run_start, day_end))

    return SunlightReport(
        point=pt, date=day, step_minutes=step,
        lit_intervals=tuple(intervals),
        sunshine_hours=lit_count * step / 60.0,
    )
