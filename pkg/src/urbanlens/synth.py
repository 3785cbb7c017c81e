"""Deterministic synthetic city generator.

Stands in for real city datasets at desk scale: gridded roads, rectangular
buildings draped on a rolling terrain, one diagonal metro line with
monitoring points of mixed-sign deformation, gridded communities with
consistent demographic bins, plus matching traffic history and
weekly-periodic station flows. Identical seeds produce identical output,
down to the serialized bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from urbanlens import kernels
from urbanlens.errors import InvalidArgumentError
from urbanlens.flow import FlowSeries
from urbanlens.ingest import (
    save_scene,
    write_flows_csv,
    write_monitoring_csv,
    write_observations_csv,
)
from urbanlens.model import (
    Box,
    Building,
    CityScene,
    CommunityRecord,
    GeoPoint,
    LatLong,
    LayerNode,
    MetroLine,
    MonitoringPoint,
    Polygon,
    Polyline,
    RoadSegment,
    TerrainGrid,
)
from urbanlens.traffic import TrafficObservation

SHENZHEN_ANCHOR = LatLong(lat=22.54, lon=114.06)
_EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True, slots=True)
class SynthSpec:
    seed: int = 7
    building_count: int = 500
    road_grid_dims: tuple[int, int] = (6, 6)
    metro_point_count: int = 80
    community_grid_dims: tuple[int, int] = (4, 4)
    extent: float = 4000.0

    def __post_init__(self):
        if self.extent <= 0:
            raise InvalidArgumentError("extent must be positive")
        for name in ("building_count", "metro_point_count"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")
        if min(self.road_grid_dims) < 0 or min(self.community_grid_dims) < 0:
            raise InvalidArgumentError("grid dims must be >= 0")


@dataclass(frozen=True, slots=True)
class SynthCity:
    scene: CityScene
    observations: tuple[TrafficObservation, ...]
    flows: tuple[FlowSeries, ...]
    monitoring: tuple[MonitoringPoint, ...]


def synth_city(spec: SynthSpec) -> SynthCity:
    rng = np.random.default_rng(spec.seed)
    extent = spec.extent

    terrain = _terrain(rng, extent)
    roads = _roads(rng, spec)
    buildings = _buildings(rng, spec, terrain)
    metro, monitoring = _metro(rng, spec)
    communities = _communities(rng, spec)
    layer_root = LayerNode(
        id="layer-root", name="Scene", kind="analysis-result", children=(
            LayerNode(id="layer-terrain", name="Terrain", kind="terrain"),
            LayerNode(id="layer-buildings", name="Buildings", kind="buildings"),
            LayerNode(id="layer-roads", name="Roads", kind="roads"),
            LayerNode(id="layer-metro", name="Metro", kind="metro"),
            LayerNode(id="layer-communities", name="Communities", kind="communities"),
            LayerNode(id="layer-analysis", name="Analysis results", kind="analysis-result"),
        ),
    )
    scene = CityScene(
        terrain=terrain,
        buildings=buildings,
        roads=roads,
        metro_lines=(metro,),
        communities=communities,
        layer_root=layer_root,
        geo_anchor=SHENZHEN_ANCHOR,
    )
    observations = _traffic_history(rng, roads)
    flows = _station_flows(rng)
    return SynthCity(scene=scene, observations=observations, flows=flows,
                     monitoring=monitoring)


def write_synth(city: SynthCity, outdir: str | Path) -> dict[str, str]:
    """Write scene.json plus the three CSV streams; returns the file map."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = {
        "scene": str(outdir / "scene.json"),
        "traffic": str(outdir / "traffic.csv"),
        "flows": str(outdir / "flows.csv"),
        "monitoring": str(outdir / "monitoring.csv"),
    }
    save_scene(city.scene, files["scene"])
    write_observations_csv(city.observations, files["traffic"])
    write_flows_csv(city.flows, files["flows"])
    write_monitoring_csv(city.monitoring, files["monitoring"])
    return files


def _terrain(rng: np.random.Generator, extent: float) -> TerrainGrid:
    n = 65
    cell = extent / (n - 1)
    xs = np.arange(n) * cell
    gx, gy = np.meshgrid(xs, xs)
    z = (
        9.0 * np.sin(gx / (extent / 5.0)) * np.cos(gy / (extent / 7.0))
        + 4.0 * np.sin((gx + gy) / (extent / 3.0))
        + rng.normal(0.0, 0.15, (n, n))
    )
    return TerrainGrid(origin=GeoPoint(0.0, 0.0), cell_size=cell,
                       n_cols=n, n_rows=n, elevations=z.ravel())


def _roads(rng: np.random.Generator, spec: SynthSpec) -> tuple[RoadSegment, ...]:
    gx, gy = spec.road_grid_dims
    extent = spec.extent
    roads: list[RoadSegment] = []
    lanes = rng.integers(1, 5, size=gx + gy)
    speeds = rng.choice([40.0, 50.0, 60.0, 80.0], size=gx + gy)
    for i in range(gx):
        x = extent * (i + 1) / (gx + 1)
        roads.append(RoadSegment(
            id=f"road-v{i:03d}",
            path=Polyline((GeoPoint(x, 0.0), GeoPoint(x, extent))),
            lanes=int(lanes[i]), free_flow_speed=float(speeds[i]),
        ))
    for j in range(gy):
        y = extent * (j + 1) / (gy + 1)
        roads.append(RoadSegment(
            id=f"road-h{j:03d}",
            path=Polyline((GeoPoint(0.0, y), GeoPoint(extent, y))),
            lanes=int(lanes[gx + j]), free_flow_speed=float(speeds[gx + j]),
        ))
    # scene files serialize collections by id; keep the scene canonical too
    return tuple(sorted(roads, key=lambda r: r.id))


def _buildings(rng: np.random.Generator, spec: SynthSpec,
               terrain: TerrainGrid) -> tuple[Building, ...]:
    count = spec.building_count
    if count == 0:
        return ()
    extent = spec.extent
    margin = min(50.0, extent * 0.05)
    half_w = rng.uniform(5.0, 20.0, count)
    half_h = rng.uniform(5.0, 20.0, count)
    lo_x = margin + half_w
    lo_y = margin + half_h
    cx = lo_x + rng.random(count) * np.maximum(extent - margin - half_w - lo_x, 0.0)
    cy = lo_y + rng.random(count) * np.maximum(extent - margin - half_h - lo_y, 0.0)
    heights = 6.0 + 14.0 * np.exp(rng.normal(0.0, 0.7, count))
    bases = kernels.bilinear(
        terrain.elevations, terrain.n_cols, terrain.n_rows,
        terrain.origin.x, terrain.origin.y, terrain.cell_size, cx, cy,
    )
    room_every = 25
    out: list[Building] = []
    for i in range(count):
        x0, x1 = cx[i] - half_w[i], cx[i] + half_w[i]
        y0, y1 = cy[i] - half_h[i], cy[i] + half_h[i]
        footprint = Polygon((
            GeoPoint(x0, y0), GeoPoint(x1, y0), GeoPoint(x1, y1), GeoPoint(x0, y1),
        ))
        rooms: tuple[Box, ...] = ()
        if i % room_every == 0 and heights[i] > 4.0:
            wx, wy = (x1 - x0) * 0.3, (y1 - y0) * 0.3
            z0 = bases[i] + 0.5
            rooms = (
                Box(x0 + wx * 0.2, y0 + wy * 0.2, z0,
                    x0 + wx, y0 + wy, z0 + 2.8),
                Box(x1 - wx, y1 - wy, z0,
                    x1 - wx * 0.2, y1 - wy * 0.2, z0 + 2.8),
            )
        out.append(Building(
            id=f"bldg-{i:06d}", footprint=footprint,
            height=float(heights[i]), base_elevation=float(bases[i]), rooms=rooms,
        ))
    return tuple(out)


def _metro(rng: np.random.Generator,
           spec: SynthSpec) -> tuple[MetroLine, tuple[MonitoringPoint, ...]]:
    extent = spec.extent
    waypoints = (
        GeoPoint(0.05 * extent, 0.10 * extent),
        GeoPoint(0.35 * extent, 0.40 * extent),
        GeoPoint(0.55 * extent, 0.45 * extent),
        GeoPoint(0.80 * extent, 0.75 * extent),
        GeoPoint(0.95 * extent, 0.90 * extent),
    )
    line = MetroLine(id="metro-1", name="Line 1", path=Polyline(waypoints))

    count = spec.metro_point_count
    points: list[MonitoringPoint] = []
    if count:
        xy = line.path.xy()
        seg_vec = np.diff(xy, axis=0)
        seg_len = np.hypot(seg_vec[:, 0], seg_vec[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        chain = rng.uniform(0.0, cum[-1], count)
        offset = rng.uniform(-150.0, 150.0, count)
        n_hist = rng.integers(4, 13, count)
        bias = rng.normal(0.0, 0.8, count)
        for i in range(count):
            seg = min(int(np.searchsorted(cum, chain[i], side="right")) - 1,
                      len(seg_len) - 1)
            t = (chain[i] - cum[seg]) / seg_len[seg]
            px = xy[seg, 0] + t * seg_vec[seg, 0]
            py = xy[seg, 1] + t * seg_vec[seg, 1]
            nx, ny = -seg_vec[seg, 1] / seg_len[seg], seg_vec[seg, 0] / seg_len[seg]
            px = float(np.clip(px + nx * offset[i], 1.0, extent - 1.0))
            py = float(np.clip(py + ny * offset[i], 1.0, extent - 1.0))
            drift = rng.normal(bias[i], 1.2, int(n_hist[i]))
            series = np.cumsum(drift)
            history = tuple(
                (_EPOCH + timedelta(days=int(d)), float(round(series[d], 3)))
                for d in range(int(n_hist[i]))
            )
            points.append(MonitoringPoint(
                id=f"mon-{i:04d}", position=GeoPoint(px, py), history=history,
            ))
    return line, tuple(points)


def _communities(rng: np.random.Generator,
                 spec: SynthSpec) -> tuple[CommunityRecord, ...]:
    cx, cy = spec.community_grid_dims
    extent = spec.extent
    out: list[CommunityRecord] = []
    for j in range(cy):
        for i in range(cx):
            x0, x1 = extent * i / cx, extent * (i + 1) / cx
            y0, y1 = extent * j / cy, extent * (j + 1) / cy
            boundary = Polygon((
                GeoPoint(x0, y0), GeoPoint(x1, y0), GeoPoint(x1, y1), GeoPoint(x0, y1),
            ))
            population = int(rng.integers(500, 20001))
            age = rng.multinomial(population, [0.18, 0.67, 0.15])
            edu = rng.multinomial(population, [0.25, 0.40, 0.30, 0.05])
            out.append(CommunityRecord(
                id=f"comm-{j:02d}-{i:02d}", name=f"Community {j * cx + i + 1}",
                boundary=boundary, population=population,
                age_bins={"age_0_14": int(age[0]), "age_15_64": int(age[1]),
                          "age_65_plus": int(age[2])},
                education_bins={"edu_primary": int(edu[0]), "edu_secondary": int(edu[1]),
                                "edu_tertiary": int(edu[2]), "edu_none": int(edu[3])},
            ))
    return tuple(out)


def _traffic_history(rng: np.random.Generator,
                     roads: tuple[RoadSegment, ...]) -> tuple[TrafficObservation, ...]:
    hours = 72
    out: list[TrafficObservation] = []
    for h in range(hours):
        ts = _EPOCH + timedelta(hours=h)
        hod = ts.hour
        rush = 0.45 if hod in (8, 9, 18, 19) else (0.75 if 7 <= hod <= 21 else 1.0)
        for seg in roads:
            speed = seg.free_flow_speed * rush * float(rng.uniform(0.85, 1.1))
            out.append(TrafficObservation(
                segment_id=seg.id, timestamp=ts,
                mean_speed=float(round(max(0.0, speed), 2)),
            ))
    return tuple(out)


def _station_flows(rng: np.random.Generator) -> tuple[FlowSeries, ...]:
    n_stations = 6
    days = 14
    out: list[FlowSeries] = []
    for s in range(n_stations):
        base = float(rng.uniform(200.0, 2000.0))
        counts: list[float] = []
        for step in range(days * 24):
            hod = step % 24
            dow = (step // 24) % 7
            peak = 1.0
            if hod in (8, 9):
                peak = 2.6
            elif hod in (18, 19):
                peak = 2.9
            elif hod < 6:
                peak = 0.15
            weekend = 0.55 if dow >= 5 else 1.0
            noise = float(rng.uniform(0.9, 1.1))
            counts.append(float(round(max(0.0, base * peak * weekend * noise), 1)))
        out.append(FlowSeries(
            station_id=f"station-{s + 1:02d}", start=_EPOCH,
            interval=timedelta(hours=1), counts=tuple(counts),
        ))
    return tuple(out)
