"""HTTP service exposing tiles, layers, and every analysis operation.

Every analysis endpoint is a stateless wrapper: parse the request, call the
module operation, encode the result. Errors map to structured problem
documents ({"error": {"code", "message"}}), with a correlation id attached
to internal failures. Mutable state is limited to the traffic store
(single-writer) and layer visibility (lock-guarded).
"""

from __future__ import annotations

import os
import threading
import uuid
from datetime import date as date_type
from datetime import datetime, timezone
from typing import Any

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from urbanlens import community, deformation, flow, scene as scene_ops, sunlight, terrain, traffic
from urbanlens.errors import (
    ConflictError,
    InvalidArgumentError,
    NotFoundError,
    OutOfBoundsError,
    UrbanLensError,
)
from urbanlens.geometry import extrude_building
from urbanlens.model import CityScene, GeoPoint, LatLong, MonitoringPoint, Polygon
from urbanlens.spatial import SpatialIndex, building_entries, point_entries
from urbanlens.tiles import DEFAULT_DETAIL_ZOOM, SceneTile, TileKey, TileService

DEFAULT_WINDOW_SECONDS = 900.0


def env_detail_zoom() -> int:
    return int(os.environ.get("UL_DETAIL_ZOOM", DEFAULT_DETAIL_ZOOM))


def env_thresholds() -> tuple[float, float]:
    raw = os.environ.get("UL_CLASS_THRESHOLDS", "")
    if not raw:
        return traffic.DEFAULT_THRESHOLDS
    parts = [float(p) for p in raw.split(",")]
    if len(parts) != 2 or not (0 < parts[1] < parts[0] <= 1):
        raise InvalidArgumentError(f"bad UL_CLASS_THRESHOLDS {raw!r}, want 'free,congested'")
    return (parts[0], parts[1])


# ------------------------------------------------------------- encoders
# Shared by the API and by tests asserting endpoint == direct module call.

def encode_point(p: GeoPoint) -> list[float]:
    return [p.x, p.y, p.z]


def encode_polygon(p: Polygon) -> list[list[float]]:
    return [[v.x, v.y] for v in p.ring]


def encode_polyline(line) -> list[list[float]]:
    return [[v.x, v.y] for v in line.vertices]


def encode_mesh(mesh) -> dict:
    return {
        "vertices": [[v.x, v.y, v.z] for v in mesh.vertices],
        "triangles": [list(t) for t in mesh.triangles],
    }


def encode_building(b, mesh=None) -> dict:
    return {
        "id": b.id,
        "footprint": encode_polygon(b.footprint),
        "base_elevation": b.base_elevation,
        "height": b.height,
        "rooms": [[r.min_x, r.min_y, r.min_z, r.max_x, r.max_y, r.max_z] for r in b.rooms],
        "mesh": encode_mesh(mesh) if mesh is not None else None,
    }


def encode_tile(tile: SceneTile) -> dict:
    return {
        "key": {"zoom": tile.key.zoom, "x": tile.key.x, "y": tile.key.y},
        "bounds": [tile.bounds.min_x, tile.bounds.min_y,
                   tile.bounds.max_x, tile.bounds.max_y],
        "detail": tile.detail,
        "buildings": [encode_building(tb.building, tb.mesh) for tb in tile.buildings],
        "roads": [
            {"id": rid, "pieces": [encode_polyline(p) for p in pieces]}
            for rid, pieces in tile.roads
        ],
        "metro_lines": [
            {"id": mid, "pieces": [encode_polyline(p) for p in pieces]}
            for mid, pieces in tile.metro_lines
        ],
        "terrain": {
            "origin": [tile.terrain.origin.x, tile.terrain.origin.y],
            "cell_size": tile.terrain.cell_size,
            "n_cols": tile.terrain.n_cols,
            "n_rows": tile.terrain.n_rows,
            "elevations": [float(z) for z in tile.terrain.elevations],
        },
    }


def encode_layer_tree(root) -> dict:
    def enc(node):
        return {
            "id": node.id, "name": node.name, "kind": node.kind,
            "visible": node.visible, "children": [enc(c) for c in node.children],
        }
    return {"root": enc(root), "effective": scene_ops.effective_visibility(root)}


def encode_sunlight_report(report: sunlight.SunlightReport) -> dict:
    return {
        "point": encode_point(report.point),
        "date": report.date.isoformat(),
        "step_minutes": report.step_minutes,
        "lit_intervals": [[a.isoformat(), b.isoformat()] for a, b in report.lit_intervals],
        "sunshine_hours": report.sunshine_hours,
    }


def encode_glyphs(build: deformation.GlyphBuild,
                  trends: dict[str, str | None]) -> dict:
    return {
        "glyphs": [
            {
                "point_id": g.point_id,
                "base": encode_point(g.base),
                "height": g.height,
                "direction": g.direction.value,
                "style": g.style,
                "deformation_mm": g.deformation_mm,
                "trend": trends.get(g.point_id),
            }
            for g in build.glyphs
        ],
        "skipped": list(build.skipped),
    }


def encode_forecast(fc: flow.Forecast) -> dict:
    return {
        "station_id": fc.station_id,
        "horizon": fc.horizon,
        "predicted": list(fc.predicted),
        "method_tag": fc.method_tag,
    }


def encode_snapshot(pairs, geometries) -> dict:
    return {
        "segments": [
            {
                "id": seg_id,
                "class": cls.value,
                "mode": geom.mode,
                "geometry": (encode_polyline(geom.geometry) if geom.mode == "line"
                             else encode_polygon(geom.geometry)),
            }
            for (seg_id, cls), geom in zip(pairs, geometries)
        ],
    }


def encode_los(result: terrain.LosResult) -> dict:
    return {
        "visible": result.visible,
        "blocker_id": result.blocker_id,
        "blocked_by_terrain": result.blocked_by_terrain,
        "t": result.t,
    }


# ------------------------------------------------------------ app state

class AppState:
    def __init__(self, scene: CityScene,
                 traffic_store: traffic.TrafficStore | None = None,
                 flows: list[flow.FlowSeries] | None = None,
                 monitoring: list[MonitoringPoint] | None = None,
                 detail_zoom: int | None = None,
                 thresholds: tuple[float, float] | None = None):
        self.scene = scene
        self.detail_zoom = detail_zoom if detail_zoom is not None else env_detail_zoom()
        self.thresholds = thresholds if thresholds is not None else env_thresholds()
        self.tiles = TileService(scene, detail_zoom=self.detail_zoom)
        self.building_index = SpatialIndex.build(building_entries(scene.buildings))
        self.traffic_store = traffic_store if traffic_store is not None else \
            traffic.TrafficStore(seg.id for seg in scene.roads)
        self.flows = {s.station_id: s for s in (flows or [])}
        self.monitoring = list(monitoring or [])
        self.monitoring_index = SpatialIndex.build(point_entries(self.monitoring))
        self.monitoring_by_id = {p.id: p for p in self.monitoring}
        self.shadow_caster = sunlight.ShadowCaster(scene, self.building_index)
        self.layer_root = scene.layer_root
        self.layer_lock = threading.Lock()


# ----------------------------------------------------------- API bodies

class PatchLayerBody(BaseModel):
    visible: bool


class ObservationBody(BaseModel):
    segment_id: str
    timestamp: datetime
    mean_speed_kmh: float = Field(ge=0)


class ObservationsBody(BaseModel):
    observations: list[ObservationBody]


class SunlightBody(BaseModel):
    point: list[float] = Field(min_length=2, max_length=3)
    date: date_type
    step: int = 10


class DeformationBody(BaseModel):
    line_id: str
    buffer_m: float
    scale: float = deformation.DEFAULT_SCALE_M_PER_MM


class LosBody(BaseModel):
    a: list[float] = Field(min_length=3, max_length=3)
    b: list[float] = Field(min_length=3, max_length=3)


class PopulationBody(BaseModel):
    polygon: list[list[float]]


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="urbanlens", version="0.1.0")

    @app.exception_handler(UrbanLensError)
    async def engine_error(request: Request, exc: UrbanLensError):
        if isinstance(exc, NotFoundError):
            status, code = 404, "not-found"
        elif isinstance(exc, ConflictError):
            status, code = 409, "conflict"
        elif isinstance(exc, OutOfBoundsError):
            status, code = 400, "out-of-bounds"
        else:
            status, code = 400, "invalid-argument"
        return JSONResponse(
            status_code=status,
            content={"error": {"code": code, "message": str(exc)}},
        )

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        correlation = str(uuid.uuid4())
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": str(exc),
                               "correlation_id": correlation}},
        )

    @app.get("/layers")
    def get_layers():
        with state.layer_lock:
            return encode_layer_tree(state.layer_root)

    @app.patch("/layers/{layer_id}")
    def patch_layer(layer_id: str, body: PatchLayerBody):
        with state.layer_lock:
            state.layer_root = scene_ops.set_layer_visibility(
                state.layer_root, layer_id, body.visible
            )
            return encode_layer_tree(state.layer_root)

    @app.get("/tiles/{z}/{x}/{y}")
    def get_tile(z: int, x: int, y: int):
        return encode_tile(state.tiles.get_tile(TileKey(zoom=z, x=x, y=y)))

    @app.get("/traffic/current")
    def traffic_current(window: float = DEFAULT_WINDOW_SECONDS,
                        mode: str = "line"):
        at = state.traffic_store.latest_timestamp()
        return _snapshot_payload(state, at, window, mode)

    @app.get("/traffic/at")
    def traffic_at(t: datetime, window: float = DEFAULT_WINDOW_SECONDS,
                   mode: str = "line"):
        if t.tzinfo is None:
            t = t.replace(tzinfo=timezone.utc)
        return _snapshot_payload(state, t, window, mode)

    @app.post("/traffic/observations")
    def post_observations(body: ObservationsBody):
        count = 0
        for entry in body.observations:
            ts = entry.timestamp
            if ts.tzinfo is None:
                ts = ts.replace(tzinfo=timezone.utc)
            state.traffic_store.ingest(traffic.TrafficObservation(
                segment_id=entry.segment_id, timestamp=ts,
                mean_speed=entry.mean_speed_kmh,
            ))
            count += 1
        return {"ingested": count}

    @app.get("/stations/{station_id}/forecast")
    def station_forecast(station_id: str, horizon: int = 24,
                         period: int | None = None,
                         alpha: float = 0.3, k: int | None = None):
        series = state.flows.get(station_id)
        if series is None:
            raise NotFoundError(f"unknown station {station_id!r}")
        fc = flow.forecast(series, horizon=horizon, period=period, alpha=alpha, k=k)
        return encode_forecast(fc)

    @app.post("/analysis/sunlight")
    def analysis_sunlight(body: SunlightBody):
        x, y = body.point[0], body.point[1]
        if len(body.point) == 3:
            z = body.point[2]
        else:
            z = terrain.elevation_at(state.scene.terrain, GeoPoint(x, y)) + 1.5
        report = sunlight.sunshine_hours(
            state.scene, GeoPoint(x, y, z),
            LatLong(state.scene.geo_anchor.lat, state.scene.geo_anchor.lon),
            body.date, body.step, index=state.building_index,
        )
        return encode_sunlight_report(report)

    @app.post("/analysis/deformation")
    def analysis_deformation(body: DeformationBody):
        line = state.scene.metro_by_id(body.line_id)
        if line is None:
            raise NotFoundError(f"unknown metro line {body.line_id!r}")
        selected = deformation.select_points(
            line, state.monitoring, body.buffer_m, index=state.monitoring_index
        )
        build = deformation.make_glyphs(selected, body.scale, state.scene.terrain)
        trends = {
            p.id: (deformation.trend(p).value if len(p.history) >= 2 else None)
            for p in selected
        }
        payload = encode_glyphs(build, trends)
        payload.update({"line_id": body.line_id, "buffer_m": body.buffer_m,
                        "scale": body.scale})
        return payload

    @app.post("/analysis/los")
    def analysis_los(body: LosBody):
        result = terrain.line_of_sight(
            state.scene,
            GeoPoint(*body.a), GeoPoint(*body.b),
            index=state.building_index,
        )
        return encode_los(result)

    @app.post("/analysis/population")
    def analysis_population(body: PopulationBody):
        try:
            query = Polygon(tuple(GeoPoint(float(x), float(y)) for x, y in body.polygon))
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"bad polygon: {exc}") from exc
        estimate = community.population_in_area(list(state.scene.communities), query)
        return {"population": estimate}

    @app.get("/communities/{community_id}/composition")
    def community_composition(community_id: str,
                              dimension: str = Query(pattern="^(age|education)$")):
        record = state.scene.community_by_id(community_id)
        if record is None:
            raise NotFoundError(f"unknown community {community_id!r}")
        fractions = community.composition(record, dimension)
        return {
            "community_id": community_id,
            "dimension": dimension,
            "population": record.population,
            "fractions": fractions,
        }

    @app.get("/buildings/{building_id}")
    def get_building(building_id: str):
        b = state.scene.building_by_id(building_id)
        if b is None:
            raise NotFoundError(f"unknown building {building_id!r}")
        return encode_building(b, extrude_building(b))

    return app


def _snapshot_payload(state: AppState, at: datetime | None, window: float,
                      mode: str) -> dict[str, Any]:
    if mode not in ("line", "plane"):
        raise InvalidArgumentError(f"mode must be 'line' or 'plane', got {mode!r}")
    if at is None:
        pairs = [(seg.id, traffic.CongestionClass.UNKNOWN)
                 for seg in sorted(state.scene.roads, key=lambda s: s.id)]
    else:
        pairs = traffic.condition_snapshot(
            state.traffic_store, state.scene, at, window, state.thresholds
        )
    by_id = {seg.id: seg for seg in state.scene.roads}
    geometries = [
        traffic.condition_geometry(by_id[seg_id], cls, mode)
        for seg_id, cls in pairs
    ]
    payload = encode_snapshot(pairs, geometries)
    payload["at"] = at.isoformat() if at is not None else None
    payload["window_seconds"] = window
    return payload


def serve(state: AppState, host: str = "127.0.0.1", port: int | None = None,
          static_dir: str | None = None) -> None:
    """Run the API under uvicorn; mounts the viewer bundle when provided."""
    import uvicorn

    app = create_app(state)
    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="viewer")
    if port is None:
        port = int(os.environ.get("UL_PORT", 8000))
    uvicorn.run(app, host=host, port=port)
