"""File I/O: the scene JSON document and the three tabular CSV streams.

The scene document is self-contained JSON with GeoJSON-style geometry
encodings. Serialization is deterministic (sorted keys, objects ordered by
id) so identical scenes produce byte-identical files. Loading validates
with collect-all semantics: every schema problem and invariant violation is
reported, not just the first.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from urbanlens.errors import SceneSyntaxError, ValidationError
from urbanlens.flow import FlowSeries
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
from urbanlens.validate import Violation, validate_scene

SCENE_FORMAT = "urbanlens-scene"
SCENE_VERSION = 1

OBSERVATION_HEADER = ["segment_id", "timestamp_iso8601", "mean_speed_kmh"]
MONITORING_HEADER = ["point_id", "x", "y", "timestamp_iso8601", "deformation_mm"]
FLOW_HEADER_PREFIX = ["station_id", "start_iso8601", "interval_seconds"]


# ---------------------------------------------------------------- geometry

def _encode_polygon(p: Polygon) -> dict:
    # floats coerced so int-typed coordinates serialize canonically
    ring = [[float(v.x), float(v.y)] for v in p.ring]
    ring.append(ring[0])  # GeoJSON rings close explicitly
    return {"type": "Polygon", "coordinates": [ring]}


def _encode_polyline(line: Polyline) -> dict:
    return {"type": "LineString",
            "coordinates": [[float(v.x), float(v.y)] for v in line.vertices]}


def _decode_polygon(obj, where: str, problems: list[Violation]) -> Polygon | None:
    try:
        if obj["type"] != "Polygon":
            raise ValueError(f"geometry type {obj['type']!r}, expected Polygon")
        ring = obj["coordinates"][0]
        pts = [GeoPoint(float(x), float(y)) for x, y in ring]
        if len(pts) >= 2 and (pts[0].x, pts[0].y) == (pts[-1].x, pts[-1].y):
            pts = pts[:-1]  # drop the explicit closure
        return Polygon(tuple(pts))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        problems.append(Violation("schema", where, "polygon geometry", str(exc)))
        return None


def _decode_polyline(obj, where: str, problems: list[Violation]) -> Polyline | None:
    try:
        if obj["type"] != "LineString":
            raise ValueError(f"geometry type {obj['type']!r}, expected LineString")
        pts = [GeoPoint(float(x), float(y)) for x, y in obj["coordinates"]]
        return Polyline(tuple(pts))
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(Violation("schema", where, "linestring geometry", str(exc)))
        return None


# ------------------------------------------------------------------ scene

def save_scene(scene: CityScene, path: str | Path) -> None:
    """Write the scene document; byte-identical for equal scenes."""
    doc = scene_to_document(scene)
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    Path(path).write_text(payload, encoding="utf-8")


def scene_to_document(scene: CityScene) -> dict:
    terrain = scene.terrain
    return {
        "format": SCENE_FORMAT,
        "version": SCENE_VERSION,
        "geo_anchor": {"lat": float(scene.geo_anchor.lat), "lon": float(scene.geo_anchor.lon)},
        "terrain": {
            "origin": [float(terrain.origin.x), float(terrain.origin.y)],
            "cell_size": float(terrain.cell_size),
            "n_cols": terrain.n_cols,
            "n_rows": terrain.n_rows,
            "elevations": [float(z) for z in terrain.elevations],
        },
        "buildings": [
            {
                "id": b.id,
                "footprint": _encode_polygon(b.footprint),
                "base_elevation": float(b.base_elevation),
                "height": float(b.height),
                "rooms": [[float(r.min_x), float(r.min_y), float(r.min_z),
                           float(r.max_x), float(r.max_y), float(r.max_z)]
                          for r in b.rooms],
            }
            for b in sorted(scene.buildings, key=lambda b: b.id)
        ],
        "roads": [
            {
                "id": r.id,
                "path": _encode_polyline(r.path),
                "lanes": r.lanes,
                "free_flow_speed_kmh": float(r.free_flow_speed),
            }
            for r in sorted(scene.roads, key=lambda r: r.id)
        ],
        "metro_lines": [
            {"id": m.id, "name": m.name, "path": _encode_polyline(m.path)}
            for m in sorted(scene.metro_lines, key=lambda m: m.id)
        ],
        "communities": [
            {
                "id": c.id,
                "name": c.name,
                "boundary": _encode_polygon(c.boundary),
                "population": c.population,
                "age_bins": dict(sorted(c.age_bins.items())),
                "education_bins": dict(sorted(c.education_bins.items())),
            }
            for c in sorted(scene.communities, key=lambda c: c.id)
        ],
        "layers": _encode_layer(scene.layer_root),
    }


def _encode_layer(node: LayerNode) -> dict:
    return {
        "id": node.id,
        "name": node.name,
        "kind": node.kind,
        "visible": node.visible,
        "children": [_encode_layer(c) for c in node.children],
    }


def _decode_layer(obj, problems: list[Violation]) -> LayerNode | None:
    try:
        return LayerNode(
            id=str(obj["id"]),
            name=str(obj["name"]),
            kind=str(obj["kind"]),
            visible=bool(obj["visible"]),
            children=tuple(
                c for c in (_decode_layer(ch, problems) for ch in obj.get("children", []))
                if c is not None
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(Violation("schema", "layers", "layer node fields", str(exc)))
        return None


def load_scene(path: str | Path) -> CityScene:
    """Parse and fully validate a scene document.

    Raises SceneSyntaxError for malformed JSON (with line/column) and
    ValidationError carrying every schema and invariant violation found.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneSyntaxError(
            f"{path}: {exc.msg} at line {exc.lineno}, column {exc.colno}",
            line=exc.lineno, column=exc.colno,
        ) from exc
    scene, problems = document_to_scene(doc)
    if problems:
        raise ValidationError(problems)
    return scene


def document_to_scene(doc: dict) -> tuple[CityScene, list[Violation]]:
    problems: list[Violation] = []
    if not isinstance(doc, dict):
        return _empty_scene(), [Violation("schema", "document", "top-level object",
                                          f"got {type(doc).__name__}")]
    if doc.get("format") != SCENE_FORMAT:
        problems.append(Violation("schema", "document", "format marker",
                                  f"expected {SCENE_FORMAT!r}, got {doc.get('format')!r}"))

    terrain = _decode_terrain(doc.get("terrain"), problems)

    anchor = LatLong(0.0, 0.0)
    try:
        raw = doc["geo_anchor"]
        anchor = LatLong(float(raw["lat"]), float(raw["lon"]))
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(Violation("schema", "geo_anchor", "lat/lon fields", str(exc)))

    buildings = []
    for i, raw in enumerate(doc.get("buildings", [])):
        b = _decode_building(raw, i, problems)
        if b is not None:
            buildings.append(b)
    roads = []
    for i, raw in enumerate(doc.get("roads", [])):
        r = _decode_road(raw, i, problems)
        if r is not None:
            roads.append(r)
    metro = []
    for i, raw in enumerate(doc.get("metro_lines", [])):
        m = _decode_metro(raw, i, problems)
        if m is not None:
            metro.append(m)
    communities = []
    for i, raw in enumerate(doc.get("communities", [])):
        c = _decode_community(raw, i, problems)
        if c is not None:
            communities.append(c)

    layer_root = None
    if "layers" in doc:
        layer_root = _decode_layer(doc["layers"], problems)
    if layer_root is None:
        layer_root = LayerNode(id="root", name="Scene", kind="analysis-result")

    scene = CityScene(
        terrain=terrain,
        buildings=tuple(buildings),
        roads=tuple(roads),
        metro_lines=tuple(metro),
        communities=tuple(communities),
        layer_root=layer_root,
        geo_anchor=anchor,
    )
    problems.extend(validate_scene(scene))
    return scene, problems


def _empty_scene() -> CityScene:
    return CityScene(
        terrain=TerrainGrid(GeoPoint(0, 0), 1.0, 2, 2, np.zeros(4)),
        buildings=(), roads=(), metro_lines=(), communities=(),
        layer_root=LayerNode(id="root", name="Scene", kind="analysis-result"),
        geo_anchor=LatLong(0.0, 0.0),
    )


def _decode_terrain(raw, problems: list[Violation]) -> TerrainGrid:
    try:
        origin = GeoPoint(float(raw["origin"][0]), float(raw["origin"][1]))
        return TerrainGrid(
            origin=origin,
            cell_size=float(raw["cell_size"]),
            n_cols=int(raw["n_cols"]),
            n_rows=int(raw["n_rows"]),
            elevations=np.asarray(raw["elevations"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        problems.append(Violation("schema", "terrain", "terrain fields", str(exc)))
        return TerrainGrid(GeoPoint(0, 0), 1.0, 2, 2, np.zeros(4))


def _decode_building(raw, i: int, problems: list[Violation]) -> Building | None:
    where = f"buildings[{i}]"
    try:
        bid = str(raw["id"])
        footprint = _decode_polygon(raw["footprint"], f"{where} ({bid})", problems)
        if footprint is None:
            return None
        rooms = tuple(
            Box(float(r[0]), float(r[1]), float(r[2]),
                float(r[3]), float(r[4]), float(r[5]))
            for r in raw.get("rooms", [])
        )
        return Building(
            id=bid, footprint=footprint,
            height=float(raw["height"]),
            base_elevation=float(raw.get("base_elevation", 0.0)),
            rooms=rooms,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        problems.append(Violation("schema", where, "building fields", str(exc)))
        return None


def _decode_road(raw, i: int, problems: list[Violation]) -> RoadSegment | None:
    where = f"roads[{i}]"
    try:
        rid = str(raw["id"])
        path = _decode_polyline(raw["path"], f"{where} ({rid})", problems)
        if path is None:
            return None
        return RoadSegment(
            id=rid, path=path,
            lanes=int(raw["lanes"]),
            free_flow_speed=float(raw["free_flow_speed_kmh"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(Violation("schema", where, "road fields", str(exc)))
        return None


def _decode_metro(raw, i: int, problems: list[Violation]) -> MetroLine | None:
    where = f"metro_lines[{i}]"
    try:
        mid = str(raw["id"])
        path = _decode_polyline(raw["path"], f"{where} ({mid})", problems)
        if path is None:
            return None
        return MetroLine(id=mid, name=str(raw.get("name", mid)), path=path)
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(Violation("schema", where, "metro fields", str(exc)))
        return None


def _decode_community(raw, i: int, problems: list[Violation]) -> CommunityRecord | None:
    where = f"communities[{i}]"
    try:
        cid = str(raw["id"])
        boundary = _decode_polygon(raw["boundary"], f"{where} ({cid})", problems)
        if boundary is None:
            return None
        return CommunityRecord(
            id=cid, name=str(raw.get("name", cid)), boundary=boundary,
            population=int(raw["population"]),
            age_bins={str(k): int(v) for k, v in raw["age_bins"].items()},
            education_bins={str(k): int(v) for k, v in raw["education_bins"].items()},
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        problems.append(Violation("schema", where, "community fields", str(exc)))
        return None


# ------------------------------------------------------------------- CSVs

def _parse_ts(value: str) -> datetime:
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _format_ts(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat()


def read_observations_csv(path: str | Path) -> list[TrafficObservation]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != OBSERVATION_HEADER:
            raise ValidationError([Violation(
                "csv", str(path), "observation header",
                f"expected {OBSERVATION_HEADER}, got {header}",
            )])
        return [
            TrafficObservation(
                segment_id=row[0],
                timestamp=_parse_ts(row[1]),
                mean_speed=float(row[2]),
            )
            for row in reader if row
        ]


def write_observations_csv(observations, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(OBSERVATION_HEADER)
        for obs in observations:
            writer.writerow([obs.segment_id, _format_ts(obs.timestamp),
                             _fmt_float(obs.mean_speed)])


def read_flows_csv(path: str | Path) -> list[FlowSeries]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:3] != FLOW_HEADER_PREFIX:
            raise ValidationError([Violation(
                "csv", str(path), "flow header",
                f"expected {FLOW_HEADER_PREFIX} + counts, got {header}",
            )])
        out = []
        for row in reader:
            if not row:
                continue
            out.append(FlowSeries(
                station_id=row[0],
                start=_parse_ts(row[1]),
                interval=timedelta(seconds=float(row[2])),
                counts=tuple(float(c) for c in row[3:]),
            ))
        return out


def write_flows_csv(series_list, path: str | Path) -> None:
    max_len = max((len(s.counts) for s in series_list), default=0)
    header = FLOW_HEADER_PREFIX + [f"count_{i + 1}" for i in range(max_len)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in series_list:
            writer.writerow(
                [s.station_id, _format_ts(s.start), _fmt_float(s.interval.total_seconds())]
                + [_fmt_float(c) for c in s.counts]
            )


def read_monitoring_csv(path: str | Path) -> list[MonitoringPoint]:
    """Rows are individual readings; grouped per point, history time-sorted."""
    rows: dict[str, list[tuple[datetime, float]]] = {}
    positions: dict[str, GeoPoint] = {}
    problems: list[Violation] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MONITORING_HEADER:
            raise ValidationError([Violation(
                "csv", str(path), "monitoring header",
                f"expected {MONITORING_HEADER}, got {header}",
            )])
        for row in reader:
            if not row:
                continue
            pid = row[0]
            pos = GeoPoint(float(row[1]), float(row[2]))
            ts = _parse_ts(row[3])
            mm = float(row[4])
            if not math.isfinite(mm):
                problems.append(Violation("monitoring", pid, "finite deformation",
                                          f"got {mm}"))
                continue
            if pid in positions and positions[pid] != pos:
                problems.append(Violation("monitoring", pid, "consistent position",
                                          f"{positions[pid]} vs {pos}"))
            positions.setdefault(pid, pos)
            rows.setdefault(pid, []).append((ts, mm))
    points = []
    for pid in sorted(rows):
        history = sorted(rows[pid], key=lambda e: e[0])
        for (t1, _), (t2, _) in zip(history, history[1:]):
            if t1 == t2:
                problems.append(Violation("monitoring", pid,
                                          "strictly increasing timestamps",
                                          f"duplicate {t1.isoformat()}"))
        points.append(MonitoringPoint(id=pid, position=positions[pid],
                                      history=tuple(history)))
    if problems:
        raise ValidationError(problems)
    return points


def write_monitoring_csv(points, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MONITORING_HEADER)
        for p in points:
            for ts, mm in p.history:
                writer.writerow([p.id, _fmt_float(p.position.x),
                                 _fmt_float(p.position.y), _format_ts(ts),
                                 _fmt_float(mm)])


def _fmt_float(x: float) -> str:
    # repr round-trips exactly and never produces locale surprises
    return repr(float(x))
