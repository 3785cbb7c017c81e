"""Command-line interface: synth, validate, serve, analyze.

Exit codes: 0 success, 1 validation failure, 2 usage error (click's own
convention for bad arguments).
"""

from __future__ import annotations

import json
import sys
from datetime import date as date_type

import click

from urbanlens import community, deformation, flow as flow_ops, server, sunlight
from urbanlens.errors import SceneSyntaxError, UrbanLensError, ValidationError
from urbanlens.ingest import (
    load_scene,
    read_flows_csv,
    read_monitoring_csv,
    read_observations_csv,
)
from urbanlens.model import GeoPoint, LatLong
from urbanlens.synth import SynthCity, SynthSpec, synth_city, write_synth
from urbanlens.terrain import elevation_at


@click.group()
def main() -> None:
    """City-scale 3D geospatial analysis engine."""


@main.command("synth")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", "outdir", type=click.Path(file_okay=False), required=True)
@click.option("--buildings", type=int, default=500, show_default=True)
@click.option("--extent", type=float, default=4000.0, show_default=True)
@click.option("--roads", type=(int, int), default=(6, 6), show_default=True)
@click.option("--monitoring-points", type=int, default=80, show_default=True)
@click.option("--communities", type=(int, int), default=(4, 4), show_default=True)
def synth_cmd(seed, outdir, buildings, extent, roads, monitoring_points, communities):
    """Generate a deterministic synthetic city into OUT."""
    spec = SynthSpec(
        seed=seed, building_count=buildings, extent=extent,
        road_grid_dims=roads, metro_point_count=monitoring_points,
        community_grid_dims=communities,
    )
    city = synth_city(spec)
    files = write_synth(city, outdir)
    click.echo(json.dumps({"seed": seed, "files": files,
                           "buildings": len(city.scene.buildings),
                           "roads": len(city.scene.roads),
                           "communities": len(city.scene.communities)}, indent=2))


@main.command("validate")
@click.argument("scene_path", type=click.Path(exists=True, dir_okay=False))
def validate_cmd(scene_path):
    """Validate a scene document; exit 1 with the violation list if invalid."""
    try:
        scene = load_scene(scene_path)
    except SceneSyntaxError as exc:
        click.echo(f"syntax error: {exc}", err=True)
        sys.exit(1)
    except ValidationError as exc:
        click.echo(f"{len(exc.violations)} violation(s):", err=True)
        for v in exc.violations:
            click.echo(f"  - {v}", err=True)
        sys.exit(1)
    click.echo(json.dumps({
        "valid": True,
        "buildings": len(scene.buildings),
        "roads": len(scene.roads),
        "metro_lines": len(scene.metro_lines),
        "communities": len(scene.communities),
    }, indent=2))


@main.command("serve")
@click.argument("scene_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--traffic", "traffic_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--flows", "flows_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--monitoring", "monitoring_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help="Defaults to UL_PORT or 8000.")
@click.option("--detail-zoom", type=int, default=None,
              help="Zoom from which tiles include meshes and rooms.")
@click.option("--static-dir", type=click.Path(file_okay=False),
              help="Optional viewer bundle to mount at /.")
def serve_cmd(scene_path, traffic_csv, flows_csv, monitoring_csv,
              host, port, detail_zoom, static_dir):
    """Serve the scene and analyses over HTTP."""
    state = _build_state(scene_path, traffic_csv, flows_csv, monitoring_csv, detail_zoom)
    server.serve(state, host=host, port=port, static_dir=static_dir)


def _build_state(scene_path, traffic_csv, flows_csv, monitoring_csv, detail_zoom=None):
    try:
        scene = load_scene(scene_path)
    except (SceneSyntaxError, ValidationError) as exc:
        click.echo(f"invalid scene: {exc}", err=True)
        sys.exit(1)
    flows = read_flows_csv(flows_csv) if flows_csv else []
    monitoring = read_monitoring_csv(monitoring_csv) if monitoring_csv else []
    state = server.AppState(scene, flows=flows, monitoring=monitoring,
                            detail_zoom=detail_zoom)
    if traffic_csv:
        for obs in read_observations_csv(traffic_csv):
            state.traffic_store.ingest(obs)
    return state


@main.group("analyze")
def analyze() -> None:
    """Run one analysis and print its JSON result."""


@analyze.command("sunlight")
@click.argument("scene_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--x", type=float, required=True)
@click.option("--y", type=float, required=True)
@click.option("--z", type=float, default=None, help="Defaults to terrain + 1.5 m.")
@click.option("--date", "day", type=click.DateTime(formats=["%Y-%m-%d"]), required=True)
@click.option("--step", type=int, default=10, show_default=True)
def analyze_sunlight(scene_path, x, y, z, day, step):
    scene = _load_or_exit(scene_path)
    if z is None:
        z = elevation_at(scene.terrain, GeoPoint(x, y)) + 1.5
    report = sunlight.sunshine_hours(
        scene, GeoPoint(x, y, z),
        LatLong(scene.geo_anchor.lat, scene.geo_anchor.lon),
        date_type(day.year, day.month, day.day), step,
    )
    click.echo(json.dumps(server.encode_sunlight_report(report), indent=2))


@analyze.command("deformation")
@click.argument("scene_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--monitoring", "monitoring_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--line", "line_id", required=True)
@click.option("--buffer", "buffer_m", type=float, default=100.0, show_default=True,
              help="Buffer in meters; 100 and 50 are the standard presets.")
@click.option("--scale", type=float, default=deformation.DEFAULT_SCALE_M_PER_MM,
              show_default=True, help="Cylinder meters per millimeter.")
def analyze_deformation(scene_path, monitoring_csv, line_id, buffer_m, scale):
    scene = _load_or_exit(scene_path)
    points = read_monitoring_csv(monitoring_csv)
    line = scene.metro_by_id(line_id)
    if line is None:
        raise click.UsageError(f"unknown metro line {line_id!r}")
    try:
        selected = deformation.select_points(line, points, buffer_m)
        build = deformation.make_glyphs(selected, scale, scene.terrain)
    except UrbanLensError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    trends = {p.id: (deformation.trend(p).value if len(p.history) >= 2 else None)
              for p in selected}
    payload = server.encode_glyphs(build, trends)
    payload.update({"line_id": line_id, "buffer_m": buffer_m, "scale": scale})
    click.echo(json.dumps(payload, indent=2))


@analyze.command("density")
@click.argument("scene_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--community", "community_id", default=None,
              help="Restrict to one community id.")
def analyze_density(scene_path, community_id):
    scene = _load_or_exit(scene_path)
    records = list(scene.communities)
    if community_id is not None:
        records = [c for c in records if c.id == community_id]
        if not records:
            raise click.UsageError(f"unknown community {community_id!r}")
    payload = [
        {"id": c.id, "name": c.name, "population": c.population,
         "density_per_km2": community.population_density(c)}
        for c in records
    ]
    click.echo(json.dumps(payload, indent=2))


@analyze.command("forecast")
@click.option("--flows", "flows_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--station", "station_id", required=True)
@click.option("--horizon", type=int, default=24, show_default=True)
@click.option("--period", type=int, default=None)
@click.option("--alpha", type=float, default=0.3, show_default=True)
@click.option("--k", type=int, default=None)
def analyze_forecast(flows_csv, station_id, horizon, period, alpha, k):
    series = {s.station_id: s for s in read_flows_csv(flows_csv)}.get(station_id)
    if series is None:
        raise click.UsageError(f"unknown station {station_id!r}")
    try:
        fc = flow_ops.forecast(series, horizon=horizon, period=period, alpha=alpha, k=k)
    except UrbanLensError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps(server.encode_forecast(fc), indent=2))


def _load_or_exit(scene_path):
    try:
        return load_scene(scene_path)
    except (SceneSyntaxError, ValidationError) as exc:
        click.echo(f"invalid scene: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
