import json

import pytest
from click.testing import CliRunner

from urbanlens import flow, server
from urbanlens.cli import main
from urbanlens.ingest import read_flows_csv
from urbanlens.synth import write_synth


@pytest.fixture(scope="module")
def city_dir(tmp_path_factory, small_city):
    outdir = tmp_path_factory.mktemp("city")
    write_synth(small_city, outdir)
    return outdir


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


class TestSynthValidate:
    def test_synth_then_validate_ok(self, tmp_path):
        res = run("synth", "--seed", 5, "--out", tmp_path / "c",
                  "--buildings", 40, "--extent", 1500)
        assert res.exit_code == 0, res.output
        manifest = json.loads(res.output)
        assert manifest["buildings"] == 40

        res2 = run("validate", tmp_path / "c" / "scene.json")
        assert res2.exit_code == 0, res2.output
        assert json.loads(res2.output)["valid"] is True

    def test_validate_corrupted_file_exits_1(self, city_dir, tmp_path):
        doc = json.loads((city_dir / "scene.json").read_text())
        doc["buildings"][0]["height"] = -10.0
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        res = run("validate", bad)
        assert res.exit_code == 1
        assert "height > 0" in res.output

    def test_validate_syntax_error_exits_1(self, tmp_path):
        bad = tmp_path / "nonsense.json"
        bad.write_text("{not json")
        res = run("validate", bad)
        assert res.exit_code == 1

    def test_missing_file_usage_error(self):
        res = run("validate", "/does/not/exist.json")
        assert res.exit_code == 2


class TestAnalyze:
    def test_forecast_matches_module_call(self, city_dir, small_city):
        res = run("analyze", "forecast", "--flows", city_dir / "flows.csv",
                  "--station", "station-01", "--horizon", 12,
                  "--period", 168, "--alpha", 0.3, "--k", 24)
        assert res.exit_code == 0, res.output
        series = {s.station_id: s for s in read_flows_csv(city_dir / "flows.csv")}["station-01"]
        direct = server.encode_forecast(
            flow.forecast(series, horizon=12, period=168, alpha=0.3, k=24))
        assert json.loads(res.output) == json.loads(json.dumps(direct))

    def test_forecast_unknown_station_usage_error(self, city_dir):
        res = run("analyze", "forecast", "--flows", city_dir / "flows.csv",
                  "--station", "ghost")
        assert res.exit_code == 2

    def test_density_lists_communities(self, city_dir, small_city):
        res = run("analyze", "density", city_dir / "scene.json")
        assert res.exit_code == 0, res.output
        rows = json.loads(res.output)
        assert len(rows) == len(small_city.scene.communities)
        assert all(r["density_per_km2"] > 0 for r in rows)

    def test_sunlight_runs(self, city_dir):
        res = run("analyze", "sunlight", city_dir / "scene.json",
                  "--x", 1000, "--y", 1000, "--date", "2026-06-21", "--step", 30)
        assert res.exit_code == 0, res.output
        body = json.loads(res.output)
        assert body["step_minutes"] == 30
        assert 0.0 <= body["sunshine_hours"] <= 24.0

    def test_deformation_with_presets(self, city_dir):
        res = run("analyze", "deformation", city_dir / "scene.json",
                  "--monitoring", city_dir / "monitoring.csv",
                  "--line", "metro-1", "--buffer", 100)
        assert res.exit_code == 0, res.output
        body = json.loads(res.output)
        assert body["buffer_m"] == 100.0
        assert body["glyphs"]
        for glyph in body["glyphs"]:
            if glyph["deformation_mm"] > 0:
                assert glyph["direction"] == "up"
            elif glyph["deformation_mm"] < 0:
                assert glyph["direction"] == "down"
