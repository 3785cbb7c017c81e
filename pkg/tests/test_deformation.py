from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from urbanlens.deformation import (
    Direction,
    Trend,
    make_glyphs,
    ols_slope_mm_per_day,
    select_points,
    trend,
)
from urbanlens.errors import InsufficientDataError, InvalidArgumentError
from urbanlens.geometry import point_polyline_distance
from urbanlens.model import GeoPoint, MetroLine, MonitoringPoint, Polyline

from conftest import flat_terrain

T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


def mon(pid, x, y, deformations=(), day_step=1.0):
    history = tuple(
        (T0 + timedelta(days=i * day_step), float(d)) for i, d in enumerate(deformations)
    )
    return MonitoringPoint(id=pid, position=GeoPoint(x, y), history=history)


LINE = MetroLine(id="m1", name="Line 1",
                 path=Polyline((GeoPoint(0, 500), GeoPoint(1000, 500))))


class TestSelectPoints:
    def test_paper_presets_60m_point(self):
        p = mon("p", 400, 560, (1.0,))  # 60 m off the line
        assert select_points(LINE, [p], 100.0) == [p]
        assert select_points(LINE, [p], 50.0) == []

    def test_point_on_line_always_selected(self):
        p = mon("p", 123, 500, (0.5,))
        assert select_points(LINE, [p], 1.0) == [p]

    def test_non_positive_buffer(self):
        with pytest.raises(InvalidArgumentError):
            select_points(LINE, [], 0.0)
        with pytest.raises(InvalidArgumentError):
            select_points(LINE, [], -50.0)

    def test_ordered_by_chainage(self):
        pts = [mon("far", 900, 510, (1,)), mon("near", 100, 490, (1,)),
               mon("mid", 480, 530, (1,))]
        assert [p.id for p in select_points(LINE, pts, 100.0)] == ["near", "mid", "far"]

    def test_selection_monotone_in_buffer(self):
        rng = np.random.default_rng(3)
        pts = [mon(f"p{i:04d}", rng.uniform(0, 1000), rng.uniform(300, 700), (1,))
               for i in range(400)]
        chosen_50 = {p.id for p in select_points(LINE, pts, 50.0)}
        chosen_100 = {p.id for p in select_points(LINE, pts, 100.0)}
        assert chosen_50 <= chosen_100

    def test_random_field_matches_brute_force(self):
        rng = np.random.default_rng(9)
        line = MetroLine(id="m2", name="bend", path=Polyline((
            GeoPoint(0, 0), GeoPoint(300, 200), GeoPoint(700, 150), GeoPoint(1000, 400),
        )))
        pts = [mon(f"p{i:04d}", rng.uniform(0, 1000), rng.uniform(0, 600), (1,))
               for i in range(2000)]
        for buffer_m in (50.0, 100.0, 200.0):
            expected = {p.id for p in pts
                        if point_polyline_distance(p.position, line.path) <= buffer_m}
            got = {p.id for p in select_points(line, pts, buffer_m)}
            assert got == expected


class TestMakeGlyphs:
    def test_lifting_up_cylinder(self):
        build = make_glyphs([mon("p", 10, 10, (5.0, 20.0))], scale=1.0,
                            terrain=flat_terrain())
        (glyph,) = build.glyphs
        assert glyph.direction == Direction.UP
        assert glyph.height == 20.0
        assert glyph.style == "cylinder"

    def test_sinking_down_cylinder(self):
        build = make_glyphs([mon("p", 10, 10, (-5.0,))], scale=1.0,
                            terrain=flat_terrain())
        (glyph,) = build.glyphs
        assert glyph.direction == Direction.DOWN
        assert glyph.height == 5.0

    def test_zero_deformation_point_style(self):
        build = make_glyphs([mon("p", 10, 10, (0.0,))], scale=1.0,
                            terrain=flat_terrain())
        (glyph,) = build.glyphs
        assert glyph.style == "point"
        assert glyph.height == 0.0
        assert glyph.direction == Direction.FLAT

    def test_base_sits_on_terrain(self):
        build = make_glyphs([mon("p", 10, 10, (3.0,))], scale=0.5,
                            terrain=flat_terrain(elevation=42.0))
        assert build.glyphs[0].base == GeoPoint(10, 10, 42.0)
        assert build.glyphs[0].height == 1.5

    def test_empty_history_skipped_with_diagnostics(self):
        build = make_glyphs([mon("empty", 1, 1), mon("ok", 2, 2, (1.0,))],
                            scale=1.0, terrain=flat_terrain())
        assert build.skipped == ("empty",)
        assert [g.point_id for g in build.glyphs] == ["ok"]

    def test_height_strictly_monotone_in_magnitude(self):
        rng = np.random.default_rng(5)
        ds = rng.uniform(-40, 40, 200)
        pts = [mon(f"p{i:03d}", 5 + i, 5, (float(d),)) for i, d in enumerate(ds)]
        build = make_glyphs(pts, scale=0.5, terrain=flat_terrain())
        heights = {g.point_id: g.height for g in build.glyphs}
        order = sorted(range(200), key=lambda i: abs(ds[i]))
        for a, b in zip(order, order[1:]):
            if abs(ds[a]) < abs(ds[b]):
                assert heights[f"p{a:03d}"] < heights[f"p{b:03d}"]

    def test_bad_scale(self):
        with pytest.raises(InvalidArgumentError):
            make_glyphs([], scale=0.0, terrain=flat_terrain())


class TestTrend:
    def test_steady_rise_is_lifting(self):
        assert trend(mon("p", 0, 0, (0, 1, 2, 3, 4))) == Trend.LIFTING

    def test_steady_fall_is_sinking(self):
        assert trend(mon("p", 0, 0, (4, 3, 2, 1, 0))) == Trend.SINKING

    def test_constant_history_stable(self):
        assert trend(mon("p", 0, 0, (2.5, 2.5, 2.5))) == Trend.STABLE

    def test_slow_drift_below_epsilon_is_stable(self):
        # 0.05 mm over 30 days, below the 0.1 mm / 30 d threshold
        p = mon("p", 0, 0, (0.0, 0.05), day_step=30.0)
        assert trend(p) == Trend.STABLE

    def test_three_point_slope_matches_closed_form(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            ds = rng.uniform(-10, 10, 3)
            gaps = rng.uniform(0.5, 10.0, 2)
            history = [(T0, float(ds[0])),
                       (T0 + timedelta(days=float(gaps[0])), float(ds[1])),
                       (T0 + timedelta(days=float(gaps[0] + gaps[1])), float(ds[2]))]
            p = MonitoringPoint(id="p", position=GeoPoint(0, 0), history=tuple(history))
            xs = np.array([0.0, gaps[0], gaps[0] + gaps[1]])
            ys = ds
            closed = (np.sum((xs - xs.mean()) * (ys - ys.mean()))
                      / np.sum((xs - xs.mean()) ** 2))
            assert ols_slope_mm_per_day(p) == pytest.approx(closed, abs=1e-9)

    def test_invariant_under_constant_offset(self):
        base = (1.0, -2.0, 4.0, 3.5, 5.0)
        shifted = tuple(d + 123.4 for d in base)
        assert trend(mon("a", 0, 0, base)) == trend(mon("b", 0, 0, shifted))
        assert ols_slope_mm_per_day(mon("a", 0, 0, base)) == pytest.approx(
            ols_slope_mm_per_day(mon("b", 0, 0, shifted)), abs=1e-9)

    def test_short_history_raises(self):
        with pytest.raises(InsufficientDataError):
            trend(mon("p", 0, 0, (1.0,)))
