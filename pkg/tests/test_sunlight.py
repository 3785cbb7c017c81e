import math
from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest

from urbanlens.errors import InvalidArgumentError, OutOfBoundsError
from urbanlens.model import GeoPoint, LatLong
from urbanlens.sunlight import (
    LIT,
    NIGHT,
    SHADOWED,
    SunPosition,
    shadow_test,
    sun_position,
    sunshine_hours,
)

from conftest import flat_terrain, make_scene, rect_building
from solar_reference import reference_lit_seconds, reference_sun_position

# Reference azimuth/elevation tabulated from the NOAA-calculator formulas
# (see solar_reference.py) before wiring these assertions:
# (name, lat, lon, utc iso time, azimuth deg, elevation deg)
REFERENCE_TABLE = [
    ("shenzhen", 22.54, 114.06, "2026-03-20T04:00:00+00:00", 160.4160, 66.0417),
    ("shenzhen", 22.54, 114.06, "2026-06-21T01:00:00+00:00", 78.3475, 42.9597),
    ("shenzhen", 22.54, 114.06, "2026-06-21T09:00:00+00:00", 285.6364, 27.4854),
    ("shenzhen", 22.54, 114.06, "2026-12-21T04:00:00+00:00", 173.1152, 43.7232),
    ("shenzhen", 22.54, 114.06, "2026-12-21T07:30:00+00:00", 227.9007, 25.1368),
    ("shenzhen", 22.54, 114.06, "2025-09-22T02:00:00+00:00", 119.1479, 50.0151),
    ("equator", 0.0, 0.0, "2026-03-20T09:00:00+00:00", 90.1270, 43.1324),
    ("equator", 0.0, 0.0, "2026-03-20T15:00:00+00:00", 270.0089, 46.8490),
    ("equator", 0.0, 0.0, "2026-06-21T12:00:00+00:00", 1.0519, 66.5578),
    ("greenwich", 51.48, 0.0, "2026-06-21T12:00:00+00:00", 179.1100, 61.9558),
    ("greenwich", 51.48, 0.0, "2026-12-21T12:00:00+00:00", 180.4568, 15.0815),
    ("greenwich", 51.48, 0.0, "2026-09-23T08:00:00+00:00", 116.0312, 19.1027),
    ("new_york", 40.71, -74.01, "2026-06-21T17:00:00+00:00", 181.6146, 72.7221),
    ("new_york", 40.71, -74.01, "2026-01-15T18:30:00+00:00", 201.8214, 25.2243),
    ("new_york", 40.71, -74.01, "2025-04-10T13:00:00+00:00", 104.6079, 28.3941),
    ("sydney", -33.87, 151.21, "2026-12-21T02:00:00+00:00", 351.2323, 79.4546),
    ("sydney", -33.87, 151.21, "2026-06-21T02:00:00+00:00", 359.1534, 32.6873),
    ("sydney", -33.87, 151.21, "2025-10-05T05:30:00+00:00", 285.8162, 30.1576),
    ("tokyo", 35.68, 139.69, "2026-03-20T03:00:00+00:00", 184.7779, 54.0335),
    ("tokyo", 35.68, 139.69, "2026-08-01T07:00:00+00:00", 269.9881, 31.9857),
    ("reykjavik", 64.15, -21.94, "2026-06-21T13:00:00+00:00", 169.6264, 48.9963),
    ("reykjavik", 64.15, -21.94, "2026-03-20T13:30:00+00:00", 178.5628, 25.8243),
    ("cape_town", -33.92, 18.42, "2026-01-10T10:00:00+00:00", 48.0968, 73.1456),
    ("cape_town", -33.92, 18.42, "2026-07-01T12:00:00+00:00", 341.3082, 30.6281),
]


def angular_separation(az1, el1, az2, el2) -> float:
    a1, e1, a2, e2 = map(math.radians, (az1, el1, az2, el2))
    c = math.sin(e1) * math.sin(e2) + math.cos(e1) * math.cos(e2) * math.cos(a1 - a2)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


class TestSunPosition:
    def test_frozen_table_consistent_with_reference_formulas(self):
        # guard against transcription slips in the frozen numbers
        for _, lat, lon, iso, az, el in REFERENCE_TABLE:
            raz, rel = reference_sun_position(lat, lon, datetime.fromisoformat(iso))
            assert raz == pytest.approx(az, abs=5e-4)
            assert rel == pytest.approx(el, abs=5e-4)

    @pytest.mark.parametrize("name,lat,lon,iso,ref_az,ref_el", REFERENCE_TABLE)
    def test_reference_table_within_half_degree(self, name, lat, lon, iso, ref_az, ref_el):
        sp = sun_position(LatLong(lat, lon), datetime.fromisoformat(iso))
        assert abs(sp.elevation - ref_el) < 0.5
        d_az = abs((sp.azimuth - ref_az + 180.0) % 360.0 - 180.0)
        assert d_az < 0.5
        assert angular_separation(sp.azimuth, sp.elevation, ref_az, ref_el) < 0.5

    def test_equator_equinox_noon_near_zenith(self):
        sp = sun_position(LatLong(0.0, 0.0), datetime(2026, 3, 20, 12, 8, tzinfo=timezone.utc))
        assert sp.elevation == pytest.approx(90.0, abs=1.0)

    def test_temperate_midnight_is_night(self):
        sp = sun_position(LatLong(48.0, 11.0),
                          datetime(2026, 4, 10, 0, 15, tzinfo=timezone.utc))
        assert sp.elevation < 0

    def test_ranges_hold_over_sweep(self):
        rng = np.random.default_rng(15)
        for _ in range(400):
            lat = float(rng.uniform(-89, 89))
            lon = float(rng.uniform(-180, 180))
            t = datetime(int(rng.integers(1950, 2051)), int(rng.integers(1, 13)),
                         int(rng.integers(1, 28)), int(rng.integers(0, 24)),
                         int(rng.integers(0, 60)), tzinfo=timezone.utc)
            sp = sun_position(LatLong(lat, lon), t)
            assert 0.0 <= sp.azimuth < 360.0
            assert -90.0 <= sp.elevation <= 90.0

    def test_out_of_range_year(self):
        with pytest.raises(InvalidArgumentError):
            sun_position(LatLong(0, 0), datetime(1949, 12, 31, tzinfo=timezone.utc))
        with pytest.raises(InvalidArgumentError):
            sun_position(LatLong(0, 0), datetime(2051, 1, 1, tzinfo=timezone.utc))


class TestShadowTest:
    def scene_with_box(self):
        # 10 m cube with its north wall at y = 510
        return make_scene(buildings=[rect_building("box", 495, 500, 505, 510, height=10.0)])

    def test_open_ground_lit(self):
        state = shadow_test(make_scene(), GeoPoint(500, 500, 0.0),
                            SunPosition(azimuth=180.0, elevation=45.0))
        assert state == LIT

    def test_night_below_horizon(self):
        state = shadow_test(self.scene_with_box(), GeoPoint(500, 520, 0.0),
                            SunPosition(azimuth=10.0, elevation=-5.0))
        assert state == NIGHT

    def test_night_threshold_is_exact_zero(self):
        scene = make_scene()
        assert shadow_test(scene, GeoPoint(1, 1, 0), SunPosition(0.0, 0.0)) == NIGHT
        assert shadow_test(scene, GeoPoint(1, 1, 0), SunPosition(0.0, 1e-9)) == LIT

    def test_analytic_shadow_length(self):
        # sun due south at 45 deg: the 10 m box throws a 10 m shadow north
        scene = self.scene_with_box()
        sun = SunPosition(azimuth=180.0, elevation=45.0)
        near = shadow_test(scene, GeoPoint(500, 515, 0.0), sun)   # 5 m past the wall
        far = shadow_test(scene, GeoPoint(500, 525, 0.0), sun)    # 15 m past the wall
        assert near == SHADOWED
        assert far == LIT

    def test_point_inside_box_is_shadowed(self):
        scene = self.scene_with_box()
        assert shadow_test(scene, GeoPoint(500, 505, 5.0),
                           SunPosition(azimuth=200.0, elevation=50.0)) == SHADOWED

    def test_rooftop_point_is_lit(self):
        scene = self.scene_with_box()
        assert shadow_test(scene, GeoPoint(500, 505, 10.0),
                           SunPosition(azimuth=180.0, elevation=45.0)) == LIT

    def test_out_of_extent(self):
        with pytest.raises(OutOfBoundsError):
            shadow_test(make_scene(), GeoPoint(-10, 0, 0), SunPosition(180.0, 45.0))


SHENZHEN = LatLong(22.54, 114.06)


class TestSunshineHours:
    def test_enclosed_point_zero_hours(self):
        scene = make_scene(buildings=[rect_building("shell", 490, 490, 510, 510, height=50.0)])
        report = sunshine_hours(scene, GeoPoint(500, 500, 1.0), SHENZHEN,
                                date(2026, 6, 21), step=20)
        assert report.sunshine_hours == 0.0
        assert report.lit_intervals == ()

    def test_open_plain_matches_reference_daylight(self):
        scene = make_scene()
        for day in (date(2026, 3, 20), date(2026, 6, 21), date(2026, 12, 21)):
            step = 5
            report = sunshine_hours(scene, GeoPoint(500, 500, 1.0), SHENZHEN, day, step)
            window_start = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
            expected = reference_lit_seconds(SHENZHEN.lat, SHENZHEN.lon,
                                             window_start, window_start + timedelta(days=1))
            assert abs(report.sunshine_hours - expected / 3600.0) <= step / 60.0

    def test_intervals_disjoint_ordered_and_sum_to_hours(self):
        scene = make_scene(buildings=[rect_building("b", 495, 505, 505, 515, height=25.0)])
        report = sunshine_hours(scene, GeoPoint(500, 520, 0.5), SHENZHEN,
                                date(2026, 12, 21), step=10)
        for (a0, a1), (b0, b1) in zip(report.lit_intervals, report.lit_intervals[1:]):
            assert a1 <= b0
        total = sum((b - a).total_seconds() for a, b in report.lit_intervals)
        assert abs(total / 3600.0 - report.sunshine_hours) <= report.step_minutes / 60.0

    def test_monotone_under_occluder_removal(self):
        tall = rect_building("tower", 480, 505, 520, 525, height=80.0)
        with_tower = make_scene(buildings=[tall])
        without = make_scene()
        pt = GeoPoint(500, 500, 0.5)
        day = date(2026, 6, 21)
        occluded = sunshine_hours(with_tower, pt, SHENZHEN, day, step=15)
        open_sky = sunshine_hours(without, pt, SHENZHEN, day, step=15)
        assert open_sky.sunshine_hours >= occluded.sunshine_hours

    def test_halving_step_refinement_bound(self):
        scene = make_scene(buildings=[rect_building("b", 495, 505, 505, 515, height=25.0)])
        pt = GeoPoint(500, 520, 0.5)
        day = date(2026, 9, 22)
        coarse = sunshine_hours(scene, pt, SHENZHEN, day, step=20)
        fine = sunshine_hours(scene, pt, SHENZHEN, day, step=10)
        assert fine.sunshine_hours >= coarse.sunshine_hours - 20 / 60.0

    def test_step_domain(self):
        scene = make_scene()
        for bad in (0, 61, -5):
            with pytest.raises(InvalidArgumentError):
                sunshine_hours(scene, GeoPoint(1, 1, 1), SHENZHEN, date(2026, 1, 1), bad)
