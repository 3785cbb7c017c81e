import numpy as np
import pytest

from urbanlens.errors import ConflictError, InvalidArgumentError
from urbanlens.model import GeoPoint, Polyline
from urbanlens.spatial import Aabb, SpatialIndex


def random_boxes(rng, n, extent=1000.0, max_size=25.0):
    lo = rng.uniform(0, extent, (n, 2))
    size = rng.uniform(0.5, max_size, (n, 2))
    return [
        (f"box-{i:05d}", Aabb(lo[i, 0], lo[i, 1], lo[i, 0] + size[i, 0], lo[i, 1] + size[i, 1]))
        for i in range(n)
    ]


def scan_range(entries, window: Aabb) -> set[str]:
    # brute-force oracle (vectorized for speed, independent of the tree)
    arr = np.array([(b.min_x, b.min_y, b.max_x, b.max_y) for _, b in entries])
    mask = (
        (arr[:, 0] <= window.max_x) & (arr[:, 2] >= window.min_x)
        & (arr[:, 1] <= window.max_y) & (arr[:, 3] >= window.min_y)
    )
    return {entries[i][0] for i in np.nonzero(mask)[0]}


def seg_dist_oracle(px, py, verts):
    best = np.inf
    for (ax, ay), (bx, by) in zip(verts, verts[1:]):
        dx, dy = bx - ax, by - ay
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0, 1)
        best = np.minimum(best, np.hypot(px - (ax + t * dx), py - (ay + t * dy)))
    return best


class TestBuild:
    def test_empty_index(self):
        idx = SpatialIndex.build([])
        assert len(idx) == 0
        assert idx.query_range(Aabb(-1e9, -1e9, 1e9, 1e9)) == set()

    def test_singleton(self):
        idx = SpatialIndex.build([("only", Aabb(5, 5, 10, 10))])
        assert idx.query_range(Aabb(0, 0, 6, 6)) == {"only"}
        assert idx.query_range(Aabb(10, 10, 12, 12)) == {"only"}  # closed touch
        assert idx.query_range(Aabb(11, 11, 12, 12)) == set()

    def test_duplicate_id_conflicts(self):
        with pytest.raises(ConflictError):
            SpatialIndex.build([("a", Aabb(0, 0, 1, 1)), ("a", Aabb(2, 2, 3, 3))])

    def test_deterministic_build(self):
        rng = np.random.default_rng(90)
        entries = random_boxes(rng, 3000)
        a = SpatialIndex.build(entries)
        b = SpatialIndex.build(list(entries))
        assert a.structure() == b.structure()


class TestQueryRange:
    def test_full_extent_returns_all(self):
        rng = np.random.default_rng(1)
        entries = random_boxes(rng, 500)
        idx = SpatialIndex.build(entries)
        assert idx.query_range(Aabb(-10, -10, 2000, 2000)) == {e for e, _ in entries}

    def test_disjoint_window_empty(self):
        rng = np.random.default_rng(2)
        idx = SpatialIndex.build(random_boxes(rng, 500))
        assert idx.query_range(Aabb(5000, 5000, 6000, 6000)) == set()

    def test_random_windows_match_linear_scan(self):
        rng = np.random.default_rng(31)
        entries = random_boxes(rng, 10_000)
        idx = SpatialIndex.build(entries)
        for _ in range(300):
            cx, cy = rng.uniform(0, 1000, 2)
            w, h = rng.uniform(1, 220, 2)
            window = Aabb(cx, cy, cx + w, cy + h)
            assert idx.query_range(window) == scan_range(entries, window)


class TestQueryBuffer:
    def line(self):
        return Polyline((GeoPoint(0, 0), GeoPoint(1000, 0)))

    def resolve_map(self, points):
        return lambda pid: points[pid]

    def test_paper_preset_distances(self):
        # point 60 m off the line: inside the 100 m preset, outside the 50 m one
        points = {"p": GeoPoint(500, 60)}
        idx = SpatialIndex.build([("p", Aabb(500, 60, 500, 60))])
        assert idx.query_buffer(self.line(), 100.0, self.resolve_map(points)) == {"p"}
        assert idx.query_buffer(self.line(), 50.0, self.resolve_map(points)) == set()

    def test_point_on_line_always_selected(self):
        points = {"p": GeoPoint(321.5, 0)}
        idx = SpatialIndex.build([("p", Aabb(321.5, 0, 321.5, 0))])
        assert idx.query_buffer(self.line(), 0.5, self.resolve_map(points)) == {"p"}

    def test_non_positive_distance_rejected(self):
        idx = SpatialIndex.build([("p", Aabb(0, 0, 0, 0))])
        with pytest.raises(InvalidArgumentError):
            idx.query_buffer(self.line(), 0.0, lambda pid: GeoPoint(0, 0))

    def test_monotone_in_distance(self):
        rng = np.random.default_rng(17)
        pts = {f"p{i}": GeoPoint(rng.uniform(0, 1000), rng.uniform(-300, 300))
               for i in range(500)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        line = self.line()
        previous: set[str] = set()
        for d in (25.0, 50.0, 100.0, 200.0):
            result = idx.query_buffer(line, d, self.resolve_map(pts))
            assert previous <= result
            previous = result

    def test_random_points_match_brute_force(self):
        rng = np.random.default_rng(8)
        n = 5000
        xs = rng.uniform(0, 1000, n)
        ys = rng.uniform(-400, 400, n)
        pts = {f"p{i:04d}": GeoPoint(xs[i], ys[i]) for i in range(n)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        verts = [(0.0, 0.0), (300.0, 50.0), (600.0, -80.0), (1000.0, 10.0)]
        line = Polyline(tuple(GeoPoint(x, y) for x, y in verts))
        dists = seg_dist_oracle(xs, ys, verts)
        for d in (30.0, 75.0, 150.0):
            expected = {f"p{i:04d}" for i in range(n) if dists[i] <= d}
            assert idx.query_buffer(line, d, self.resolve_map(pts)) == expected


class TestNearest:
    def test_singleton(self):
        idx = SpatialIndex.build([("only", Aabb(5, 5, 5, 5))])
        assert idx.nearest(GeoPoint(0, 0), 1, lambda _: GeoPoint(5, 5)) == ["only"]

    def test_k_exceeds_entries_returns_all_sorted(self):
        pts = {"a": GeoPoint(10, 0), "b": GeoPoint(5, 0), "c": GeoPoint(20, 0)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        assert idx.nearest(GeoPoint(0, 0), 10, lambda k: pts[k]) == ["b", "a", "c"]

    def test_tie_breaks_by_id(self):
        pts = {"z": GeoPoint(1, 0), "a": GeoPoint(0, 1), "m": GeoPoint(-1, 0)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        assert idx.nearest(GeoPoint(0, 0), 3, lambda k: pts[k]) == ["a", "m", "z"]

    def test_random_queries_match_full_sort_oracle(self):
        rng = np.random.default_rng(77)
        pts = {f"p{i:04d}": GeoPoint(rng.uniform(0, 500), rng.uniform(0, 500))
               for i in range(2000)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        for _ in range(50):
            q = GeoPoint(rng.uniform(-50, 550), rng.uniform(-50, 550))
            k = int(rng.integers(1, 12))
            oracle = sorted(pts, key=lambda pid: (np.hypot(pts[pid].x - q.x,
                                                           pts[pid].y - q.y), pid))[:k]
            assert idx.nearest(q, k, lambda pid: pts[pid]) == oracle

    def test_distances_non_decreasing(self):
        rng = np.random.default_rng(4)
        pts = {f"p{i}": GeoPoint(rng.uniform(0, 100), rng.uniform(0, 100))
               for i in range(300)}
        idx = SpatialIndex.build([(k, Aabb(p.x, p.y, p.x, p.y)) for k, p in pts.items()])
        q = GeoPoint(50, 50)
        result = idx.nearest(q, 25, lambda pid: pts[pid])
        dists = [np.hypot(pts[pid].x - q.x, pts[pid].y - q.y) for pid in result]
        assert dists == sorted(dists)
