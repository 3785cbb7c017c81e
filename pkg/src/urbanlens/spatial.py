"""Static packed R-tree with sort-tile-recursive bulk loading.

The tree is a set of flat numpy arrays (one box/span table per level), which
both kernel backends traverse. Entries are re-tiled at every level: sort by
center x, cut into vertical slices, sort each slice by center y, then pack
consecutive runs of ``fanout`` children per parent. Rebuild instead of
mutating; the structure is immutable after build and safe to share.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from urbanlens import kernels
from urbanlens.errors import ConflictError, InvalidArgumentError
from urbanlens.geometry import polyline_bbox
from urbanlens.model import GeoPoint, Polyline

DEFAULT_FANOUT = 16


@dataclass(frozen=True, slots=True)
class Aabb:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise InvalidArgumentError("Aabb min must not exceed max")

    def intersects(self, other: "Aabb") -> bool:
        return not (
            self.min_x > other.max_x or self.max_x < other.min_x
            or self.min_y > other.max_y or self.max_y < other.min_y
        )

    def expanded(self, margin: float) -> "Aabb":
        return Aabb(self.min_x - margin, self.min_y - margin,
                    self.max_x + margin, self.max_y + margin)


def _tile_order(boxes: np.ndarray, fanout: int) -> np.ndarray:
    """STR ordering of boxes: x-sorted vertical slices, y-sorted within."""
    m = boxes.shape[0]
    cx = (boxes[:, 0] + boxes[:, 2]) * 0.5
    cy = (boxes[:, 1] + boxes[:, 3]) * 0.5
    n_leaves = math.ceil(m / fanout)
    n_slices = math.ceil(math.sqrt(n_leaves))
    slice_size = math.ceil(m / n_slices)
    by_x = np.argsort(cx, kind="stable")
    order = np.empty(m, dtype=np.int64)
    for s in range(0, m, slice_size):
        chunk = by_x[s:s + slice_size]
        by_y = chunk[np.argsort(cy[chunk], kind="stable")]
        order[s:s + slice_size] = by_y
    return order


class SpatialIndex:
    """Immutable planar index over (id, Aabb) entries."""

    def __init__(self, ids: list[str], entry_boxes: np.ndarray,
                 level_boxes: list[np.ndarray], level_start: list[np.ndarray],
                 level_count: list[np.ndarray], fanout: int):
        self._ids = ids
        self._entry_boxes = entry_boxes
        self._level_boxes = level_boxes
        self._level_start = level_start
        self._level_count = level_count
        self.fanout = fanout

    def __len__(self) -> int:
        return len(self._ids)

    @classmethod
    def build(cls, entries: Iterable[tuple[str, Aabb]],
              fanout: int = DEFAULT_FANOUT) -> "SpatialIndex":
        """Bulk-load the index; deterministic for a given input order."""
        if fanout < 2:
            raise InvalidArgumentError("fanout must be at least 2")
        entries = list(entries)
        seen: set[str] = set()
        for entry_id, _ in entries:
            if entry_id in seen:
                raise ConflictError(f"duplicate id {entry_id!r} in index input")
            seen.add(entry_id)

        n = len(entries)
        if n == 0:
            return cls([], np.empty((0, 4)), [], [], [], fanout)

        raw = np.array(
            [(b.min_x, b.min_y, b.max_x, b.max_y) for _, b in entries], dtype=np.float64
        )
        order = _tile_order(raw, fanout)
        entry_boxes = raw[order]
        ids = [entries[i][0] for i in order]

        level_boxes: list[np.ndarray] = []
        level_start: list[np.ndarray] = []
        level_count: list[np.ndarray] = []

        child_boxes = entry_boxes
        while True:
            m = child_boxes.shape[0]
            n_parents = math.ceil(m / fanout)
            starts = np.arange(n_parents, dtype=np.int64) * fanout
            counts = np.minimum(starts + fanout, m) - starts
            parents = np.empty((n_parents, 4), dtype=np.float64)
            for j in range(n_parents):
                chunk = child_boxes[starts[j]:starts[j] + counts[j]]
                parents[j, 0] = chunk[:, 0].min()
                parents[j, 1] = chunk[:, 1].min()
                parents[j, 2] = chunk[:, 2].max()
                parents[j, 3] = chunk[:, 3].max()
            level_boxes.append(parents)
            level_start.append(starts)
            level_count.append(counts)
            if n_parents == 1:
                break
            # re-tile this level so the next packing pass groups neighbors;
            # children stay put, only this level's rows (and spans) permute
            order = _tile_order(parents, fanout)
            level_boxes[-1] = parents[order]
            level_start[-1] = starts[order]
            level_count[-1] = counts[order]
            child_boxes = level_boxes[-1]

        return cls(ids, entry_boxes, level_boxes, level_start, level_count, fanout)

    def query_range(self, window: Aabb) -> set[str]:
        """Ids whose box intersects the closed window."""
        positions = kernels.query_range(
            self._level_boxes, self._level_start, self._level_count,
            self._entry_boxes,
            window.min_x, window.min_y, window.max_x, window.max_y,
        )
        return {self._ids[i] for i in positions}

    def query_buffer(self, line: Polyline, distance: float,
                     resolve: Callable[[str], GeoPoint]) -> set[str]:
        """Ids whose resolved point lies within `distance` of the polyline.

        Candidates are first narrowed with the line's expanded bbox; the
        resolved point must lie inside its entry's Aabb for that narrowing
        to be lossless.
        """
        if distance <= 0:
            raise InvalidArgumentError("buffer distance must be positive")
        bx0, by0, bx1, by1 = polyline_bbox(line)
        candidates = sorted(self.query_range(
            Aabb(bx0 - distance, by0 - distance, bx1 + distance, by1 + distance)
        ))
        if not candidates:
            return set()
        points = [resolve(cid) for cid in candidates]
        xy = line.xy()
        dists = kernels.points_polyline_distance(
            np.array([p.x for p in points]), np.array([p.y for p in points]),
            xy[:, 0], xy[:, 1],
        )
        return {cid for cid, d in zip(candidates, dists) if d <= distance}

    def nearest(self, pt: GeoPoint, k: int,
                resolve: Callable[[str], GeoPoint]) -> list[str]:
        """The k ids closest to pt by resolved-point distance, ascending.

        Equal distances break ties by id ascending. Assumes each resolved
        point lies inside its entry's Aabb (true for point entries and for
        centroid-resolved boxes), which makes box distance a valid bound.
        """
        if k < 1:
            raise InvalidArgumentError("k must be at least 1")
        if not self._ids:
            return []
        top = len(self._level_boxes) - 1
        counter = 0
        heap: list[tuple[float, int, int, int]] = []  # (dist, seq, level, idx)
        # level convention: top..0 are tree levels, -1 marks an entry, -2 final
        for i in range(self._level_boxes[top].shape[0]):
            heap.append((self._box_dist(self._level_boxes[top], i, pt), counter, top, i))
            counter += 1
        heapq.heapify(heap)
        finals: list[tuple[float, str]] = []

        def kth_dist() -> float:
            return sorted(d for d, _ in finals)[k - 1]

        while heap:
            dist, _, level, idx = heapq.heappop(heap)
            if len(finals) >= k and dist > kth_dist():
                break
            if level == -2:
                finals.append((dist, self._ids[idx]))
                continue
            if level == -1:
                p = resolve(self._ids[idx])
                true_d = math.hypot(p.x - pt.x, p.y - pt.y)
                heapq.heappush(heap, (true_d, counter, -2, idx))
                counter += 1
                continue
            start = int(self._level_start[level][idx])
            count = int(self._level_count[level][idx])
            for child in range(start, start + count):
                if level == 0:
                    d = self._box_dist(self._entry_boxes, child, pt)
                    heapq.heappush(heap, (d, counter, -1, child))
                else:
                    d = self._box_dist(self._level_boxes[level - 1], child, pt)
                    heapq.heappush(heap, (d, counter, level - 1, child))
                counter += 1

        finals.sort(key=lambda item: (item[0], item[1]))
        return [entry_id for _, entry_id in finals[:k]]

    @staticmethod
    def _box_dist(boxes: np.ndarray, i: int, pt: GeoPoint) -> float:
        dx = max(boxes[i, 0] - pt.x, 0.0, pt.x - boxes[i, 2])
        dy = max(boxes[i, 1] - pt.y, 0.0, pt.y - boxes[i, 3])
        return math.hypot(dx, dy)

    def structure(self) -> tuple:
        """Structural fingerprint used by determinism tests."""
        return (
            tuple(self._ids),
            self._entry_boxes.tobytes(),
            tuple(b.tobytes() for b in self._level_boxes),
            tuple(s.tobytes() for s in self._level_start),
            tuple(c.tobytes() for c in self._level_count),
        )


def building_entries(buildings) -> list[tuple[str, Aabb]]:
    """(id, footprint bbox) pairs for indexing a building collection."""
    out = []
    for b in buildings:
        xy = b.footprint.xy()
        out.append((b.id, Aabb(float(xy[:, 0].min()), float(xy[:, 1].min()),
                               float(xy[:, 0].max()), float(xy[:, 1].max()))))
    return out


def road_entries(roads) -> list[tuple[str, Aabb]]:
    out = []
    for r in roads:
        x0, y0, x1, y1 = polyline_bbox(r.path)
        out.append((r.id, Aabb(x0, y0, x1, y1)))
    return out


def point_entries(items) -> list[tuple[str, Aabb]]:
    """Degenerate boxes for (id, position) carriers like monitoring points."""
    return [(p.id, Aabb(p.position.x, p.position.y, p.position.x, p.position.y))
            for p in items]
