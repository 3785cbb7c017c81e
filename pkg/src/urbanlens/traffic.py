"""Road-condition management: observation store, classification, geometry.

The store keeps its log sorted by timestamp (backfilled history lands in
place) with a per-segment latest-value cache for the real-time view.
Congestion classes derive from the ratio of observed speed to the segment's
free-flow speed; thresholds are configurable and default to 0.7 / 0.4.
"""

from __future__ import annotations

import bisect
import enum
import math
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta

from urbanlens.errors import InvalidArgumentError, InvalidGeometryError, NotFoundError
from urbanlens.model import CityScene, GeoPoint, Polygon, Polyline, RoadSegment

LANE_WIDTH_M = 3.5
DEFAULT_THRESHOLDS = (0.7, 0.4)  # free at/above the first, congested below the second


class CongestionClass(enum.Enum):
    FREE = "free"
    SLOW = "slow"
    CONGESTED = "congested"
    UNKNOWN = "unknown"


@dataclass(frozen=True, slots=True)
class TrafficObservation:
    segment_id: str
    timestamp: datetime
    mean_speed: float  # km/h

    def __post_init__(self):
        if not math.isfinite(self.mean_speed) or self.mean_speed < 0:
            raise InvalidArgumentError(
                f"mean_speed must be finite and non-negative, got {self.mean_speed}"
            )


class TrafficStore:
    """Append-only observation log with a latest-per-segment cache.

    Single writer, many readers: ingest serializes on an internal lock and
    readers only see fully applied states.
    """

    def __init__(self, segment_ids):
        self._segment_ids = set(segment_ids)
        self._timestamps: list[datetime] = []   # sort keys for the log
        self._log: list[TrafficObservation] = []
        self._latest: dict[str, TrafficObservation] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._log)

    @property
    def segment_ids(self) -> set[str]:
        return set(self._segment_ids)

    def ingest(self, obs: TrafficObservation) -> "TrafficStore":
        """Insert one observation; cache updates only if it is the newest."""
        if obs.segment_id not in self._segment_ids:
            raise NotFoundError(f"unknown segment {obs.segment_id!r}")
        with self._lock:
            pos = bisect.bisect_right(self._timestamps, obs.timestamp)
            self._timestamps.insert(pos, obs.timestamp)
            self._log.insert(pos, obs)
            cached = self._latest.get(obs.segment_id)
            if cached is None or obs.timestamp >= cached.timestamp:
                self._latest[obs.segment_id] = obs
        return self

    def latest(self, segment_id: str) -> TrafficObservation | None:
        return self._latest.get(segment_id)

    def latest_timestamp(self) -> datetime | None:
        return self._timestamps[-1] if self._timestamps else None

    def window(self, at: datetime, window_seconds: float) -> list[TrafficObservation]:
        """Observations with timestamp in (at - window, at], log order."""
        lo = bisect.bisect_right(self._timestamps, at - timedelta(seconds=window_seconds))
        hi = bisect.bisect_right(self._timestamps, at)
        return self._log[lo:hi]


def ingest_observation(store: TrafficStore, obs: TrafficObservation) -> TrafficStore:
    return store.ingest(obs)


def classify(seg: RoadSegment, window_mean_speed: float,
             thresholds: tuple[float, float] = DEFAULT_THRESHOLDS) -> CongestionClass:
    """Class from the speed ratio r = speed / free_flow_speed."""
    if window_mean_speed < 0:
        raise InvalidArgumentError("speed must be non-negative")
    free_from, congested_below = thresholds
    r = window_mean_speed / seg.free_flow_speed
    if r >= free_from:
        return CongestionClass.FREE
    if r >= congested_below:
        return CongestionClass.SLOW
    return CongestionClass.CONGESTED


def condition_snapshot(store: TrafficStore, scene: CityScene, at: datetime,
                       window_seconds: float,
                       thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
                       ) -> list[tuple[str, CongestionClass]]:
    """Per segment: classify the mean speed over (at - window, at], else unknown."""
    if window_seconds <= 0:
        raise InvalidArgumentError("window must be positive")
    sums: dict[str, tuple[float, int]] = {}
    for obs in store.window(at, window_seconds):
        total, count = sums.get(obs.segment_id, (0.0, 0))
        sums[obs.segment_id] = (total + obs.mean_speed, count + 1)
    out: list[tuple[str, CongestionClass]] = []
    for seg in sorted(scene.roads, key=lambda s: s.id):
        if seg.id in sums:
            total, count = sums[seg.id]
            out.append((seg.id, classify(seg, total / count, thresholds)))
        else:
            out.append((seg.id, CongestionClass.UNKNOWN))
    return out


@dataclass(frozen=True, slots=True)
class ConditionGeometry:
    segment_id: str
    congestion: CongestionClass
    mode: str                       # "line" | "plane"
    geometry: Polyline | Polygon


_MITER_LIMIT = 4.0


def _offset_points(path: Polyline, offset: float) -> list[tuple[float, float]]:
    """Vertices shifted `offset` to the left of travel, mitered at joins."""
    verts = path.vertices
    n = len(verts)
    dirs = []
    for i in range(n - 1):
        dx, dy = verts[i + 1].x - verts[i].x, verts[i + 1].y - verts[i].y
        norm = math.hypot(dx, dy)
        if norm == 0:
            raise InvalidGeometryError("zero-length path segment")
        dirs.append((dx / norm, dy / norm))
    out = []
    for i in range(n):
        if i == 0:
            nx, ny = -dirs[0][1], dirs[0][0]
            scale = 1.0
        elif i == n - 1:
            nx, ny = -dirs[-1][1], dirs[-1][0]
            scale = 1.0
        else:
            n1 = (-dirs[i - 1][1], dirs[i - 1][0])
            n2 = (-dirs[i][1], dirs[i][0])
            mx, my = n1[0] + n2[0], n1[1] + n2[1]
            norm = math.hypot(mx, my)
            if norm < 1e-12:
                raise InvalidGeometryError("path reverses on itself; cannot miter")
            nx, ny = mx / norm, my / norm
            cos_half = nx * n1[0] + ny * n1[1]
            scale = min(1.0 / max(cos_half, 1e-12), _MITER_LIMIT)
        out.append((verts[i].x + nx * offset * scale, verts[i].y + ny * offset * scale))
    return out


def condition_geometry(seg: RoadSegment, cls: CongestionClass,
                       mode: str = "line") -> ConditionGeometry:
    """Line mode passes the path through; plane mode buffers it to the
    road width (lanes x 3.5 m) with flat caps and mitered joins."""
    if mode not in ("line", "plane"):
        raise InvalidArgumentError(f"mode must be 'line' or 'plane', got {mode!r}")
    if len(seg.path.vertices) < 2:
        raise InvalidGeometryError(f"segment {seg.id}: degenerate path")
    if mode == "line":
        return ConditionGeometry(seg.id, cls, "line", seg.path)

    half = seg.lanes * LANE_WIDTH_M / 2.0
    left = _offset_points(seg.path, half)
    right = _offset_points(seg.path, -half)
    # right side forward then left side backward winds counter-clockwise
    ring = [GeoPoint(x, y) for (x, y) in right] + [GeoPoint(x, y) for (x, y) in reversed(left)]
    poly = Polygon(tuple(ring))
    return ConditionGeometry(seg.id, cls, "plane", poly)
