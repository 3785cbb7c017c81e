"""Community demographics: density, composition, areal population estimates.

Partial-overlap estimates assume uniform density inside each community and
measure overlap with fixed-seed Monte-Carlo sampling over the community
boundary, so results are deterministic and monotone for nested queries.
"""

from __future__ import annotations

import zlib

import numpy as np

from urbanlens import kernels
from urbanlens.errors import (
    EmptyPopulationError,
    InconsistentRecordError,
    InvalidArgumentError,
    InvalidGeometryError,
)
from urbanlens.geometry import polygon_area, polygon_bbox
from urbanlens.model import CommunityRecord, Polygon

MC_SAMPLES_PER_COMMUNITY = 20_000
DEFAULT_SEED = 74250


def population_density(record: CommunityRecord) -> float:
    """People per square kilometer over the boundary's shoelace area."""
    area_m2 = polygon_area(record.boundary)
    if area_m2 <= 0:
        raise InvalidGeometryError(f"community {record.id}: zero-area boundary")
    return record.population / (area_m2 / 1e6)


def composition(record: CommunityRecord, dimension: str) -> dict[str, float]:
    """Bin fractions for 'age' or 'education'; fractions sum to 1."""
    if dimension == "age":
        bins = record.age_bins
    elif dimension == "education":
        bins = record.education_bins
    else:
        raise InvalidArgumentError(f"dimension must be 'age' or 'education', got {dimension!r}")
    if record.population == 0:
        raise EmptyPopulationError(f"community {record.id} has zero population")
    total = sum(bins.values())
    if total != record.population:
        raise InconsistentRecordError(
            f"community {record.id}: {dimension} bins sum to {total}, "
            f"population is {record.population}"
        )
    return {label: count / record.population for label, count in bins.items()}


def _community_rng(seed: int, community_id: str) -> np.random.Generator:
    # per-community stream derived from the global seed; stable across runs
    return np.random.default_rng([seed, zlib.crc32(community_id.encode("utf-8"))])


def sample_in_polygon(boundary: Polygon, n: int,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """n rejection-sampled points inside the boundary (bbox proposals)."""
    min_x, min_y, max_x, max_y = polygon_bbox(boundary)
    xy = boundary.xy()
    xs = np.empty(0)
    ys = np.empty(0)
    attempts = 0
    while xs.shape[0] < n:
        attempts += 1
        if attempts > 200:
            raise InvalidGeometryError("rejection sampling stalls; degenerate boundary?")
        batch = max(2 * (n - xs.shape[0]), 1024)
        px = rng.uniform(min_x, max_x, batch)
        py = rng.uniform(min_y, max_y, batch)
        keep = kernels.points_in_polygon(px, py, xy[:, 0], xy[:, 1])
        xs = np.concatenate([xs, px[keep]])
        ys = np.concatenate([ys, py[keep]])
    return xs[:n], ys[:n]


def population_in_area(records: list[CommunityRecord], query: Polygon,
                       seed: int = DEFAULT_SEED,
                       samples: int = MC_SAMPLES_PER_COMMUNITY) -> float:
    """Population estimate for the query polygon by areal interpolation."""
    qxy = query.xy()
    qbox = polygon_bbox(query)
    total = 0.0
    for record in records:
        if record.population == 0:
            continue
        bbox = polygon_bbox(record.boundary)
        if bbox[0] > qbox[2] or bbox[2] < qbox[0] or bbox[1] > qbox[3] or bbox[3] < qbox[1]:
            continue  # disjoint bboxes: overlap fraction is 0
        xs, ys = sample_in_polygon(
            record.boundary, samples, _community_rng(seed, record.id)
        )
        inside = kernels.points_in_polygon(xs, ys, qxy[:, 0], qxy[:, 1])
        total += record.population * (float(np.count_nonzero(inside)) / samples)
    return total
