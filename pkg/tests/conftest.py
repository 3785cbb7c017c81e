import numpy as np
import pytest

from urbanlens.model import (
    Building,
    CityScene,
    GeoPoint,
    LatLong,
    LayerNode,
    Polygon,
    TerrainGrid,
)


def flat_terrain(extent: float = 1000.0, cell: float = 10.0,
                 elevation: float = 0.0) -> TerrainGrid:
    n = int(extent / cell) + 1
    return TerrainGrid(
        origin=GeoPoint(0.0, 0.0), cell_size=cell, n_cols=n, n_rows=n,
        elevations=np.full(n * n, elevation),
    )


def rect_building(bid: str, x0: float, y0: float, x1: float, y1: float,
                  height: float, base: float = 0.0) -> Building:
    return Building(
        id=bid,
        footprint=Polygon((GeoPoint(x0, y0), GeoPoint(x1, y0),
                           GeoPoint(x1, y1), GeoPoint(x0, y1))),
        height=height, base_elevation=base,
    )


def basic_layers() -> LayerNode:
    return LayerNode(
        id="layer-root", name="Scene", kind="analysis-result", children=(
            LayerNode(id="layer-terrain", name="Terrain", kind="terrain"),
            LayerNode(id="layer-buildings", name="Buildings", kind="buildings"),
        ),
    )


def make_scene(terrain=None, buildings=(), roads=(), metro_lines=(),
               communities=(), layer_root=None,
               anchor=LatLong(22.54, 114.06)) -> CityScene:
    return CityScene(
        terrain=terrain if terrain is not None else flat_terrain(),
        buildings=tuple(buildings), roads=tuple(roads),
        metro_lines=tuple(metro_lines), communities=tuple(communities),
        layer_root=layer_root if layer_root is not None else basic_layers(),
        geo_anchor=anchor,
    )


@pytest.fixture(scope="session")
def small_city():
    """Shared synthetic city for server/tile/acceptance tests."""
    from urbanlens.synth import SynthSpec, synth_city
    return synth_city(SynthSpec(seed=42, building_count=120, extent=2000.0,
                                road_grid_dims=(4, 4), metro_point_count=60,
                                community_grid_dims=(3, 3)))
