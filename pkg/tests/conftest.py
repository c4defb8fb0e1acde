import os

import pytest
from hypothesis import settings

settings.register_profile("repeatable", derandomize=True, deadline=None)
settings.load_profile("repeatable")

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


@pytest.fixture(scope="session")
def minitown_dir() -> str:
    return os.path.join(FIXTURES, "minitown")


@pytest.fixture(scope="session")
def minitown_config(minitown_dir) -> str:
    return os.path.join(minitown_dir, "config.json")


@pytest.fixture(scope="session")
def minitown_table(minitown_dir):
    """Assembled 9-tract variable table plus the loaded tract geometries."""
    from access_atlas import ingest
    from access_atlas.network import build_network, load_road_edges, load_road_nodes

    ref_lon, ref_lat = -87.70, 41.85
    tracts = ingest.load_tracts(os.path.join(minitown_dir, "tracts.geojson"), ref_lon, ref_lat)
    providers = ingest.load_providers(os.path.join(minitown_dir, "providers.csv"), ref_lon, ref_lat)
    nodes = load_road_nodes(os.path.join(minitown_dir, "roads_nodes.csv"), ref_lon, ref_lat)
    net = build_network(load_road_edges(os.path.join(minitown_dir, "roads_edges.csv")), nodes)
    demographics = ingest.load_demographics(os.path.join(minitown_dir, "demographics.csv"))
    table = ingest.assemble_variable_table(
        tracts, providers, net, demographics, max_snap_m=700.0
    )
    return tracts, table
