from importlib import resources
from pathlib import Path

import pytest
from hypothesis import strategies as st

from flowcomm.graph import Graph, load_edge_list

DATA = Path(__file__).parent / "data"
TOY_EDGES = [(1, 2, 2.0), (1, 4, 4.0), (1, 5, 5.0), (1, 3, 4.0), (3, 5, 3.0), (4, 2, 2.0), (4, 5, 1.0)]


def package_data(name):
    return resources.files("flowcomm") / "data" / name


@pytest.fixture
def toy_path():
    return DATA / "toy.txt"


@pytest.fixture
def toy(toy_path):
    return load_edge_list(toy_path)


@pytest.fixture(scope="session")
def karate_path():
    return Path(str(package_data("karate.txt")))


@pytest.fixture(scope="session")
def karate(karate_path):
    return load_edge_list(karate_path, directed=False, weighted=False)


@pytest.fixture(scope="session")
def karate_factions():
    lines = Path(str(package_data("karate_factions.txt"))).read_text().split("\n")
    return [set(map(int, ln.split())) for ln in lines if ln.strip()]


@st.composite
def edge_lists(draw, max_vertices=12, max_edges=40, max_weight=20):
    n = draw(st.integers(2, max_vertices))
    vid = st.integers(0, n - 1)
    weight = st.one_of(st.just(1.0), st.integers(1, max_weight).map(float))
    return draw(st.lists(st.tuples(vid, vid, weight), min_size=1, max_size=max_edges))


@st.composite
def graphs(draw, **kw):
    return Graph.from_edges(draw(edge_lists(**kw)))
