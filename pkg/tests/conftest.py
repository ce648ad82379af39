import os
from pathlib import Path

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from graphgan import Graph


def connected_graph(n, p, seed):
    """Connected G(n, p) sample: a random spanning tree plus extra edges."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, n)]
    extra = rng.random((n, n)) < p
    edges += [(u, v) for u, v in zip(*np.nonzero(np.triu(extra, 1)))]
    return Graph.from_edges(np.array(edges, dtype=np.int64).reshape(-1, 2), n)


def to_networkx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.vertex_count))
    g.add_edges_from(graph.edges().tolist())
    return g


def path_graph(n):
    return Graph.from_edges([(i, i + 1) for i in range(n - 1)], n)


def star_graph(leaves):
    return Graph.from_edges([(0, i) for i in range(1, leaves + 1)], leaves + 1)


@st.composite
def graphs(draw, min_vertices=2, max_vertices=24):
    n = draw(st.integers(min_vertices, max_vertices))
    p = draw(st.floats(0.0, 0.6))
    seed = draw(st.integers(0, 2**31 - 1))
    return connected_graph(n, p, seed)


@st.composite
def graph_with_table(draw, min_vertices=2, max_vertices=24, dims=(2, 5, 20), scale=1.0):
    graph = draw(graphs(min_vertices, max_vertices))
    k = draw(st.sampled_from(dims))
    seed = draw(st.integers(0, 2**31 - 1))
    table = np.random.default_rng(seed).uniform(-scale, scale, (graph.vertex_count, k))
    return graph, table


@pytest.fixture
def triangle():
    return Graph.from_edges([(0, 1), (1, 2), (0, 2)], 3, ["a", "b", "c"])


DATA_DIR = Path(__file__).parent / "data"
ACCEPTANCE_LINES = []


def dataset_path(env_var, filename):
    """Location of an external dataset: env var first, then tests/data."""
    candidate = os.environ.get(env_var)
    path = Path(candidate) if candidate else DATA_DIR / filename
    return path if path.is_file() else None


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
