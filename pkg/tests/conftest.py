"""Shared fixtures and small deterministic graph builders."""

import numpy as np
import pytest

from fppgraph.graph import Graph, build_partitions, from_edges, make_undirected, partition_contiguous
from fppgraph.metrics_bench import grid_graph, random_graph


@pytest.fixture(scope="session")
def small_weighted():
    """Connected weighted graph on 100 vertices, undirected."""
    return random_graph(100, 800, seed=3)


@pytest.fixture(scope="session")
def small_grid():
    return grid_graph(8, 8, seed=1)


@pytest.fixture(scope="session")
def tiny_line():
    """Unweighted path 0-1-2-3-4."""
    return make_undirected(from_edges([0, 1, 2, 3], [1, 2, 3, 4], None,
                                      vertex_count=5))


def partitions_for(graph: Graph, k: int):
    return build_partitions(graph, partition_contiguous(graph, k))
