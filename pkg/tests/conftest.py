from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from hyperweave.hypergraph import Hyperedge, TemporalHypergraph


def random_hypergraph(
    seed: int,
    num_nodes: int = 30,
    num_edges: int = 60,
    min_size: int = 1,
    max_size: int = 5,
) -> TemporalHypergraph:
    rng = np.random.default_rng(seed)
    graph = TemporalHypergraph()
    for t in range(num_edges):
        k = int(rng.integers(min_size, max_size + 1))
        nodes = rng.choice(num_nodes, size=min(k, num_nodes), replace=False)
        graph.add_hyperedge(Hyperedge(tuple(int(v) for v in nodes), t))
    return graph


@pytest.fixture
def small_graph() -> TemporalHypergraph:
    return TemporalHypergraph([
        Hyperedge((1, 2, 3), 0),
        Hyperedge((2, 3, 4), 1),
        Hyperedge((3, 4, 5), 2),
    ])


@pytest.fixture
def make_random_hypergraph() -> Callable[..., TemporalHypergraph]:
    return random_hypergraph
