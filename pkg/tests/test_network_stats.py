from __future__ import annotations

import pytest

from hyperweave.hypergraph import Hyperedge, TemporalHypergraph
from hyperweave.network_stats import (NetworkStatistics, attribute_diversity,
                                      compute_network_statistics, count_components)
from hyperweave.profiles import EntityProfile


def _chain() -> TemporalHypergraph:
    return TemporalHypergraph([Hyperedge((1, 2), 0), Hyperedge((2, 3), 1)])


def test_statistics_of_chain() -> None:
    stats = compute_network_statistics(_chain())
    assert stats.num_nodes == 3
    assert stats.num_edges == 2
    assert stats.max_degree == 2
    assert stats.mean_degree == pytest.approx(4 / 3)
    assert stats.mean_edge_size == 2.0
    assert stats.doi == 1.0
    assert stats.components == 1


def test_empty_graph_has_default_statistics() -> None:
    assert compute_network_statistics(TemporalHypergraph()) == NetworkStatistics()


def test_isolated_nodes_are_components() -> None:
    graph = _chain()
    graph.add_nodes([7, 8])
    graph.add_hyperedge(Hyperedge((10, 11), 2))
    assert count_components(graph) == 4


def test_attribute_diversity_counts_distinct_pairs() -> None:
    profiles = [
        EntityProfile(1, (("dept", "a"), ("region", "north"))),
        EntityProfile(2, (("dept", "a"), ("region", "south"))),
        EntityProfile(3, (("dept", "b"),)),
    ]
    # {1, 2}: dept=a, north, south -> 3; {2, 3}: dept=a, south, dept=b -> 3
    assert attribute_diversity(_chain(), profiles) == pytest.approx(3.0)
    assert attribute_diversity(_chain(), []) == 0.0


def test_items_format_missing_values() -> None:
    items = dict(NetworkStatistics().items())
    assert items["density of interactions"] == "n/a"
    assert items["nodes"] == "0"
    assert len(items) == 9
