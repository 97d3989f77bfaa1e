from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from hyperweave.errors import UndefinedMetricError
from hyperweave.hypergraph import Hyperedge, TemporalHypergraph
from hyperweave.patterns import (current_doi, degree_distribution,
                                 density_of_interactions_series, group_degree_distribution,
                                 hyperedge_size_distribution, intersecting_pair_counts,
                                 intersection_size_distribution,
                                 persistence_interevent_distribution, relative_checkpoints,
                                 singular_value_spectrum, temporal_locality)


def _graph(*edges) -> TemporalHypergraph:
    return TemporalHypergraph([Hyperedge(tuple(e), t) for t, e in enumerate(edges)])


def _brute_intersections(graph: TemporalHypergraph) -> Counter:
    sizes = Counter()
    for a, b in itertools.combinations(graph.edges, 2):
        shared = len(set(a.nodes) & set(b.nodes))
        if shared:
            sizes[shared] += 1
    return sizes


def _brute_doi(graph: TemporalHypergraph, t: int) -> Fraction:
    edges = graph.edges[:t]
    hits = sum(1 for a, b in itertools.combinations(edges, 2) if set(a.nodes) & set(b.nodes))
    return Fraction(hits, t * (t - 1) // 2)


def test_degree_distribution_excludes_isolated_nodes(small_graph) -> None:
    small_graph.add_nodes([10, 11])
    hist = degree_distribution(small_graph)
    assert hist.pairs() == [(1, 2), (2, 2), (3, 1)]
    assert hist.excluded == 2


def test_hyperedge_size_distribution() -> None:
    hist = hyperedge_size_distribution(_graph([1, 2], [1, 2, 3], [4, 5]))
    assert hist.pairs() == [(2, 2), (3, 1)]


def test_intersection_sizes_of_chain(small_graph) -> None:
    assert intersection_size_distribution(small_graph).pairs() == [(1, 1), (2, 2)]


def test_intersection_sizes_of_duplicate_edges() -> None:
    hist = intersection_size_distribution(_graph([1, 2, 3], [1, 2, 3]))
    assert hist.pairs() == [(3, 1)]


def test_intersection_sizes_match_brute_force(make_random_hypergraph) -> None:
    for seed in range(50):
        graph = make_random_hypergraph(seed, num_nodes=25, num_edges=40)
        hist = intersection_size_distribution(graph)
        assert dict(hist.pairs()) == dict(_brute_intersections(graph))


def test_group_degree_of_single_triangle() -> None:
    hist = group_degree_distribution(_graph([1, 2, 3]))
    assert hist.pairs() == [(1, 3)]


def test_group_degree_matches_brute_force(make_random_hypergraph) -> None:
    for seed in range(20):
        graph = make_random_hypergraph(seed, num_nodes=12, num_edges=30)
        expected = Counter()
        for pair in itertools.combinations(graph.sorted_nodes(), 2):
            d = sum(1 for e in graph.edges if set(pair) <= set(e.nodes))
            if d:
                expected[d] += 1
        assert dict(group_degree_distribution(graph).pairs()) == dict(expected)


def test_group_degree_rejects_small_groups() -> None:
    with pytest.raises(ValueError):
        group_degree_distribution(_graph([1, 2]), group_size=1)


def test_singular_values_of_identity_and_pair() -> None:
    assert singular_value_spectrum(_graph([0], [1]), k=2) == pytest.approx([1.0, 1.0])
    assert singular_value_spectrum(_graph([1, 2]), k=5) == pytest.approx([np.sqrt(2.0)])


def test_singular_values_of_empty_graph_undefined() -> None:
    with pytest.raises(UndefinedMetricError):
        singular_value_spectrum(TemporalHypergraph(nodes=[1]), k=3)


def test_full_spectrum_satisfies_frobenius_identity(make_random_hypergraph) -> None:
    for seed in range(20):
        graph = make_random_hypergraph(seed, num_nodes=20, num_edges=35)
        values = singular_value_spectrum(graph, k=100)
        incidences = sum(len(e) for e in graph.edges)
        assert sum(v * v for v in values) == pytest.approx(incidences, rel=1e-9)


def test_truncated_spectrum_matches_dense(make_random_hypergraph) -> None:
    for seed in range(20):
        graph = make_random_hypergraph(seed, num_nodes=40, num_edges=50, min_size=2)
        matrix, _ = graph.incidence_matrix()
        dense = np.linalg.svd(matrix.toarray().astype(float), compute_uv=False)
        rank = int(np.linalg.matrix_rank(matrix.toarray()))
        k = max(1, min(rank, min(matrix.shape)) // 2)
        values = singular_value_spectrum(graph, k=k)
        np.testing.assert_allclose(values, dense[:k], rtol=1e-8)


def test_temporal_locality_window_one() -> None:
    result = temporal_locality(_graph([1, 2], [2, 3], [4, 5]), window=1)
    assert result.mean == pytest.approx(0.25)
    assert result.series == ((1, 0.5), (2, 0.0))


def test_temporal_locality_needs_two_edges() -> None:
    with pytest.raises(UndefinedMetricError):
        temporal_locality(_graph([1, 2]))


def test_persistence_of_regular_participation() -> None:
    result = persistence_interevent_distribution(_graph([1, 2], [1, 3], [1, 4]))
    assert result.histogram.pairs() == [(1, 2)]
    assert result.clock == "timestamp"


def test_persistence_single_long_gap() -> None:
    result = persistence_interevent_distribution(_graph([1, 2], [3], [4], [5], [6], [1, 7]))
    assert result.histogram.pairs() == [(5, 1)]
    assert result.fit is None
    assert result.burstiness == pytest.approx(-1.0)


def test_persistence_without_repeats_is_empty() -> None:
    result = persistence_interevent_distribution(_graph([1, 2], [3, 4]))
    assert len(result.histogram) == 0
    assert result.fit is None and result.burstiness is None


def test_persistence_falls_back_to_edge_index_on_tied_timestamps() -> None:
    graph = TemporalHypergraph([Hyperedge((1, 2), 0), Hyperedge((1, 3), 0), Hyperedge((1, 4), 9)])
    assert persistence_interevent_distribution(graph).clock == "index"


def test_doi_examples() -> None:
    series = density_of_interactions_series(_graph([1, 2], [2, 3], [4, 5]), [2, 3])
    assert series.exact == (Fraction(1), Fraction(1, 3))
    disjoint = density_of_interactions_series(_graph([1, 2], [3, 4]), [2])
    assert disjoint.points == ((2, 0.0),)


def test_doi_matches_brute_force(make_random_hypergraph) -> None:
    for seed in range(50):
        graph = make_random_hypergraph(seed, num_nodes=40, num_edges=30)
        checkpoints = list(range(2, graph.m + 1))
        series = density_of_interactions_series(graph, checkpoints)
        assert list(series.exact) == [_brute_doi(graph, t) for t in checkpoints]
        assert all(0 <= d <= 1 for _, d in series.points)


@pytest.mark.parametrize("checkpoints", [[1], [4], [3, 2]])
def test_doi_rejects_bad_checkpoints(small_graph, checkpoints) -> None:
    with pytest.raises(UndefinedMetricError):
        density_of_interactions_series(small_graph, checkpoints)


def test_intersecting_pair_counts_are_cumulative(small_graph) -> None:
    assert intersecting_pair_counts(small_graph).tolist() == [0, 0, 1, 3]


def test_relative_checkpoints_and_current_doi(small_graph) -> None:
    assert relative_checkpoints(1) == []
    assert relative_checkpoints(3, 10) == [2, 3]
    repeated = relative_checkpoints(3, 10, distinct=False)
    assert len(repeated) == 10
    assert sorted(repeated) == repeated and set(repeated) == {2, 3}
    assert relative_checkpoints(100, 10) == list(range(10, 101, 10))
    assert current_doi(small_graph) == pytest.approx(1.0)
    assert current_doi(_graph([1, 2])) is None


def test_measurements_do_not_mutate(small_graph) -> None:
    before = small_graph.copy()
    intersection_size_distribution(small_graph)
    singular_value_spectrum(small_graph, 2)
    temporal_locality(small_graph)
    density_of_interactions_series(small_graph, [2, 3])
    assert small_graph == before
