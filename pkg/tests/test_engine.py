from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from scipy import stats

from hyperweave.agents import (AgentRole, Backends, CandidateHyperedge, StrategyDirective,
                               StrategyKind)
from hyperweave.config import GenerationConfig
from hyperweave.engine import (EvolutionState, construct, counters_frame, determine_hyperedge_size,
                               evolve, evolve_step, select_entity, validate_candidate,
                               write_counters)
from hyperweave.errors import ConstructionAborted, EvolutionStepError, TransportError
from hyperweave.hgt import serialize_hypergraph
from hyperweave.hypergraph import Hyperedge, TemporalHypergraph
from hyperweave.microdynamics import MicroParams, RankedPopulation
from hyperweave.oracle import OracleBackend
from hyperweave.patterns import current_doi, degree_distribution
from hyperweave.powerlaw import fit_power_law
from hyperweave.profiles import synthesize_profiles


def _oracle(config: GenerationConfig, num_nodes: int) -> OracleBackend:
    population = RankedPopulation.by_node_order(range(num_nodes))
    return OracleBackend(population, config.micro_params(), config.seed, config.oracle_settings())


def _empty_graph(n: int) -> TemporalHypergraph:
    return TemporalHypergraph(nodes=range(n))


def _random_initial(num_nodes: int, num_edges: int, seed: int) -> TemporalHypergraph:
    rng = np.random.default_rng(seed)
    graph = _empty_graph(num_nodes)
    for t in range(num_edges):
        graph.add_hyperedge(Hyperedge(tuple(int(v) for v in rng.choice(num_nodes, 3, replace=False)), t))
    return graph


class _FailingBackend:
    """Wraps a backend and fails with a transport error from the given call on."""

    def __init__(self, inner: OracleBackend, fail_at: int):
        self.inner = inner
        self.fail_at = fail_at
        self.calls = 0

    def decide(self, role, ctx):
        self.calls += 1
        if self.calls > self.fail_at:
            raise TransportError("endpoint unreachable")
        return self.inner.decide(role, ctx)

    def decide_many(self, role, contexts):
        return [self.decide(role, ctx) for ctx in contexts]


def test_uniform_selection_without_preference() -> None:
    config = GenerationConfig(attach_probability=0.0)
    graph = _empty_graph(10)
    rng = np.random.default_rng(0)
    tally = Counter(select_entity(graph, config, rng) for _ in range(10000))
    observed = [tally[v] for v in range(10)]
    assert stats.chisquare(observed).pvalue > 0.001


def test_preferential_selection_weights_degree_plus_one() -> None:
    config = GenerationConfig(attach_probability=1.0)
    graph = _empty_graph(10)
    for t in range(9):
        graph.add_hyperedge(Hyperedge((0,), t))
    rng = np.random.default_rng(1)
    hits = sum(select_entity(graph, config, rng) == 0 for _ in range(10000))
    assert hits / 10000 == pytest.approx(10 / 19, abs=0.03)


def test_single_node_is_always_selected() -> None:
    graph = TemporalHypergraph(nodes=[5])
    rng = np.random.default_rng(2)
    assert {select_entity(graph, GenerationConfig(), rng) for _ in range(20)} == {5}


def test_focus_entities_win_with_full_bias() -> None:
    config = GenerationConfig(focus_bias=1.0)
    directive = StrategyDirective(StrategyKind.INCREASE_CONNECTIONS, (3,))
    rng = np.random.default_rng(3)
    assert {select_entity(_empty_graph(10), config, rng, directive) for _ in range(50)} == {3}


def test_explicit_and_degenerate_size_distributions() -> None:
    rng = np.random.default_rng(4)
    fixed = GenerationConfig(size_spec=((3, 1.0),), max_edge_size=3)
    assert {determine_hyperedge_size(fixed, rng) for _ in range(50)} == {3}
    pinned = GenerationConfig(min_edge_size=2, max_edge_size=2)
    assert {determine_hyperedge_size(pinned, rng) for _ in range(50)} == {2}


def test_size_draws_follow_truncated_power_law() -> None:
    config = GenerationConfig(min_edge_size=2, max_edge_size=6, size_exponent=2.0)
    rng = np.random.default_rng(5)
    draws = 10000
    tally = Counter(determine_hyperedge_size(config, rng) for _ in range(draws))
    expected = config.size_sampler().probabilities()
    tv = 0.5 * sum(abs(tally[k] / draws - p) for k, p in expected.items())
    assert tv < 0.05


def test_validate_candidate_reasons() -> None:
    config = GenerationConfig(min_edge_size=2, max_edge_size=3)
    graph = _empty_graph(6)
    graph.add_hyperedge(Hyperedge((0, 1), 0))
    cases = [
        (CandidateHyperedge(frozenset({0, 9}), 0), "unknown node"),
        (CandidateHyperedge(frozenset({0, 1, 2, 3}), 0), "size"),
        (CandidateHyperedge(frozenset({0, 1}), 1), "duplicate"),
        (CandidateHyperedge(frozenset({0, 2}), 0), "ok"),
    ]
    for candidate, reason in cases:
        assert validate_candidate(candidate, graph, config)[1] == reason


def test_construct_with_zero_edges() -> None:
    config = GenerationConfig(target_edges=0)
    graph = construct(synthesize_profiles(15, 0), config, _oracle(config, 15))
    assert graph.n == 15 and graph.m == 0


def test_construct_rejects_empty_profiles() -> None:
    config = GenerationConfig()
    with pytest.raises(ValueError):
        construct([], config, _oracle(config, 1))


def test_construct_is_deterministic_and_valid() -> None:
    config = GenerationConfig(num_nodes=200, target_edges=500, attach_probability=0.85, seed=13)
    profiles = synthesize_profiles(200, 13)
    first = construct(profiles, config, _oracle(config, 200))
    second = construct(profiles, config, _oracle(config, 200))
    assert serialize_hypergraph(first) == serialize_hypergraph(second)
    assert 0 < first.m <= 500
    assert [e.timestamp for e in first.edges] == list(range(first.m))
    for edge in first.edges:
        assert config.min_edge_size <= len(edge) <= config.max_edge_size
        assert set(edge.nodes) <= first.nodes


def test_construct_abort_keeps_partial_graph() -> None:
    config = GenerationConfig(target_edges=50, seed=2)
    backend = _FailingBackend(_oracle(config, 100), fail_at=3)
    with pytest.raises(ConstructionAborted) as info:
        construct(synthesize_profiles(100, 2), config, backend)
    assert info.value.attempt == 3
    assert info.value.partial.m <= 3
    assert info.value.partial.n == 100


def test_step_without_attempts_or_removals_keeps_graph() -> None:
    config = GenerationConfig(generation_attempts_per_step=0)
    initial = _random_initial(30, 20, 0)
    state = evolve_step(EvolutionState(initial), Backends.single(_oracle(config, 30)), config)
    assert state.hypergraph == initial
    assert state.step == 1
    assert state.history[0].removed == 0


def test_small_hypergraph_skips_removal() -> None:
    config = GenerationConfig(q_threshold=0.5, generation_attempts_per_step=0)
    initial = _random_initial(30, 19, 6)
    oracle = _oracle(config, 30)
    backends = Backends(oracle, _FailingBackend(oracle, 0), oracle, oracle)
    state = evolve_step(EvolutionState(initial), backends, config)
    assert state.history[0].removed == 0
    assert state.hypergraph == initial


def test_high_quality_population_never_loses_edges() -> None:
    config = GenerationConfig(q_threshold=0.5, evolution_steps=5)
    population = RankedPopulation.from_ranks(range(30), range(1, 31), [1.0] * 30)
    backend = OracleBackend(population, MicroParams(q_threshold=0.5), seed=0)
    state, _ = evolve(_random_initial(30, 40, 1), synthesize_profiles(30, 1), config,
                      Backends.single(backend))
    assert all(record.removed == 0 for record in state.history)


def test_evolution_bookkeeping() -> None:
    config = GenerationConfig(num_nodes=100, q_threshold=0.5, seed=11, evolution_steps=20,
                              generation_attempts_per_step=10)
    initial = _random_initial(100, 100, 11)
    state, report = evolve(initial, synthesize_profiles(100, 11), config,
                           Backends.single(_oracle(config, 100)))

    records = state.history
    assert [r.step for r in records] == list(range(1, 21))
    assert records[0].edges_before == initial.m
    for before, after in zip(records, records[1:]):
        assert after.edges_before == before.edges_after
    for r in records:
        assert r.edges_after == r.edges_before - r.removed + r.approved
        assert r.rejected == r.generated - r.approved
    assert state.accepted == sum(r.approved for r in records)
    assert state.removed == sum(r.removed for r in records)
    assert state.hypergraph.m == initial.m - state.removed + state.accepted
    assert state.removed > 0
    assert state.rejected > 0
    assert len(report.entries) == 8


def test_diversity_directive_lowers_doi() -> None:
    num_nodes = 100
    initial = _empty_graph(num_nodes)
    for i in range(40):
        initial.add_hyperedge(Hyperedge((99, 50 + i), i))
    assert current_doi(initial) == 1.0

    config = GenerationConfig(num_nodes=num_nodes, diversity_target=0.2, evolution_steps=20,
                              generation_attempts_per_step=10, seed=3)
    state, _ = evolve(initial, synthesize_profiles(num_nodes, 3), config,
                      Backends.single(_oracle(config, num_nodes)))
    assert state.history[0].directive == StrategyKind.ENHANCE_DIVERSITY.value
    assert current_doi(state.hypergraph) < 1.0


def test_failed_step_leaves_state_untouched() -> None:
    config = GenerationConfig()
    initial = _random_initial(30, 20, 4)
    state = EvolutionState(initial)
    oracle = _oracle(config, 30)
    backends = Backends(_FailingBackend(oracle, 0), oracle, oracle, oracle)
    with pytest.raises(EvolutionStepError) as info:
        evolve_step(state, backends, config)
    assert info.value.step == 1
    assert state.hypergraph == initial
    assert state.step == 0


def test_evolution_replays_exactly() -> None:
    config = GenerationConfig(num_nodes=60, target_edges=120, evolution_steps=3, seed=8)
    profiles = synthesize_profiles(60, 8)

    def run() -> bytes:
        backend = _oracle(config, 60)
        initial = construct(profiles, config, backend)
        state, _ = evolve(initial, profiles, config, Backends.single(backend))
        return serialize_hypergraph(state.hypergraph)

    assert run() == run()


def test_counters_csv(tmp_path) -> None:
    config = GenerationConfig(evolution_steps=2)
    state, _ = evolve(_random_initial(30, 20, 5), synthesize_profiles(30, 5), config,
                      Backends.single(_oracle(config, 30)))
    assert list(counters_frame(state)["step"]) == [1, 2]
    path = tmp_path / "counters.csv"
    write_counters(state, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("step,edges_before,removed,generated,approved,rejected")


@pytest.mark.slow
def test_attach_probability_shapes_degree_tail() -> None:
    def degree_fit(p: float):
        config = GenerationConfig(num_nodes=500, target_edges=5000, attach_probability=p, seed=21)
        graph = construct(synthesize_profiles(500, 21), config, _oracle(config, 500))
        return fit_power_law(degree_distribution(graph))

    flat = degree_fit(0.0)
    heavy = degree_fit(0.85)
    assert heavy.slope < flat.slope
    assert heavy.r_squared >= 0.8
