from __future__ import annotations

import math

import numpy as np
import pytest

from hyperweave.errors import EligibleSetError, InsufficientDataError
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.microdynamics import (MicroParams, RankedPopulation, SimulationTrace,
                                      SizeSampler, expected_degree_profile,
                                      harmonic_normalizer_approximation, reach_probabilities,
                                      reach_probability, sample_collaborators,
                                      selection_probabilities, selection_probability, simulate,
                                      verify_zipf_mandelbrot, write_trace_sidecar)


def _population(n: int) -> RankedPopulation:
    return RankedPopulation.by_node_order(range(n))


def test_population_defaults_quality_from_rank() -> None:
    pop = RankedPopulation.from_ranks([10, 20, 30, 40], [2, 1, 4, 3])
    np.testing.assert_allclose(pop.qualities, [0.75, 1.0, 0.25, 0.5])
    assert pop.index_of(30) == 2
    assert pop.size == 4


@pytest.mark.parametrize(
    "ranks, qualities",
    [([1, 1, 2], None), ([1, 2], [0.5, 0.9]), ([1, 2], [1.5, 0.2])],
)
def test_population_rejects_invalid_ranking(ranks, qualities) -> None:
    with pytest.raises(ValueError):
        RankedPopulation.from_ranks(range(len(ranks)), ranks, qualities)


def test_params_validation() -> None:
    with pytest.raises(ValueError):
        MicroParams(alpha=-1)
    with pytest.raises(ValueError):
        MicroParams(exponent_gamma=0)
    with pytest.raises(ValueError):
        MicroParams(q_threshold=1.0)


def test_size_sampler_validation_and_sampling() -> None:
    with pytest.raises(ValueError):
        SizeSampler.fixed(1)
    sampler = SizeSampler.from_mapping({2: 3.0, 4: 1.0})
    assert sampler.probabilities() == pytest.approx({2: 0.75, 4: 0.25})
    rng = np.random.default_rng(0)
    assert {sampler.sample(rng) for _ in range(200)} == {2, 4}
    assert SizeSampler.fixed(3).sample(rng) == 3


def test_truncated_power_law_sizes() -> None:
    sampler = SizeSampler.truncated_power_law(2, 4, 2.0)
    weights = np.array([2.0, 3.0, 4.0]) ** -2
    assert sampler.weights == pytest.approx(tuple(weights / weights.sum()))
    assert sampler.max_size == 4


def test_reach_probability_two_nodes() -> None:
    params = MicroParams(alpha=0, exponent_gamma=1)
    pop = _population(2)
    assert reach_probability(pop, params, 0) == pytest.approx(2 / 3)
    assert reach_probability(pop, params, 1) == pytest.approx(1 / 3)


def test_large_inertia_flattens_reach() -> None:
    probs = reach_probabilities(_population(10), MicroParams(alpha=1e6))
    assert np.max(np.abs(probs - 0.1)) < 1e-4
    assert probs.sum() == pytest.approx(1.0)


def test_reach_decreases_with_rank() -> None:
    probs = reach_probabilities(_population(50), MicroParams(alpha=2, exponent_gamma=1.5))
    assert np.all(np.diff(probs) < 0)


def test_quality_filter_zeroes_selection() -> None:
    pop = _population(3)
    params = MicroParams(alpha=0, exponent_gamma=1, q_threshold=0.5)
    np.testing.assert_allclose(selection_probabilities(pop, params), [2 / 3, 1 / 3, 0.0])
    assert selection_probability(pop, params, 2) == 0.0


def test_empty_eligible_set_raises() -> None:
    pop = RankedPopulation.from_ranks([0, 1], [1, 2], [0.3, 0.2])
    with pytest.raises(EligibleSetError):
        selection_probabilities(pop, MicroParams(q_threshold=0.5))


def test_expected_degrees() -> None:
    single = expected_degree_profile(_population(1), MicroParams(lambda_rate=1, horizon_T=100))
    np.testing.assert_allclose(single, [100.0])
    pair = expected_degree_profile(
        _population(2), MicroParams(alpha=0, exponent_gamma=1, lambda_rate=1, horizon_T=30)
    )
    np.testing.assert_allclose(pair, [20.0, 10.0])


def test_expected_degrees_depend_on_rate_times_horizon() -> None:
    pop = _population(20)
    a = expected_degree_profile(pop, MicroParams(lambda_rate=2, horizon_T=50))
    b = expected_degree_profile(pop, MicroParams(lambda_rate=1, horizon_T=100))
    np.testing.assert_allclose(a, b)
    assert a.sum() == pytest.approx(100.0)
    assert np.all(np.diff(a) <= 0)


def test_harmonic_approximation() -> None:
    assert harmonic_normalizer_approximation(1000, 5) == pytest.approx(math.log(1005 / 5))
    exact = sum(1 / (r + 50) for r in range(1, 100001))
    assert harmonic_normalizer_approximation(100000, 50) == pytest.approx(exact, rel=0.01)
    with pytest.raises(ValueError):
        harmonic_normalizer_approximation(10, 0)


def test_sample_collaborators_skips_initiator_and_filtered_nodes() -> None:
    pop = _population(10)
    params = MicroParams(q_threshold=0.5)
    rng = np.random.default_rng(3)
    for _ in range(100):
        chosen = sample_collaborators(pop, params, 0, 3, rng)
        assert len(set(chosen.tolist())) == 3
        assert 0 not in chosen
        assert all(pop.qualities[i] > 0.5 for i in chosen)
    with pytest.raises(EligibleSetError):
        sample_collaborators(pop, params, 0, 5, rng)


def test_three_nodes_size_three_always_full() -> None:
    trace = simulate(_population(3), MicroParams(size_sampler=SizeSampler.fixed(3)), 25, seed=1)
    assert trace.hypergraph.m == 25
    assert all(e.nodes == (0, 1, 2) for e in trace.hypergraph.edges)
    assert trace.final_degrees == {0: 25, 1: 25, 2: 25}
    assert sum(trace.collaborator_counts.values()) == 50


def test_zero_edges_gives_zero_degrees() -> None:
    trace = simulate(_population(5), MicroParams(), 0, seed=0)
    assert trace.hypergraph.m == 0
    assert set(trace.final_degrees.values()) == {0}


def test_simulation_is_deterministic() -> None:
    pop = _population(50)
    a = simulate(pop, MicroParams(), 200, seed=9)
    b = simulate(pop, MicroParams(), 200, seed=9)
    assert a.hypergraph == b.hypergraph
    assert a.collaborator_counts == b.collaborator_counts


def test_simulation_only_uses_eligible_nodes() -> None:
    pop = _population(20)
    trace = simulate(pop, MicroParams(q_threshold=0.5), 300, seed=2)
    assert trace.eligible_set == frozenset(range(10))
    used = {v for e in trace.hypergraph.edges for v in e.nodes}
    assert used <= trace.eligible_set


def test_simulation_needs_enough_eligible_nodes() -> None:
    pop = _population(4)
    with pytest.raises(EligibleSetError):
        simulate(pop, MicroParams(q_threshold=0.5, size_sampler=SizeSampler.fixed(3)), 5, seed=0)


def test_single_node_verification_is_trivial() -> None:
    pop = _population(1)
    trace = SimulationTrace(TemporalHypergraph(nodes=[0]), pop, {0: 0}, {0: 0}, frozenset({0}))
    check = verify_zipf_mandelbrot(trace, MicroParams())
    assert check.max_relative_deviation == 0.0
    assert check.fit is None


def test_verification_needs_enough_selections() -> None:
    trace = simulate(_population(10), MicroParams(), 10, seed=0)
    with pytest.raises(InsufficientDataError):
        verify_zipf_mandelbrot(trace, MicroParams())


def test_trace_sidecar(tmp_path) -> None:
    pop = RankedPopulation.from_ranks([5, 3, 9], [1, 3, 2])
    trace = simulate(pop, MicroParams(size_sampler=SizeSampler.fixed(2)), 10, seed=0)
    path = tmp_path / "rank_degree.csv"
    write_trace_sidecar(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "node,rank,quality,final_degree,collaborator_count"
    assert [line.split(",")[0] for line in lines[1:]] == ["3", "5", "9"]


@pytest.mark.slow
def test_degrees_follow_zipf_mandelbrot() -> None:
    params = MicroParams(alpha=5, exponent_gamma=1, size_sampler=SizeSampler.fixed(3))
    trace = simulate(_population(1000), params, 20000, seed=42)
    check = verify_zipf_mandelbrot(trace, params)
    assert check.selections == 40000
    assert check.fit.slope == pytest.approx(-1.0, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("exponent", [0.8, 1.2])
def test_zero_inertia_reduces_to_zipf(exponent: float) -> None:
    params = MicroParams(alpha=0, exponent_gamma=exponent, size_sampler=SizeSampler.fixed(3))
    trace = simulate(_population(1000), params, 50000, seed=7)
    check = verify_zipf_mandelbrot(trace, params)
    assert check.normalizer_approximation is None
    assert check.fit.slope == pytest.approx(-exponent, abs=0.1)
