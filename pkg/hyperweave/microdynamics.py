"""Rank-based preferential attachment with a quality filter.

Each new hyperedge has an initiator drawn uniformly from the eligible
nodes and k - 1 collaborators drawn without replacement with probability
proportional to (rank + alpha) ** -exponent_gamma, renormalized over the
eligible nodes still available. In the steady state node degrees follow
the Zipf-Mandelbrot profile d_i = A * (r_i + alpha) ** -exponent_gamma.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from hyperweave.errors import EligibleSetError, InsufficientDataError
from hyperweave.hypergraph import Hyperedge, NodeId, TemporalHypergraph
from hyperweave.powerlaw import PowerLawFit, fit_loglog_line

logger = logging.getLogger(__name__)

MIN_SELECTIONS = 1000


@dataclass(frozen=True)
class SizeSampler:
    """
    Discrete hyperedge-size distribution.

    Attributes:
        support: Possible sizes, ascending, each >= 2.
        weights: Positive probabilities summing to 1.
    """

    support: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.support or len(self.support) != len(self.weights):
            raise ValueError("size sampler needs matching, non-empty support and weights")
        if min(self.support) < 2:
            raise ValueError("hyperedge sizes must be at least 2")
        if any(w <= 0 for w in self.weights):
            raise ValueError("size weights must be positive")

    @classmethod
    def fixed(cls, k: int) -> "SizeSampler":
        return cls((int(k),), (1.0,))

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float]) -> "SizeSampler":
        items = sorted((int(k), float(w)) for k, w in weights.items() if w > 0)
        total = sum(w for _, w in items)
        return cls(tuple(k for k, _ in items), tuple(w / total for _, w in items))

    @classmethod
    def truncated_power_law(cls, min_size: int, max_size: int, exponent: float) -> "SizeSampler":
        sizes = np.arange(min_size, max_size + 1, dtype=np.float64)
        weights = sizes ** -exponent
        weights /= weights.sum()
        return cls(tuple(int(k) for k in sizes), tuple(float(w) for w in weights))

    @property
    def max_size(self) -> int:
        return self.support[-1]

    def probabilities(self) -> dict[int, float]:
        return dict(zip(self.support, self.weights))

    def sample(self, rng: np.random.Generator) -> int:
        if len(self.support) == 1:
            return self.support[0]
        return int(rng.choice(self.support, p=np.asarray(self.weights)))


@dataclass(frozen=True)
class MicroParams:
    """
    Parameters of the attachment model.

    Attributes:
        alpha: Collaborative inertia, >= 0.
        exponent_gamma: Attachment exponent, > 0.
        lambda_rate: Hyperedge arrival rate, > 0.
        q_threshold: Quality filter threshold in [0, 1).
        horizon_T: Observation horizon, > 0.
        size_sampler: Hyperedge-size distribution.
    """

    alpha: float = 5.0
    exponent_gamma: float = 1.0
    lambda_rate: float = 1.0
    q_threshold: float = 0.0
    horizon_T: float = 1000.0
    size_sampler: SizeSampler = field(default_factory=lambda: SizeSampler.fixed(3))

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.exponent_gamma <= 0:
            raise ValueError("exponent_gamma must be > 0")
        if self.lambda_rate <= 0 or self.horizon_T <= 0:
            raise ValueError("lambda_rate and horizon_T must be > 0")
        if not 0 <= self.q_threshold < 1:
            raise ValueError("q_threshold must lie in [0, 1)")


@dataclass(frozen=True, eq=False)
class RankedPopulation:
    """
    Per-node rank and quality.

    Index i of ``ranks`` and ``qualities`` describes ``node_ids[i]``.

    Attributes:
        node_ids: Node id of each population slot.
        ranks: Permutation of 1..N, 1 is best.
        qualities: Values in [0, 1], non-increasing in rank.
    """

    node_ids: tuple[NodeId, ...]
    ranks: np.ndarray
    qualities: np.ndarray

    def __post_init__(self) -> None:
        size = len(self.node_ids)
        ranks = np.asarray(self.ranks, dtype=np.int64)
        qualities = np.asarray(self.qualities, dtype=np.float64)
        if ranks.shape != (size,) or qualities.shape != (size,):
            raise ValueError("ranks and qualities must have one entry per node")
        if sorted(ranks.tolist()) != list(range(1, size + 1)):
            raise ValueError("ranks must be a permutation of 1..N")
        if np.any(qualities < 0) or np.any(qualities > 1):
            raise ValueError("qualities must lie in [0, 1]")
        by_rank = qualities[np.argsort(ranks)]
        if np.any(np.diff(by_rank) > 0):
            raise ValueError("quality must not increase with rank")
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "qualities", qualities)

    @classmethod
    def from_ranks(
        cls,
        node_ids: Sequence[NodeId],
        ranks: Sequence[int],
        qualities: Optional[Sequence[float]] = None,
    ) -> "RankedPopulation":
        ranks = np.asarray(ranks, dtype=np.int64)
        if qualities is None:
            qualities = 1.0 - (ranks - 1) / len(ranks)
        return cls(tuple(int(v) for v in node_ids), ranks, np.asarray(qualities, dtype=np.float64))

    @classmethod
    def by_node_order(cls, node_ids: Sequence[NodeId]) -> "RankedPopulation":
        """Rank nodes in ascending id order: the smallest id gets rank 1."""
        ordered = sorted(int(v) for v in node_ids)
        return cls.from_ranks(ordered, range(1, len(ordered) + 1))

    @property
    def size(self) -> int:
        return len(self.node_ids)

    def index_of(self, node: NodeId) -> int:
        return self._index[node]

    @property
    def _index(self) -> dict[NodeId, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {v: i for i, v in enumerate(self.node_ids)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


@dataclass(frozen=True)
class SimulationTrace:
    """
    Outcome of one simulation run.

    Attributes:
        hypergraph: Generated hyperedges, timestamp = edge index.
        population: Population the run sampled from.
        final_degrees: Degree of every population node.
        collaborator_counts: Times each node was picked as a collaborator.
        eligible_set: Nodes passing the quality filter.
    """

    hypergraph: TemporalHypergraph
    population: RankedPopulation
    final_degrees: dict[NodeId, int]
    collaborator_counts: dict[NodeId, int]
    eligible_set: frozenset[NodeId]


@dataclass(frozen=True)
class ZipfVerification:
    """
    Comparison of simulated degrees with the Zipf-Mandelbrot prediction.

    Attributes:
        fit: Slope of log collaborator count against log(rank + alpha),
            absent for a single-node population.
        max_relative_deviation: Largest |empirical - expected| / expected
            over eligible nodes.
        mean_relative_deviation: Mean of the same ratio.
        selections: Total collaborator selections in the trace.
        normalizer: Exact sum of (r + alpha) ** -gamma over eligible nodes.
        normalizer_approximation: ln((N + alpha) / alpha), the gamma = 1
            large-N approximation, absent when alpha = 0.
    """

    fit: Optional[PowerLawFit]
    max_relative_deviation: float
    mean_relative_deviation: float
    selections: int
    normalizer: float
    normalizer_approximation: Optional[float]


def _attachment_weights(pop: RankedPopulation, params: MicroParams) -> np.ndarray:
    return (pop.ranks + params.alpha) ** -params.exponent_gamma


def eligible_mask(pop: RankedPopulation, params: MicroParams) -> np.ndarray:
    """Boolean mask of nodes whose quality exceeds q_threshold."""
    return pop.qualities > params.q_threshold


def reach_probabilities(pop: RankedPopulation, params: MicroParams) -> np.ndarray:
    """Reachability probability of every node; sums to 1."""
    weights = _attachment_weights(pop, params)
    return weights / weights.sum()


def reach_probability(pop: RankedPopulation, params: MicroParams, i: int) -> float:
    """
    Reachability of the node in slot i: (r_i + alpha)^-gamma normalized over all nodes.

    Args:
        pop: Ranked population.
        params: Model parameters.
        i: Population slot index.
    """
    return float(reach_probabilities(pop, params)[i])


def selection_probabilities(pop: RankedPopulation, params: MicroParams) -> np.ndarray:
    """
    Collaborator selection probability of every node.

    Filtered nodes get exactly 0; eligible nodes share probability 1.

    Raises:
        EligibleSetError: If no node passes the quality filter.
    """
    mask = eligible_mask(pop, params)
    if not mask.any():
        raise EligibleSetError(f"no node has quality above {params.q_threshold}")
    weights = np.where(mask, _attachment_weights(pop, params), 0.0)
    return weights / weights.sum()


def selection_probability(pop: RankedPopulation, params: MicroParams, i: int) -> float:
    """Selection probability of the node in slot i."""
    return float(selection_probabilities(pop, params)[i])


def expected_degree_profile(pop: RankedPopulation, params: MicroParams) -> np.ndarray:
    """
    Steady-state expected degrees lambda * T * P_sel(i).

    The profile depends on lambda and T only through their product and
    sums to lambda * T.
    """
    return params.lambda_rate * params.horizon_T * selection_probabilities(pop, params)


def harmonic_normalizer_approximation(num_nodes: int, alpha: float) -> float:
    """Large-N approximation ln((N + alpha) / alpha) of the gamma = 1 normalizer."""
    if alpha <= 0:
        raise ValueError("approximation needs alpha > 0")
    return math.log((num_nodes + alpha) / alpha)


def sample_collaborators(
    pop: RankedPopulation,
    params: MicroParams,
    initiator: int,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Draw distinct collaborators for an initiator.

    Collaborators come from the eligible nodes other than the initiator,
    one at a time, each draw proportional to the attachment weight and
    renormalized over the nodes not yet drawn.

    Args:
        pop: Ranked population.
        params: Model parameters.
        initiator: Population slot of the initiator.
        count: Number of collaborators.
        rng: Random generator.

    Returns:
        Population slots of the collaborators, in draw order.

    Raises:
        EligibleSetError: If fewer than count eligible nodes are available.
    """
    weights = np.where(eligible_mask(pop, params), _attachment_weights(pop, params), 0.0)
    weights[initiator] = 0.0
    available = np.flatnonzero(weights)
    if available.size < count:
        raise EligibleSetError(
            f"need {count} eligible collaborators, only {available.size} available"
        )
    if count == 0:
        return np.empty(0, dtype=np.int64)
    probs = weights[available] / weights[available].sum()
    return available[rng.choice(available.size, size=count, replace=False, p=probs)]


def simulate(
    pop: RankedPopulation, params: MicroParams, num_edges: int, seed: int
) -> SimulationTrace:
    """
    Grow a hypergraph edge by edge.

    Args:
        pop: Ranked population.
        params: Model parameters.
        num_edges: Number of hyperedges to generate.
        seed: Random seed; equal seeds give identical traces.

    Returns:
        SimulationTrace with the hypergraph and per-node tallies.

    Raises:
        EligibleSetError: If the eligible set is smaller than the largest
            hyperedge size.
    """
    mask = eligible_mask(pop, params)
    eligible = np.flatnonzero(mask)
    if eligible.size < params.size_sampler.max_size:
        raise EligibleSetError(
            f"{eligible.size} eligible nodes cannot fill hyperedges of size "
            f"{params.size_sampler.max_size}"
        )
    rng = np.random.default_rng(seed)
    base = np.where(mask, _attachment_weights(pop, params), 0.0)
    graph = TemporalHypergraph(nodes=pop.node_ids)
    collaborator_counts = np.zeros(pop.size, dtype=np.int64)

    for t in range(num_edges):
        k = params.size_sampler.sample(rng)
        initiator = int(eligible[rng.integers(eligible.size)])
        weights = base.copy()
        weights[initiator] = 0.0
        available = np.flatnonzero(weights)
        probs = weights[available] / weights[available].sum()
        chosen = available[rng.choice(available.size, size=k - 1, replace=False, p=probs)]
        collaborator_counts[chosen] += 1
        members = [pop.node_ids[initiator]] + [pop.node_ids[i] for i in chosen]
        graph.add_hyperedge(Hyperedge(tuple(members), t))

    logger.info("Simulated %d hyperedges over %d nodes", num_edges, pop.size)
    return SimulationTrace(
        hypergraph=graph,
        population=pop,
        final_degrees={v: graph.degree(v) for v in pop.node_ids},
        collaborator_counts={v: int(c) for v, c in zip(pop.node_ids, collaborator_counts)},
        eligible_set=frozenset(pop.node_ids[i] for i in eligible),
    )


def verify_zipf_mandelbrot(
    trace: SimulationTrace, params: MicroParams, min_degree: int = 5
) -> ZipfVerification:
    """
    Check simulated collaborator counts against the Zipf-Mandelbrot profile.

    Args:
        trace: Output of simulate.
        params: Parameters the trace was generated with.
        min_degree: Nodes with fewer selections are left out of the slope fit.

    Returns:
        ZipfVerification with the fitted slope and deviation summary.

    Raises:
        InsufficientDataError: If the trace has fewer than 1000 selections.
    """
    pop = trace.population
    mask = eligible_mask(pop, params)
    weights = np.where(mask, _attachment_weights(pop, params), 0.0)
    normalizer = float(weights.sum())
    approx = (
        harmonic_normalizer_approximation(int(mask.sum()), params.alpha)
        if params.alpha > 0 else None
    )
    if pop.size == 1:
        return ZipfVerification(None, 0.0, 0.0, 0, normalizer, approx)

    counts = np.array([trace.collaborator_counts[v] for v in pop.node_ids], dtype=np.float64)
    selections = int(counts.sum())
    if selections < MIN_SELECTIONS:
        raise InsufficientDataError(
            f"{selections} selections, need at least {MIN_SELECTIONS}"
        )

    expected = selection_probabilities(pop, params) * selections
    deviation = np.abs(counts[mask] - expected[mask]) / expected[mask]
    keep = counts >= min_degree
    fit = fit_loglog_line(pop.ranks[keep] + params.alpha, counts[keep])
    return ZipfVerification(
        fit=fit,
        max_relative_deviation=float(deviation.max()),
        mean_relative_deviation=float(deviation.mean()),
        selections=selections,
        normalizer=normalizer,
        normalizer_approximation=approx,
    )


def write_trace_sidecar(trace: SimulationTrace, path: Union[str, os.PathLike]) -> None:
    """Write (node, rank, quality, final_degree, collaborator_count) rows as CSV, ordered by node id."""
    pop = trace.population
    order = np.argsort(np.asarray(pop.node_ids))
    frame = pd.DataFrame(
        {
            "node": [pop.node_ids[i] for i in order],
            "rank": pop.ranks[order],
            "quality": pop.qualities[order],
            "final_degree": [trace.final_degrees[pop.node_ids[i]] for i in order],
            "collaborator_count": [trace.collaborator_counts[pop.node_ids[i]] for i in order],
        }
    )
    frame.to_csv(path, index=False, lineterminator="\n")
