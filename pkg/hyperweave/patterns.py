"""Structural and temporal pattern statistics of a hypergraph.

P1 degree, P2 hyperedge size, P3 pairwise intersection size, P4 singular
values, P5 group degree, P6 temporal locality, P7 inter-event persistence,
P8 density of interactions. Every function is read-only on its input.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import svds

from hyperweave.errors import FitUndefinedError, UndefinedMetricError
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.powerlaw import (DistributionHistogram, PowerLawFit, burstiness,
                                 fit_power_law)


@dataclass(frozen=True)
class DoiSeries:
    """
    Density of interactions at increasing edge counts.

    Attributes:
        points: (t, doi) pairs, t strictly increasing, doi in [0, 1].
        exact: The same densities as exact fractions.
    """

    points: tuple[tuple[int, float], ...]
    exact: tuple[Fraction, ...]


@dataclass(frozen=True)
class LocalityResult:
    """
    Windowed node-reuse fraction.

    Attributes:
        mean: Mean reuse fraction over edges 1..m-1.
        window: Number of preceding edges inspected.
        series: (edge index, reuse fraction) for every edge after the first.
    """

    mean: float
    window: int
    series: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class PersistenceResult:
    """
    Pooled inter-event gaps between a node's successive participations.

    Attributes:
        histogram: Gap histogram.
        fit: Power-law fit of the gaps, absent when undefined.
        burstiness: Burstiness coefficient of the pooled gaps, absent when undefined.
        clock: "timestamp" or "index", whichever measured the gaps.
    """

    histogram: DistributionHistogram
    fit: Optional[PowerLawFit]
    burstiness: Optional[float]
    clock: str


def degree_distribution(graph: TemporalHypergraph) -> DistributionHistogram:
    """Histogram of node degrees; zero-degree nodes are counted in ``excluded``."""
    degrees = graph.degrees().values()
    isolated = sum(1 for d in degrees if d == 0)
    return DistributionHistogram.from_values(
        (d for d in degrees if d > 0), excluded=isolated
    )


def hyperedge_size_distribution(graph: TemporalHypergraph) -> DistributionHistogram:
    """Histogram of hyperedge cardinalities."""
    return DistributionHistogram.from_values(len(e) for e in graph.edges)


def pair_overlaps(graph: TemporalHypergraph) -> sparse.csc_matrix:
    """
    Strict upper triangle of M^T M: entry (i, j), i < j, is |e_i & e_j|.

    Only pairs sharing at least one node are stored, so the product walks
    the inverted index instead of all m^2 pairs.
    """
    matrix, _ = graph.incidence_matrix()
    overlaps = sparse.triu(matrix.T @ matrix, k=1).tocsc()
    overlaps.eliminate_zeros()
    return overlaps


def intersection_size_distribution(graph: TemporalHypergraph) -> DistributionHistogram:
    """Histogram of |e_i & e_j| over pairs i < j that share at least one node."""
    if graph.m < 2:
        return DistributionHistogram()
    return DistributionHistogram.from_values(pair_overlaps(graph).data.astype(np.int64))


def group_degree_distribution(
    graph: TemporalHypergraph, group_size: int = 2
) -> DistributionHistogram:
    """
    Histogram of group degrees of co-occurring node groups.

    The group degree of a node subset is the number of edges containing
    all of it. Only subsets that co-occur in some edge are counted.

    Args:
        graph: Hypergraph to measure.
        group_size: Size of the node subsets, at least 2.

    Returns:
        Histogram of group degrees, empty when no edge is large enough.
    """
    if group_size < 2:
        raise ValueError("group_size must be at least 2")
    groups: Counter = Counter()
    for edge in graph.edges:
        if len(edge) >= group_size:
            groups.update(itertools.combinations(edge.nodes, group_size))
    return DistributionHistogram.from_values(groups.values())


def singular_value_spectrum(graph: TemporalHypergraph, k: int) -> list[float]:
    """
    Largest singular values of the incidence matrix, descending.

    A truncated request runs ARPACK on the sparse matrix; asking for the
    full spectrum (k >= min(n, m)) uses a dense decomposition since
    ARPACK cannot return every singular value.

    Args:
        graph: Hypergraph to measure.
        k: Number of singular values, clipped to min(n, m).

    Raises:
        UndefinedMetricError: If the hypergraph has no nodes or no edges.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if graph.n == 0 or graph.m == 0:
        raise UndefinedMetricError("singular values of an empty hypergraph")
    matrix, _ = graph.incidence_matrix()
    matrix = matrix.astype(np.float64)
    rank_bound = min(matrix.shape)
    k = min(k, rank_bound)
    if k < rank_bound:
        v0 = np.random.default_rng(0).random(rank_bound) + 0.5
        values = svds(matrix, k=k, v0=v0, tol=0, return_singular_vectors=False)
    else:
        values = linalg.svdvals(matrix.toarray())
    return sorted((float(v) for v in values), reverse=True)[:k]


def temporal_locality(graph: TemporalHypergraph, window: int = 10) -> LocalityResult:
    """
    Mean fraction of an edge's nodes already seen in the preceding window.

    For edge t >= 1 the fraction counts nodes appearing in any of the
    previous min(t, window) edges.

    Raises:
        UndefinedMetricError: If the hypergraph has fewer than 2 edges.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    if graph.m < 2:
        raise UndefinedMetricError("temporal locality needs at least 2 edges")
    last_seen: dict[int, int] = {}
    series = []
    for t, edge in enumerate(graph.edges):
        if t:
            reused = sum(1 for v in edge.nodes if last_seen.get(v, -window - 1) >= t - window)
            series.append((t, reused / len(edge)))
        for v in edge.nodes:
            last_seen[v] = t
    mean = float(np.mean([f for _, f in series]))
    return LocalityResult(mean=mean, window=window, series=tuple(series))


def _event_clock(graph: TemporalHypergraph) -> tuple[list[int], str]:
    stamps = [e.timestamp for e in graph.edges]
    if graph.temporal and len(set(stamps)) == len(stamps):
        return stamps, "timestamp"
    return list(range(graph.m)), "index"


def interevent_gaps(graph: TemporalHypergraph) -> tuple[list[int], str]:
    """Pooled gaps between consecutive participations of every node, and the clock used."""
    clock, name = _event_clock(graph)
    gaps: list[int] = []
    for v in graph.sorted_nodes():
        times = sorted(clock[i] for i in graph.incident_edges(v))
        gaps.extend(b - a for a, b in zip(times, times[1:]))
    return gaps, name


def persistence_interevent_distribution(graph: TemporalHypergraph) -> PersistenceResult:
    """
    Inter-event gap histogram with its power-law fit.

    Gaps are measured in timestamps when every edge has a distinct
    timestamp, otherwise in edge indices.

    Raises:
        UndefinedMetricError: If the hypergraph has fewer than 2 edges.
    """
    if graph.m < 2:
        raise UndefinedMetricError("inter-event gaps need at least 2 edges")
    gaps, clock = interevent_gaps(graph)
    hist = DistributionHistogram.from_values(gaps)
    fit = None
    bursty = None
    if gaps:
        try:
            fit = fit_power_law(hist)
        except FitUndefinedError:
            fit = None
        try:
            bursty = burstiness(gaps)
        except FitUndefinedError:
            bursty = None
    return PersistenceResult(histogram=hist, fit=fit, burstiness=bursty, clock=clock)


def intersecting_pair_counts(graph: TemporalHypergraph) -> np.ndarray:
    """
    Cumulative intersecting-pair counts.

    Returns:
        Array c of length m + 1 where c[t] is the number of intersecting
        pairs among the first t edges.
    """
    counts = np.zeros(graph.m + 1, dtype=np.int64)
    if graph.m >= 2:
        per_edge = np.diff(pair_overlaps(graph).indptr)
        counts[1:] = np.cumsum(per_edge)
    return counts


def density_of_interactions_series(
    graph: TemporalHypergraph, checkpoints: Sequence[int]
) -> DoiSeries:
    """
    Density of interactions at each checkpoint.

    DoI(t) is the number of intersecting pairs among the first t edges
    divided by t choose 2.

    Args:
        graph: Hypergraph to measure.
        checkpoints: Strictly increasing edge counts, each in [2, m].

    Raises:
        UndefinedMetricError: On a checkpoint below 2 or above m, or an
            unsorted checkpoint list.
    """
    checkpoints = [int(t) for t in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise UndefinedMetricError("checkpoints must be strictly increasing")
    for t in checkpoints:
        if t < 2:
            raise UndefinedMetricError(f"checkpoint {t} is below 2")
        if t > graph.m:
            raise UndefinedMetricError(f"checkpoint {t} exceeds m={graph.m}")
    cumulative = intersecting_pair_counts(graph)
    exact = tuple(Fraction(int(cumulative[t]), t * (t - 1) // 2) for t in checkpoints)
    return DoiSeries(
        points=tuple((t, float(f)) for t, f in zip(checkpoints, exact)), exact=exact
    )


def relative_checkpoints(m: int, count: int = 10, distinct: bool = True) -> list[int]:
    """
    Edge counts round(m * j / count) for j = 1..count, clipped to [2, m].

    Repeats are dropped unless ``distinct`` is False, which keeps all
    ``count`` checkpoints in order.
    """
    if m < 2:
        return []
    points = [min(m, max(2, int(round(m * j / count)))) for j in range(1, count + 1)]
    return sorted(set(points)) if distinct else points


def current_doi(graph: TemporalHypergraph) -> Optional[float]:
    """DoI over the whole edge list, absent when m < 2."""
    if graph.m < 2:
        return None
    return density_of_interactions_series(graph, [graph.m]).points[0][1]
