"""Global statistics the optimizer agent reads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csgraph

from hyperweave.errors import FitUndefinedError
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.patterns import current_doi, degree_distribution
from hyperweave.powerlaw import fit_power_law
from hyperweave.profiles import EntityProfile


@dataclass(frozen=True)
class NetworkStatistics:
    """
    Snapshot of a hypergraph's global shape.

    Attributes:
        num_nodes: n.
        num_edges: m.
        mean_degree: Mean degree over all nodes, isolated ones included.
        max_degree: Largest degree.
        mean_edge_size: Mean hyperedge cardinality.
        doi: Density of interactions over the whole edge list, absent when m < 2.
        components: Connected components of the clique expansion, isolated
            nodes counting as their own component.
        degree_slope: Power-law slope of the degree distribution, absent when
            undefined.
        attribute_diversity: Distinct attribute values per hyperedge, averaged.
    """

    num_nodes: int = 0
    num_edges: int = 0
    mean_degree: float = 0.0
    max_degree: int = 0
    mean_edge_size: float = 0.0
    doi: Optional[float] = None
    components: int = 0
    degree_slope: Optional[float] = None
    attribute_diversity: float = 0.0

    def items(self) -> list[tuple[str, str]]:
        """Labelled, formatted values in prompt order."""
        def fmt(value: Optional[float]) -> str:
            return "n/a" if value is None else f"{value:.4f}"

        return [
            ("nodes", str(self.num_nodes)),
            ("hyperedges", str(self.num_edges)),
            ("mean degree", fmt(self.mean_degree)),
            ("max degree", str(self.max_degree)),
            ("mean hyperedge size", fmt(self.mean_edge_size)),
            ("density of interactions", fmt(self.doi)),
            ("connected components", str(self.components)),
            ("degree distribution slope", fmt(self.degree_slope)),
            ("attribute diversity", fmt(self.attribute_diversity)),
        ]


def count_components(graph: TemporalHypergraph) -> int:
    if graph.n == 0:
        return 0
    matrix, _ = graph.incidence_matrix()
    adjacency = matrix @ matrix.T
    count, _ = csgraph.connected_components(adjacency, directed=False)
    return int(count)


def attribute_diversity(
    graph: TemporalHypergraph, profiles: Sequence[EntityProfile]
) -> float:
    if graph.m == 0 or not profiles:
        return 0.0
    attrs = {p.id: p.attributes for p in profiles}
    per_edge = [
        len({pair for v in edge.nodes for pair in attrs.get(v, ())})
        for edge in graph.edges
    ]
    return float(np.mean(per_edge))


def compute_network_statistics(
    graph: TemporalHypergraph, profiles: Sequence[EntityProfile] = ()
) -> NetworkStatistics:
    """
    Compute every NetworkStatistics field from the hypergraph.

    Args:
        graph: Hypergraph to summarize.
        profiles: Entity profiles, used only for attribute diversity.

    Returns:
        NetworkStatistics; an empty hypergraph yields zeros and no DoI.
    """
    if graph.n == 0:
        return NetworkStatistics()
    degrees = np.array(list(graph.degrees().values()), dtype=np.int64)
    sizes = [len(e) for e in graph.edges]
    try:
        slope: Optional[float] = fit_power_law(degree_distribution(graph)).slope
    except FitUndefinedError:
        slope = None
    return NetworkStatistics(
        num_nodes=graph.n,
        num_edges=graph.m,
        mean_degree=float(degrees.mean()),
        max_degree=int(degrees.max()),
        mean_edge_size=float(np.mean(sizes)) if sizes else 0.0,
        doi=current_doi(graph),
        components=count_components(graph),
        degree_slope=slope,
        attribute_diversity=attribute_diversity(graph, profiles),
    )
