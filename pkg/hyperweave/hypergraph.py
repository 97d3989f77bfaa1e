"""Temporal hypergraph data model with an inverted incidence index."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np
from scipy import sparse

from hyperweave.errors import InvalidEdgeError

NodeId = int


@dataclass(frozen=True)
class Hyperedge:
    """
    A timestamped group of nodes.

    Node ids are deduplicated and stored ascending on construction.

    Attributes:
        nodes: Sorted, duplicate-free node ids.
        timestamp: Non-negative event time.
    """

    nodes: tuple[NodeId, ...]
    timestamp: int = 0

    def __post_init__(self) -> None:
        normalized = tuple(sorted({int(v) for v in self.nodes}))
        if not normalized:
            raise InvalidEdgeError("hyperedge must contain at least one node")
        if normalized[0] < 0:
            raise InvalidEdgeError(f"negative node id {normalized[0]}")
        if self.timestamp < 0:
            raise InvalidEdgeError(f"negative timestamp {self.timestamp}")
        object.__setattr__(self, "nodes", normalized)
        object.__setattr__(self, "timestamp", int(self.timestamp))

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: object) -> bool:
        return node in self.nodes


@dataclass(frozen=True)
class LocalContext:
    """
    Recent relationships of one node.

    Attributes:
        node: The node the context describes.
        degree: Number of edges containing the node.
        edges: (edge index, node ids) pairs, most recent first.
    """

    node: NodeId
    degree: int
    edges: tuple[tuple[int, tuple[NodeId, ...]], ...]


EdgeLike = Union[Hyperedge, Iterable[NodeId]]


class TemporalHypergraph:
    """
    Ordered multiset of timestamped hyperedges over integer node ids.

    Edges are identified by their position in insertion order. Duplicate
    node sets are allowed. The node set only grows; removing edges leaves
    their nodes in place as isolated nodes. Mutations need exclusive
    access, reads may run concurrently once mutation has stopped.
    """

    def __init__(
        self,
        edges: Iterable[Hyperedge] = (),
        nodes: Iterable[NodeId] = (),
        temporal: bool = True,
    ):
        self.temporal = temporal
        self._nodes: set[NodeId] = set()
        self._edges: list[Hyperedge] = []
        self._postings: dict[NodeId, list[int]] = {}
        self.add_nodes(nodes)
        for edge in edges:
            self.add_hyperedge(edge)

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def nodes(self) -> frozenset[NodeId]:
        return frozenset(self._nodes)

    @property
    def edges(self) -> tuple[Hyperedge, ...]:
        return tuple(self._edges)

    def sorted_nodes(self) -> list[NodeId]:
        return sorted(self._nodes)

    def edge(self, index: int) -> Hyperedge:
        return self._edges[index]

    def next_timestamp(self) -> int:
        """Timestamp that follows every existing edge (insertion index when empty)."""
        if not self._edges:
            return 0
        return max(e.timestamp for e in self._edges) + 1

    def add_nodes(self, nodes: Iterable[NodeId]) -> None:
        for v in nodes:
            v = int(v)
            if v < 0:
                raise InvalidEdgeError(f"negative node id {v}")
            self._nodes.add(v)

    def add_hyperedge(self, edge: EdgeLike, timestamp: Optional[int] = None) -> int:
        """
        Append a hyperedge.

        Args:
            edge: A Hyperedge, or an iterable of node ids.
            timestamp: Event time for a bare node iterable. Defaults to the
                insertion index.

        Returns:
            Index of the new edge (m - 1 after insertion).

        Raises:
            InvalidEdgeError: If the node set is empty.
        """
        if not isinstance(edge, Hyperedge):
            edge = Hyperedge(
                tuple(edge), len(self._edges) if timestamp is None else timestamp
            )
        index = len(self._edges)
        self._edges.append(edge)
        for v in edge.nodes:
            self._nodes.add(v)
            self._postings.setdefault(v, []).append(index)
        return index

    def remove_hyperedges(self, indices: Iterable[int]) -> int:
        """
        Remove edges by index, keeping the relative order of the rest.

        Args:
            indices: Edge indices to remove.

        Returns:
            Number of edges removed.

        Raises:
            InvalidEdgeError: If any index is out of range. Nothing is removed.
        """
        doomed = {int(i) for i in indices}
        bad = sorted(i for i in doomed if i < 0 or i >= len(self._edges))
        if bad:
            raise InvalidEdgeError(
                f"edge indices out of range for m={len(self._edges)}: {bad}"
            )
        if not doomed:
            return 0
        self._edges = [e for i, e in enumerate(self._edges) if i not in doomed]
        self._rebuild_index()
        return len(doomed)

    def _rebuild_index(self) -> None:
        self._postings = {}
        for index, edge in enumerate(self._edges):
            for v in edge.nodes:
                self._postings.setdefault(v, []).append(index)

    def degree(self, v: NodeId) -> int:
        """Number of edges containing v, duplicates included. Unknown nodes have degree 0."""
        return len(self._postings.get(v, ()))

    def degrees(self) -> dict[NodeId, int]:
        """Degree of every node in V, isolated nodes included."""
        return {v: len(self._postings.get(v, ())) for v in self._nodes}

    def degree_array(self, order: list[NodeId]) -> np.ndarray:
        return np.array([len(self._postings.get(v, ())) for v in order], dtype=np.int64)

    def incident_edges(self, v: NodeId) -> tuple[int, ...]:
        """Posting list of v: indices of the edges containing it, ascending."""
        return tuple(self._postings.get(v, ()))

    def incidence_matrix(self) -> tuple[sparse.csr_matrix, list[NodeId]]:
        """
        Build the binary n x m incidence matrix.

        Rows follow ascending node id, columns follow edge order.

        Returns:
            Tuple of (sparse matrix, row node ids).
        """
        order = self.sorted_nodes()
        row_of = {v: i for i, v in enumerate(order)}
        rows: list[int] = []
        cols: list[int] = []
        for j, edge in enumerate(self._edges):
            for v in edge.nodes:
                rows.append(row_of[v])
                cols.append(j)
        data = np.ones(len(rows), dtype=np.int64)
        matrix = sparse.csr_matrix(
            (data, (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(len(order), len(self._edges)),
        )
        return matrix, order

    def local_context(self, v: NodeId, max_edges: int) -> LocalContext:
        """
        Summarize the most recent edges that contain v.

        Args:
            v: Node of interest.
            max_edges: Maximum number of edges to list.

        Returns:
            LocalContext with at most max_edges edges, newest first.
        """
        if max_edges < 0:
            raise ValueError("max_edges must be non-negative")
        postings = self._postings.get(v, [])
        recent = postings[::-1][:max_edges]
        return LocalContext(
            node=v,
            degree=len(postings),
            edges=tuple((i, self._edges[i].nodes) for i in recent),
        )

    def compact(self) -> tuple["TemporalHypergraph", dict[NodeId, NodeId]]:
        """
        Renumber nodes densely to 0..n-1 in ascending id order.

        Returns:
            Tuple of (renumbered copy, old id -> new id mapping).
        """
        mapping = {v: i for i, v in enumerate(self.sorted_nodes())}
        compacted = TemporalHypergraph(nodes=mapping.values(), temporal=self.temporal)
        for edge in self._edges:
            compacted.add_hyperedge(
                Hyperedge(tuple(mapping[v] for v in edge.nodes), edge.timestamp)
            )
        return compacted, mapping

    def copy(self) -> "TemporalHypergraph":
        clone = TemporalHypergraph(temporal=self.temporal)
        clone._nodes = set(self._nodes)
        clone._edges = list(self._edges)
        clone._postings = {v: list(p) for v, p in self._postings.items()}
        return clone

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TemporalHypergraph):
            return NotImplemented
        return self._edges == other._edges and self._nodes == other._nodes

    def __repr__(self) -> str:
        return f"TemporalHypergraph(n={self.n}, m={self.m}, temporal={self.temporal})"
