"""HGT v1 line format for temporal hypergraphs.

A file starts with the header ``#HGT1`` (timestamped lines) or
``#HGT1 static`` (bare node lists). Other ``#`` lines are comments. Data
lines are ``TIMESTAMP<TAB>ID,ID,...`` or, in static files, ``ID,ID,...``.
"""

import os
from typing import Optional, Union

from hyperweave.errors import HGTParseError
from hyperweave.hypergraph import Hyperedge, TemporalHypergraph

HEADER = "#HGT1"
STATIC_HEADER = "#HGT1 static"


def _parse_ids(token: str, line_number: int) -> tuple[int, ...]:
    parts = [p.strip() for p in token.split(",")]
    if not parts or all(p == "" for p in parts):
        raise HGTParseError(line_number, "empty node list")
    ids = []
    for part in parts:
        if not (part.isascii() and part.isdigit()):
            raise HGTParseError(line_number, f"invalid node id {part!r}")
        ids.append(int(part))
    return tuple(ids)


def _parse_timestamp(token: str, line_number: int) -> int:
    token = token.strip()
    if not (token.isascii() and token.isdigit()):
        raise HGTParseError(line_number, f"invalid timestamp {token!r}")
    return int(token)


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_number = data.count(b"\n", 0, exc.start) + 1
        raise HGTParseError(line_number, f"invalid UTF-8 byte 0x{data[exc.start]:02x}") from exc


def parse_hypergraph(data: Union[bytes, str]) -> TemporalHypergraph:
    """
    Parse HGT v1 text.

    Args:
        data: UTF-8 bytes or already-decoded text.

    Returns:
        Hypergraph with edges in file order.

    Raises:
        HGTParseError: On a malformed line or invalid UTF-8, with its 1-based
            line number.
    """
    text = _decode(data) if isinstance(data, bytes) else data
    temporal: Optional[bool] = None
    graph = TemporalHypergraph()

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if temporal is None and graph.m == 0 and line.startswith(HEADER):
                temporal = line.split()[1:] != ["static"]
            continue

        has_tab = "\t" in line
        if temporal is None:
            temporal = has_tab
        if temporal:
            if not has_tab:
                raise HGTParseError(line_number, "timestamp missing")
            stamp, ids = line.split("\t", 1)
            edge = Hyperedge(
                _parse_ids(ids, line_number), _parse_timestamp(stamp, line_number)
            )
        else:
            if has_tab:
                raise HGTParseError(line_number, "timestamp in a static file")
            edge = Hyperedge(_parse_ids(line, line_number), graph.m)
        graph.add_hyperedge(edge)

    graph.temporal = True if temporal is None else temporal
    return graph


def serialize_hypergraph(graph: TemporalHypergraph) -> bytes:
    """
    Render a hypergraph as HGT v1 bytes.

    Output is deterministic: edges in list order, node ids ascending,
    ``\\n`` line endings.

    Args:
        graph: Hypergraph to serialize.

    Returns:
        UTF-8 encoded file contents.
    """
    lines = [HEADER if graph.temporal else STATIC_HEADER]
    for edge in graph.edges:
        ids = ",".join(str(v) for v in edge.nodes)
        lines.append(f"{edge.timestamp}\t{ids}" if graph.temporal else ids)
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_hgt(path: Union[str, os.PathLike]) -> TemporalHypergraph:
    """Load an HGT v1 file from disk."""
    with open(path, "rb") as f:
        return parse_hypergraph(f.read())


def write_hgt(graph: TemporalHypergraph, path: Union[str, os.PathLike]) -> None:
    """Write a hypergraph to disk in HGT v1."""
    with open(path, "wb") as f:
        f.write(serialize_hypergraph(graph))
