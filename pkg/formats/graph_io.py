#
#  graph_io.py
#
#  graph6, edge list and DOT text for Graph.
#
from __future__ import annotations

from enum import Enum

from errors import Graph6ParseError, ParameterError
from graph_core import Graph


class GraphFormat(Enum):
    GRAPH6 = "graph6"
    EDGELIST = "edgelist"
    DOT = "dot"


_HEADER = ">>graph6<<"
_SMALL = 62
_LARGE = 258047


def _size_bytes(n: int) -> str:
    if n <= _SMALL:
        return chr(n + 63)
    if n <= _LARGE:
        return "~" + "".join(chr((n >> shift & 63) + 63) for shift in (12, 6, 0))
    raise ParameterError(f"graph6 cannot encode {n} vertices", clause="n")


def write_graph6(g: Graph) -> str:
    """Size byte(s), then the upper triangle column by column, six bits per printable byte."""
    out = [_size_bytes(g.n)]
    value, count = 0, 0
    for j in range(1, g.n):
        row = g.adj[j]
        for i in range(j):
            value = value << 1 | (row >> i & 1)
            count += 1
            if count == 6:
                out.append(chr(value + 63))
                value, count = 0, 0
    if count:
        out.append(chr((value << (6 - count)) + 63))
    return "".join(out)


def parse_graph6(text: str) -> Graph:
    data = text.strip()
    base = 0
    if data.startswith(_HEADER):
        data = data[len(_HEADER):]
        base = len(_HEADER)
    if not data:
        raise Graph6ParseError("empty graph6 string", base)
    for offset, ch in enumerate(data):
        if not 63 <= ord(ch) <= 126:
            raise Graph6ParseError(f"byte {ord(ch)} outside 63..126", base + offset)

    if data[0] != "~":
        n, pos = ord(data[0]) - 63, 1
    else:
        if len(data) < 4 or data[1] == "~":
            raise Graph6ParseError("unsupported graph6 size header", base)
        n = 0
        for ch in data[1:4]:
            n = n << 6 | (ord(ch) - 63)
        pos = 4

    needed = (n * (n - 1) // 2 + 5) // 6
    body = data[pos:]
    if len(body) != needed:
        raise Graph6ParseError(f"expected {needed} data bytes for n = {n}, got {len(body)}",
                               base + pos + min(len(body), needed))
    edges = []
    index = 0
    for j in range(1, n):
        for i in range(j):
            byte = ord(body[index // 6]) - 63
            if byte >> (5 - index % 6) & 1:
                edges.append((i, j))
            index += 1
    if index % 6 and (ord(body[-1]) - 63) & ((1 << (6 - index % 6)) - 1):
        raise Graph6ParseError("nonzero padding bits", base + pos + len(body) - 1)
    return Graph.from_edges(n, edges)


def write_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> Graph:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ParameterError("edge list needs a header line 'n m'", clause="edgelist")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = [(int(u), int(v)) for u, v in rows[1:]]
    except ValueError as e:
        raise ParameterError(f"bad edge list: {e}", clause="edgelist") from e
    if len(edges) != m:
        raise ParameterError(f"header announces {m} edges, found {len(edges)}", clause="edgelist")
    return Graph.from_edges(n, edges)


def write_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    lines.extend(f"  {v};" for v in g.vertices if not g.adj[v])
    lines.extend(f"  {u} -- {v};" for u, v in g.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def detect_format(text: str) -> GraphFormat:
    first = next((line.strip() for line in text.splitlines() if line.strip()), "")
    if len(first.split()) == 2:
        return GraphFormat.EDGELIST
    return GraphFormat.GRAPH6


def read_graph(text: str) -> Graph:
    if detect_format(text) is GraphFormat.EDGELIST:
        return parse_edgelist(text)
    return parse_graph6(text.strip().splitlines()[0] if text.strip() else "")


def write_graph(g: Graph, fmt: GraphFormat | str = GraphFormat.GRAPH6) -> str:
    fmt = GraphFormat(fmt)
    if fmt is GraphFormat.EDGELIST:
        return write_edgelist(g)
    if fmt is GraphFormat.DOT:
        return write_dot(g)
    return write_graph6(g) + "\n"
