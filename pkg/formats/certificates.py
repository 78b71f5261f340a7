#
#  certificates.py
#
#  JSON for everything the tools hand back (models, decompositions, witnesses, certificates,
#  reports) plus PACE .td text. Vertex sets are written as ascending lists, keys sorted.
#
from __future__ import annotations

import json

from errors import ParameterError
from formats.graph_io import write_graph6
from graph_core import Graph, bits, graph_hash
from minors import branch_sets_json


def dumps(obj, pretty: bool = False) -> str:
    return json.dumps(obj, sort_keys=True, indent=2 if pretty else None)


def vertex_list(mask: int) -> list:
    return list(bits(mask))


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "m": g.m, "graph6": write_graph6(g), "hash": graph_hash(g)}


def model_to_json(m) -> dict:
    """Branch sets keyed by pattern vertex, with both graphs' hashes for integrity."""
    return {
        "pattern": write_graph6(m.pattern),
        "pattern_hash": graph_hash(m.pattern),
        "host_hash": graph_hash(m.host),
        "branch_sets": branch_sets_json(m),
        "support_size": m.size()
    }


def decomposition_to_json(t) -> dict:
    return {
        "width": t.width,
        "bags": [vertex_list(b) for b in t.bags],
        "tree_edges": [list(e) for e in t.tree.edges]
    }


def nice_to_json(ntd) -> dict:
    data = decomposition_to_json(ntd.decomposition)
    data["root"] = ntd.root
    data["kinds"] = [[kind, vertex] for kind, vertex in ntd.kinds]
    data["children"] = [list(c) for c in ntd.children]
    return data


def mesh_to_json(w, g: Graph) -> dict:
    return {
        "graph_hash": graph_hash(g),
        "a": vertex_list(w.a_set),
        "b": vertex_list(w.b_set),
        "boundary": vertex_list(w.boundary),
        "tree_vertices": vertex_list(w.tree_vertices),
        "tree_edges": [list(e) for e in w.tree_edges],
        "order": w.s,
        "connectivity": w.k
    }


def _tree_json(tree) -> dict:
    vertices, edges = tree
    return {"vertices": vertex_list(vertices), "edges": [list(e) for e in edges]}


def linkage_to_json(lw, g: Graph) -> dict:
    half = len(lw.terminal_sets) // 2
    return {
        "graph_hash": graph_hash(g),
        "left": [vertex_list(x) for x in lw.terminal_sets[:half]],
        "right": [vertex_list(x) for x in lw.terminal_sets[half:]],
        "trees": [_tree_json(t) for t in lw.trees],
        "paths": [list(path) for path in lw.paths],
        "tree_support": vertex_list(lw.tree_support)
    }


def paired_linkage_to_json(pl, g: Graph) -> dict:
    return {
        "graph_hash": graph_hash(g),
        "pairs": [
            {
                "sets": [vertex_list(x), vertex_list(y)],
                "trees": [_tree_json(tx), _tree_json(ty)],
                "paths": [list(path) for path in bundle]
            }
            for (x, y), (tx, ty), bundle in zip(pl.pairs, pl.trees, pl.bundles)
        ],
        "tree_support": vertex_list(pl.tree_support)
    }


def separation_to_json(sep, g: Graph) -> dict:
    return {
        "graph_hash": graph_hash(g),
        "a": vertex_list(sep.a_set),
        "b": vertex_list(sep.b_set),
        "order": sep.order,
        "pack": sep.pack_total,
        "split_node": sep.split_node,
        "split_kind": sep.split_kind,
        "pack_zero": sep.pack_zero
    }


def certificate_to_json(cert, g: Graph, h: Graph) -> dict:
    data = {
        "type": cert.kind.value,
        "k": cert.k,
        "host": graph_to_json(g),
        "pattern": graph_to_json(h),
        "treewidth": cert.treewidth,
        "bound": cert.bound
    }
    if cert.kind.value == "packing":
        data["models"] = [model_to_json(m) for m in cert.models]
    else:
        data["vertices"] = vertex_list(cert.cover)
        data["cover_size"] = cert.cover_size
    return data


def bound_to_json(value) -> dict:
    exact = value.exact
    if exact is not None and not isinstance(exact, int):
        exact = str(exact)
    return {"expression": value.expression, "exact": exact, "ceiling": value.ceiling}


def write_pace_td(g: Graph, t) -> str:
    """PACE format: 's td bags width+1 n', then 'b i v...' (1-based), then tree edges."""
    lines = [f"s td {len(t.bags)} {t.width + 1 if g.n else 0} {g.n}"]
    for i, bag in enumerate(t.bags, start=1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in bits(bag)]))
    lines.extend(f"{u + 1} {v + 1}" for u, v in t.tree.edges)
    return "\n".join(lines) + "\n"


def parse_pace_td(text: str):
    from width import TreeDecomposition

    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("c")]
    if not rows or rows[0][:2] != ["s", "td"]:
        raise ParameterError("missing 's td' header", clause="td")
    count = int(rows[0][2])
    bags = [0] * count
    edges = []
    for row in rows[1:]:
        if row[0] == "b":
            mask = 0
            for v in row[2:]:
                mask |= 1 << (int(v) - 1)
            bags[int(row[1]) - 1] = mask
        else:
            edges.append((int(row[0]) - 1, int(row[1]) - 1))
    return TreeDecomposition(Graph.from_edges(count, edges), tuple(bags))
