#
#  planted.py
#
#  Seeded instances with a known structure: meshes, bipartite multigraphs and (paired)
#  linkages. Vertex ids are shuffled at the end so nothing can rely on construction order.
#
from __future__ import annotations

import numpy as np

from errors import ParameterError
from graph_core import Graph, MultiGraph, bits, mask_of, random_ternary_tree
from structure import LinkageWitness, PairedLinkage
from width import MeshWitness


class _Builder:
    """Vertex allocator plus edge list; `finish` applies one random permutation to everything after it."""

    def __init__(self, rng):
        self.rng = rng
        self.n = 0
        self.edges = []

    def new(self, count: int = 1) -> list:
        start = self.n
        self.n += count
        return list(range(start, self.n))

    def chain(self, vertices):
        self.edges.extend(zip(vertices, vertices[1:]))
        return tuple(zip(vertices, vertices[1:]))

    def pendants(self, anchors, chance: float):
        for v in anchors:
            if self.rng.random() < chance:
                leaf = self.new()[0]
                self.edges.append((v, leaf))

    def finish(self):
        self.perm = [int(x) for x in self.rng.permutation(self.n)]
        return Graph.from_edges(self.n, ((self.perm[u], self.perm[v]) for u, v in self.edges))

    def mask(self, vertices) -> int:
        return mask_of(self.perm[v] for v in vertices)

    def edge_list(self, edges) -> tuple:
        return tuple((self.perm[u], self.perm[v]) for u, v in edges)

    def walk(self, vertices) -> tuple:
        return tuple(self.perm[v] for v in vertices)


def planted_mesh(p: int, q: int, seed: int, broken: bool = False) -> tuple[Graph, MeshWitness]:
    """A pq-mesh of order (2p-1)(2q+1): a path through X in A, spokes x_i - c_i and a clique on the c_i.

    With `broken`, one spoke is left out and external connectivity fails at that vertex.
    """
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive", clause="p")
    b = _Builder(np.random.default_rng(seed))
    s = (2 * p - 1) * (2 * q + 1)
    x = b.new(s)
    c = b.new(s)
    tree_edges = b.chain(x)
    missing = int(b.rng.integers(s)) if broken else None
    for i in range(s):
        if i != missing:
            b.edges.append((x[i], c[i]))
    b.edges.extend((c[i], c[j]) for i in range(s) for j in range(i + 1, s))
    g = b.finish()
    a_set = b.mask(x)
    witness = MeshWitness(a_set, g.full, a_set, b.edge_list(tree_edges), s, p * q)
    return g, witness


def planted_bipartite_multigraph(k: int, r: int, seed: int) -> tuple[MultiGraph, int]:
    """Balanced bipartite multigraph with multidegree 2kr² everywhere and degeneracy < 2kr.

    Left i meets right (i + j) mod N for d < 2kr offsets j, multiplicities a random composition of 2kr².
    Returns the multigraph and its left side.
    """
    if k < 1 or r < 1:
        raise ParameterError("k and r must be positive", clause="k")
    rng = np.random.default_rng(seed)
    side = 4 * k * k * r + int(rng.integers(0, 2 * k + 1))
    total = 2 * k * r * r
    d = int(rng.integers(1, min(2 * k * r - 1, total) + 1))
    cuts = sorted(int(x) for x in rng.choice(np.arange(1, total), size=d - 1, replace=False)) if d > 1 else []
    weights = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    offsets = sorted(int(x) for x in rng.choice(side, size=d, replace=False))
    perm = [int(x) for x in rng.permutation(2 * side)]
    edges = [(perm[i], perm[side + (i + j) % side], m) for i in range(side) for j, m in zip(offsets, weights)]
    return MultiGraph.from_edges(2 * side, edges), mask_of(perm[i] for i in range(side))


def planted_linkage(p: int, q: int, seed: int) -> tuple[Graph, LinkageWitness]:
    """4p²q left and 4p²q right terminal sets of size q; left i sends q paths to right sigma(i)."""
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive", clause="p")
    b = _Builder(np.random.default_rng(seed))
    half = 4 * p * p * q
    left = [b.new(q) for _ in range(half)]
    right = [b.new(q) for _ in range(half)]
    trees = [b.chain(t) for t in left + right]
    sigma = [int(x) for x in b.rng.permutation(half)]
    paths = []
    for i in range(half):
        for a, z in zip(left[i], right[sigma[i]]):
            middle = b.new(int(b.rng.integers(1, 3)))
            b.chain([a, *middle, z])
            b.pendants(middle, 0.3)
            paths.append([a, *middle, z])
    g = b.finish()
    sets = tuple(b.mask(t) for t in left + right)
    tree_pairs = tuple((b.mask(t), b.edge_list(e)) for t, e in zip(left + right, trees))
    support = mask_of(v for s in sets for v in bits(s))
    return g, LinkageWitness(sets, tree_pairs, tuple(b.walk(path) for path in paths), support)


def _branched_tree(b: _Builder, size: int):
    """A spine of `size` vertices, each carrying a random ternary subtree that holds one terminal.

    The terminal sits anywhere in its subtree, so the tree has non-terminal leaves and degree-2
    vertices around it. Returns (terminals, tree vertices, tree edges).
    """
    spine = b.new(size)
    edges = list(b.chain(spine))
    vertices = list(spine)
    terminals = []
    for v in spine:
        sub = random_ternary_tree(int(b.rng.integers(1, 6)), int(b.rng.integers(2 ** 31)))
        ids = b.new(sub.n)
        sub_edges = [(ids[u], ids[w]) for u, w in sub.edges]
        leaf = next(u for u in sub.vertices if sub.degree(u) <= 1)
        sub_edges.append((v, ids[leaf]))
        b.edges.extend(sub_edges)
        edges.extend(sub_edges)
        vertices.extend(ids)
        terminals.append(ids[int(b.rng.integers(sub.n))])
    return terminals, vertices, tuple(edges)


def planted_paired_linkage(k: int, r: int, seed: int, mode: str = "xi", reverse: bool = False,
                           shape: str = "path") -> tuple[Graph, PairedLinkage]:
    """k pairs of terminal trees joined by length-2 rungs.

    mode "xi": (r-1)² + 1 terminals per tree, rungs follow a random permutation (or its reversal
    when `reverse`); mode "k2r": r terminals per tree. shape "path": the terminals form a path with
    a few non-terminal pendants; shape "ternary": see _branched_tree.
    """
    if k < 1 or r < 1:
        raise ParameterError("k and r must be positive", clause="k")
    if mode not in ("xi", "k2r"):
        raise ParameterError(f"unknown mode {mode!r}", clause="mode")
    if shape not in ("path", "ternary"):
        raise ParameterError(f"unknown shape {shape!r}", clause="shape")
    b = _Builder(np.random.default_rng(seed))
    size = (r - 1) ** 2 + 1 if mode == "xi" else r
    layout = []
    for _ in range(k):
        if shape == "ternary":
            x, x_tree, x_edges = _branched_tree(b, size)
            y, y_tree, y_edges = _branched_tree(b, size)
        else:
            x = b.new(size)
            y = b.new(size)
            before = b.n
            b.pendants(x + y, 0.25)
            extras = list(range(before, b.n))
            x_edges = b.chain(x) + tuple((u, v) for u, v in b.edges if v in extras and u in x)
            y_edges = b.chain(y) + tuple((u, v) for u, v in b.edges if v in extras and u in y)
            x_tree = x + [v for u, v in x_edges if v in extras]
            y_tree = y + [v for u, v in y_edges if v in extras]
        order = list(range(size - 1, -1, -1)) if reverse else [int(i) for i in b.rng.permutation(size)]
        rungs = []
        for i in range(size):
            middle = b.new()[0]
            b.edges.extend([(x[i], middle), (middle, y[order[i]])])
            rungs.append((x[i], middle, y[order[i]]))
        layout.append((x, y, x_tree, y_tree, x_edges, y_edges, rungs))
    g = b.finish()

    pairs, trees, bundles = [], [], []
    for x, y, x_tree, y_tree, x_edges, y_edges, rungs in layout:
        pairs.append((b.mask(x), b.mask(y)))
        trees.append(((b.mask(x_tree), b.edge_list(x_edges)), (b.mask(y_tree), b.edge_list(y_edges))))
        bundles.append(tuple(b.walk(rung) for rung in rungs))
    support = mask_of(v for pair in trees for tree in pair for v in bits(tree[0]))
    return g, PairedLinkage(tuple(pairs), tuple(trees), tuple(bundles), support)
