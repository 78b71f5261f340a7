#
#  structure.py
#
#  Constructive auxiliary lemmas and the extraction pipelines
#  mesh -> linkage -> paired linkage -> disjoint Ξ_r / K_{2,r} models.
#
from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from errors import InvariantError, ParameterError, PreconditionError, WitnessInvalidError
from graph_core import (Graph, MultiGraph, bits, complete_bipartite, degeneracy, dense_minor, lowest,
                        mask_of, popcount, require_edges, xi)
from minors import MinorModel, compose_models, find_minor_model, verify_model
from util import CheckResult, log
from width import MeshWitness, external_paths, pathwidth_exact, verify_mesh


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def validate(self, g: Graph) -> CheckResult:
        seen = 0
        for i, part in enumerate(self.parts):
            if part & seen:
                return CheckResult.failed("disjointness", f"part {i} overlaps an earlier part")
            seen |= part
        if seen != g.full:
            return CheckResult.failed("cover", f"{list(bits(g.full & ~seen))} in no part")
        return CheckResult.passed()

    def part_of(self, v: int) -> int:
        for i, part in enumerate(self.parts):
            if part >> v & 1:
                return i
        raise KeyError(v)


@dataclass(frozen=True)
class MonotoneSubsequence:
    direction: str
    indices: tuple
    values: tuple

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class LinkageWitness:
    """terminal_sets[:half] are the left sets; trees[i] = (vertex mask, edges) connects terminal_sets[i];
    every path runs from a left set to a right set."""
    terminal_sets: tuple
    trees: tuple
    paths: tuple
    tree_support: int


@dataclass(frozen=True)
class PairedLinkage:
    """pairs[i] = (left set, right set), trees[i] = (left tree, right tree), bundles[i] = its paths."""
    pairs: tuple
    trees: tuple
    bundles: tuple
    tree_support: int


#region Trees
def _require_tree(t: Graph, ternary: bool = True):
    if not t.is_tree():
        raise PreconditionError("input is not a tree", clause="tree")
    if ternary and t.max_degree() > 3:
        raise PreconditionError(f"tree has a vertex of degree {t.max_degree()} > 3", clause="ternary")


def _rooted(t: Graph, root: int):
    parent = {root: None}
    order = [root]
    for v in order:
        for u in t.neighbors(v):
            if u not in parent:
                parent[u] = v
                order.append(u)
    return parent, order


def tree_path(t: Graph, a: int, b: int) -> list:
    parent, _ = _rooted(t, a)
    if b not in parent:
        raise PreconditionError(f"{a} and {b} are not connected", clause="path")
    walk = [b]
    while walk[-1] != a:
        walk.append(parent[walk[-1]])
    walk.reverse()
    return walk


def tree_cut(t: Graph, x: int, k: int) -> list:
    """Vertex-disjoint subtrees with at least k marked vertices each, at least |x|/(2k-1) - 1 of them.

    Rooted at a leaf every vertex has at most two children, so a greedily cut subtree holds at
    most 2k - 1 marked vertices.
    """
    if k < 1:
        raise ParameterError("k must be positive", clause="k")
    _require_tree(t)
    if x & ~t.full:
        raise PreconditionError("marked vertices outside the tree", clause="subset")
    root = min(t.vertices, key=lambda v: (t.degree(v), v))
    parent, order = _rooted(t, root)
    open_set = {}
    cuts = []
    for v in reversed(order):
        pending = 1 << v
        for u in t.neighbors(v):
            if parent.get(u) == v:
                pending |= open_set.pop(u, 0)
        if popcount(pending & x) >= k:
            cuts.append(pending)
        else:
            open_set[v] = pending
    return cuts


def path_partition(t: Graph, p: list) -> Partition:
    """Part of u: the component of t - (p - u) containing u."""
    _require_tree(t, ternary=False)
    if not p or len(set(p)) != len(p) or any(not 0 <= v < t.n for v in p):
        raise PreconditionError("not a path of the tree", clause="path")
    if any(not t.has_edge(a, b) for a, b in zip(p, p[1:])):
        raise PreconditionError("consecutive path vertices are not adjacent", clause="path")
    on_path = mask_of(p)
    parts = tuple(t.component_of(u, t.full & ~(on_path & ~(1 << u))) for u in p)
    return Partition(parts)


def low_degree_set(t: Graph) -> int:
    """X = vertices of tree degree at most 2."""
    return mask_of(v for v in t.vertices if t.degree(v) <= 2)


def long_path(t: Graph) -> list:
    """A longest path by double BFS."""
    if t.n == 0 or not t.is_tree():
        raise PreconditionError("long_path needs a nonempty tree", clause="tree")

    def farthest(start):
        parent, order = _rooted(t, start)
        return order[-1], parent

    a, _ = farthest(0)
    b, parent = farthest(a)
    walk = [b]
    while parent[walk[-1]] is not None:
        walk.append(parent[walk[-1]])
    return walk


def long_path_bound(t: Graph) -> float:
    """2 log2(2|X|/3), the length a longest path is guaranteed to reach."""
    return 2 * math.log2(2 * popcount(low_degree_set(t)) / 3)


@dataclass(frozen=True)
class NormalizedTree:
    """groups[v] is the set of original vertices contracted into v; rep[v] its terminal (or lowest vertex)."""
    tree: Graph
    groups: tuple
    rep: tuple


def normalize_terminal_tree(t: Graph, terminals: int) -> NormalizedTree:
    """Delete non-terminal leaves, then contract degree-2 non-terminals, until neither applies."""
    _require_tree(t, ternary=False)
    if not terminals & t.full:
        raise PreconditionError("no terminals in the tree", clause="terminals")
    adj = {v: set(t.neighbors(v)) for v in t.vertices}
    groups = {v: 1 << v for v in t.vertices}
    terminal = {v: bool(terminals >> v & 1) for v in t.vertices}
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if terminal[v] or v not in adj:
                continue
            if len(adj[v]) <= 1 and len(adj) > 1:
                for u in adj.pop(v):
                    adj[u].discard(v)
                del groups[v]
                changed = True
            elif len(adj[v]) == 2:
                u = min(adj[v])
                w = max(adj[v])
                adj[u].discard(v)
                adj[w].discard(v)
                adj[u].add(w)
                adj[w].add(u)
                del adj[v]
                groups[u] |= groups.pop(v)
                changed = True
    kept = sorted(adj)
    index = {v: i for i, v in enumerate(kept)}
    tree = Graph.from_edges(len(kept), {(min(index[a], index[b]), max(index[a], index[b]))
                                        for a in kept for b in adj[a]})
    rep = tuple(lowest(groups[v] & terminals) if groups[v] & terminals else v for v in kept)
    return NormalizedTree(tree, tuple(groups[v] for v in kept), rep)
#endregion


#region Degrees and partitions
def stiebitz_partition(g: Graph, k: int) -> Partition:
    """Local search: the first vertex (by id) with deg_in < deg/k - 1 moves to the part it has most
    neighbours in. Each move raises the number of internal edges, so at most |E| moves happen."""
    if k < 1:
        raise ParameterError("k must be positive", clause="k")
    parts = [0] * k
    for v in g.vertices:
        parts[v % k] |= 1 << v
    where = [v % k for v in g.vertices]
    moves = 0
    while True:
        violator = next((v for v in g.vertices
                         if k * g.degree_in(v, parts[where[v]]) < g.degree(v) - k), None)
        if violator is None:
            break
        target = max(range(k), key=lambda i: (g.degree_in(violator, parts[i]), -i))
        parts[where[violator]] &= ~(1 << violator)
        parts[target] |= 1 << violator
        where[violator] = target
        moves += 1
        if moves > g.m:
            raise InvariantError("internal edge count failed to increase", clause="potential")
    log(f"partition into {k} parts after {moves} moves", 1)
    return Partition(tuple(parts))


def partition_violations(g: Graph, partition: Partition, k: int) -> list:
    """Vertices with internal degree below deg/k - 1."""
    bad = []
    for part in partition.parts:
        for v in bits(part):
            if k * g.degree_in(v, part) < g.degree(v) - k:
                bad.append(v)
    return bad


def low_degree_vertices(g: Graph, a: int) -> int:
    """Vertices of degree < 2a·dgn(g); there are more than (1 - 1/a)·n of them."""
    if a < 1:
        raise ParameterError("a must be positive", clause="a")
    require_edges(g, "low_degree_vertices")
    threshold = 2 * a * degeneracy(g).value
    return mask_of(v for v in g.vertices if g.degree(v) < threshold)
#endregion


#region Sequences
def _longest_increasing(seq) -> list:
    """Patience sorting with back-pointers; returns indices."""
    tails = []
    tail_index = []
    previous = [None] * len(seq)
    for i, value in enumerate(seq):
        pos = bisect_left(tails, value)
        if pos == len(tails):
            tails.append(value)
            tail_index.append(i)
        else:
            tails[pos] = value
            tail_index[pos] = i
        previous[i] = tail_index[pos - 1] if pos else None
    walk = []
    i = tail_index[-1] if tail_index else None
    while i is not None:
        walk.append(i)
        i = previous[i]
    walk.reverse()
    return walk


def erdos_szekeres(seq, k: int, l: int) -> MonotoneSubsequence:
    """Increasing subsequence of length k, else decreasing of length l."""
    if k < 1 or l < 1:
        raise ParameterError("k and l must be positive", clause="k")
    seq = list(seq)
    if len(set(seq)) != len(seq):
        raise PreconditionError("entries must be distinct", clause="distinct")
    needed = (l - 1) * (k - 1) + 1
    if len(seq) < needed:
        raise PreconditionError(f"need {needed} entries, got {len(seq)}", clause="length")

    up = _longest_increasing(seq)
    if len(up) >= k:
        chosen = up[:k]
        return MonotoneSubsequence("increasing", tuple(chosen), tuple(seq[i] for i in chosen))
    down = _longest_increasing([-v for v in seq])
    # guaranteed by the length check
    chosen = down[:l]
    return MonotoneSubsequence("decreasing", tuple(chosen), tuple(seq[i] for i in chosen))
#endregion


#region Multigraphs
def _two_coloring(b: MultiGraph) -> int:
    g = b.underlying()
    left = 0
    color = {}
    for start in g.vertices:
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u not in color:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    raise PreconditionError("multigraph is not bipartite", clause="bipartite")
    for v, c in color.items():
        if c == 0:
            left |= 1 << v
    return left


def heavy_selection(candidates, heaviest, k: int) -> list:
    """Map each candidate to its heaviest partner (None if too light) and keep k pairs with distinct partners."""
    chosen = []
    used = set()
    for v in candidates:
        u = heaviest(v)
        if u is None or u in used:
            continue
        used.add(u)
        chosen.append((v, u))
        if len(chosen) == k:
            break
    return chosen


def disjoint_multiedges(b: MultiGraph, k: int, r: int, left: int | None = None) -> list:
    """k vertex-disjoint multiedges of multiplicity >= r in a balanced bipartite multigraph.

    Low-degree vertices L on the richer side each have a partner of multiplicity >= r (the
    multidegree is spread over fewer than 2kr neighbours); a partner takes at most 2kr of them,
    so L hits at least k distinct partners.
    """
    if k < 1 or r < 1:
        raise ParameterError("k and r must be positive", clause="k")
    left = _two_coloring(b) if left is None else left
    full = (1 << b.n) - 1
    right = full & ~left
    if any(not ((left >> u & 1) ^ (left >> v & 1)) for (u, v), _ in b.mult):
        raise PreconditionError("an edge stays inside one side", clause="bipartite")
    if popcount(left) != popcount(right):
        raise PreconditionError("sides differ in size", clause="sides")
    if popcount(left) < 4 * k * k * r:
        raise PreconditionError(f"sides need at least {4 * k * k * r} vertices", clause="side size")
    target = 2 * k * r * r
    multidegree = [0] * b.n
    for (u, v), m in b.mult:
        multidegree[u] += m
        multidegree[v] += m
    if any(d != target for d in multidegree):
        raise PreconditionError(f"every multidegree must be {target}", clause="multidegree")
    simple = b.underlying()
    if degeneracy(simple).value >= 2 * k * r:
        raise PreconditionError(f"degeneracy must stay below {2 * k * r}", clause="degeneracy")

    threshold = 2 * k * r
    low = [mask_of(v for v in bits(side) if simple.degree(v) < threshold) for side in (left, right)]
    side = 0 if popcount(low[0]) >= popcount(low[1]) else 1
    chosen_side = low[side]
    L = list(bits(chosen_side))[:2 * k * k * r]
    weights = {}
    for (u, v), m in b.mult:
        weights.setdefault(u, []).append((m, v))
        weights.setdefault(v, []).append((m, u))

    def heaviest(v):
        best = max(weights.get(v, []), key=lambda item: (item[0], -item[1]), default=None)
        return best[1] if best and best[0] >= r else None

    chosen = heavy_selection(L, heaviest, k)
    if len(chosen) < k:
        raise PreconditionError(f"only {len(chosen)} disjoint heavy multiedges", clause="multiedges")
    return [(min(u, v), max(u, v)) for v, u in chosen]
#endregion


#region K_{2,r} and Ξ_r extraction
def extract_k2r_from_degeneracy(g: Graph, k: int, r: int) -> list:
    """Minor of min degree >= 2kr, split into k parts of min degree >= 2r - 1, one K_{2,r} per part."""
    if k < 1 or r < 1:
        raise ParameterError("k and r must be positive", clause="k")
    found = dense_minor(g, 2 * k * r)
    if found is None:
        raise PreconditionError(f"contraction degeneracy below {2 * k * r}", clause="contraction degeneracy")
    minor, branch = found
    outer = MinorModel(minor, g, branch)
    pattern = complete_bipartite(2, r)
    partition = stiebitz_partition(minor, k)

    inner = []
    for part in partition.parts:
        model = find_minor_model(minor, pattern, allowed=part) if part else None
        if model is None:
            break
        inner.append(model)
    if len(inner) < k:
        log("a part came out without K_{2,r}, falling back to greedy disjoint search", 3)
        inner = []
        remaining = minor.full
        while len(inner) < k:
            model = find_minor_model(minor, pattern, allowed=remaining)
            if model is None:
                raise PreconditionError("could not find k disjoint K_{2,r} models", clause="extraction")
            inner.append(model)
            remaining &= ~model.support
    models = [compose_models(m, outer) for m in inner]
    for m in models:
        result = verify_model(m)
        if not result:
            raise WitnessInvalidError(f"lifted K_{{2,{r}}} model fails: {result.clause}", clause=result.clause)
    return models


def check_pw2_minor_of_xi(h: Graph) -> MinorModel:
    if h.n == 0:
        raise PreconditionError("pattern has no vertices", clause="nonempty")
    width, _ = pathwidth_exact(h)
    if width > 2:
        raise PreconditionError(f"pathwidth {width} > 2", clause="pathwidth")
    model = find_minor_model(xi(h.n), h)
    if model is None:
        raise WitnessInvalidError(f"no model of the pattern in Ξ_{h.n}", clause="xi embedding")
    return model
#endregion


#region Linkages
def _tree_ok(g: Graph, vertices: int, edges) -> bool:
    if not vertices or len(edges) != popcount(vertices) - 1:
        return False
    for u, v in edges:
        if not g.has_edge(u, v) or not (vertices >> u & 1 and vertices >> v & 1):
            return False
    return Graph.from_edges(g.n, edges).is_connected(vertices)


def _check_paths(g: Graph, paths, left_of, right_of, terminals: int, support: int) -> CheckResult:
    used = 0
    for path in paths:
        if len(path) < 3:
            return CheckResult.failed("path length", f"path {list(path)} has fewer than 2 edges")
        if any(not g.has_edge(a, b) for a, b in zip(path, path[1:])):
            return CheckResult.failed("path edges", f"path {list(path)} leaves the graph")
        if not (left_of(path[0]) and right_of(path[-1])):
            return CheckResult.failed("path endpoints", f"path {list(path)} does not join its sets")
        interior = mask_of(path[1:-1])
        if interior & (terminals | support):
            return CheckResult.failed("path interior", f"path {list(path)} runs through terminals or trees")
        vertices = mask_of(path)
        if vertices & used or popcount(vertices) != len(path):
            return CheckResult.failed("path disjointness", f"path {list(path)} meets another path")
        used |= vertices
    return CheckResult.passed()


def _check_trees(g: Graph, sets, trees, support: int) -> CheckResult:
    seen = 0
    for i, (x, (vertices, edges)) in enumerate(zip(sets, trees)):
        if not _tree_ok(g, vertices, edges) or x & ~vertices or vertices & ~support:
            return CheckResult.failed("tree", f"tree {i} does not connect its set inside the support")
        if vertices & seen:
            return CheckResult.failed("tree disjointness", f"tree {i} meets an earlier tree")
        seen |= vertices
    return CheckResult.passed()


def verify_linkage(g: Graph, lw: LinkageWitness, size: int) -> CheckResult:
    sets = lw.terminal_sets
    if len(sets) % 2 or len(lw.trees) != len(sets):
        return CheckResult.failed("terminal count", "need an even number of sets, one tree each")
    if any(popcount(x) != size for x in sets):
        return CheckResult.failed("terminal size", f"every terminal set must have {size} vertices")
    result = _check_trees(g, sets, lw.trees, lw.tree_support)
    if not result:
        return result
    half = len(sets) // 2
    left = mask_of(v for x in sets[:half] for v in bits(x))
    right = mask_of(v for x in sets[half:] for v in bits(x))
    return _check_paths(g, lw.paths, lambda v: left >> v & 1, lambda v: right >> v & 1,
                        left | right, lw.tree_support)


def verify_paired_linkage(g: Graph, pl: PairedLinkage) -> CheckResult:
    sets = [x for pair in pl.pairs for x in pair]
    trees = [t for pair in pl.trees for t in pair]
    result = _check_trees(g, sets, trees, pl.tree_support)
    if not result:
        return result
    terminals = mask_of(v for x in sets for v in bits(x))
    for (x, y), bundle in zip(pl.pairs, pl.bundles):
        if not bundle:
            return CheckResult.failed("bundle", "a pair has no connecting paths")
        result = _check_paths(g, bundle, lambda v: x >> v & 1, lambda v: y >> v & 1, terminals, pl.tree_support)
        if not result:
            return result
    every = [p for bundle in pl.bundles for p in bundle]
    return _check_paths(g, every, lambda v: True, lambda v: True, terminals, pl.tree_support)


def _trim_path(path, sources: int, sinks: int) -> list:
    """Shortest stretch of path from its last source to the next sink."""
    start = max(i for i, v in enumerate(path) if sources >> v & 1)
    end = next(i for i in range(start, len(path)) if sinks >> path[i] & 1)
    return list(path[start:end + 1])


def mesh_to_linkage(g: Graph, w: MeshWitness, p: int, q: int) -> LinkageWitness:
    """Cut the mesh tree into 2q subtrees with p boundary vertices each, then route pq external paths."""
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive", clause="p")
    check = verify_mesh(g, w)
    if not check:
        raise WitnessInvalidError(f"mesh witness fails: {check.clause} ({check.detail})", clause=check.clause)
    if w.s < (2 * p - 1) * (2 * q + 1) or w.k < p * q:
        raise PreconditionError("mesh order or connectivity too small for p, q", clause="mesh parameters")

    x = w.boundary
    tree, old = Graph.from_edges(g.n, w.tree_edges).induced(w.tree_vertices)
    local_x = mask_of(i for i, v in enumerate(old) if x >> v & 1)
    cuts = tree_cut(tree, local_x, p)[:2 * q]
    if len(cuts) < 2 * q:
        raise WitnessInvalidError(f"tree cut gave {len(cuts)} subtrees, need {2 * q}", clause="tree cut")

    sets, trees = [], []
    for cut in cuts:
        vertices = mask_of(old[i] for i in bits(cut))
        marked = [old[i] for i in bits(cut & local_x)][:p]
        edges = tuple((u, v) for u, v in w.tree_edges if vertices >> u & 1 and vertices >> v & 1)
        sets.append(mask_of(marked))
        trees.append((vertices, edges))
    z1 = mask_of(v for s in sets[:q] for v in bits(s))
    z2 = mask_of(v for s in sets[q:] for v in bits(s))
    routed = external_paths(g, x, w.b_set, z1, z2)
    if len(routed) < p * q:
        raise WitnessInvalidError(f"only {len(routed)} external paths, need {p * q}", clause="external connectivity")
    paths = tuple(tuple(_trim_path(path, z1, z2)) for path in routed)
    linkage = LinkageWitness(tuple(sets), tuple(trees), paths, w.a_set)
    result = verify_linkage(g, linkage, p)
    if not result:
        raise WitnessInvalidError(f"routed linkage fails: {result.clause}", clause=result.clause)
    return linkage


def auxiliary_multigraph(lw: LinkageWitness) -> MultiGraph:
    """One vertex per terminal set; multiplicity = number of paths between two sets."""
    owner = {}
    for i, x in enumerate(lw.terminal_sets):
        for v in bits(x):
            owner[v] = i
    return MultiGraph.from_edges(len(lw.terminal_sets), ((owner[p[0]], owner[p[-1]]) for p in lw.paths))


def linkage_to_pairs(g: Graph, lw: LinkageWitness, p: int, q: int) -> PairedLinkage:
    """Pick p disjoint heavy multiedges of the auxiliary multigraph; each becomes a pair with q paths."""
    if p < 1 or q < 1:
        raise ParameterError("p and q must be positive", clause="p")
    check = verify_linkage(g, lw, q)
    if not check:
        raise PreconditionError(f"linkage fails: {check.clause} ({check.detail})", clause=check.clause)
    aux = auxiliary_multigraph(lw)
    if degeneracy(aux.underlying()).value >= 2 * p * q:
        raise PreconditionError(f"auxiliary multigraph degeneracy reaches {2 * p * q}", clause="degeneracy")

    half = len(lw.terminal_sets) // 2
    weights = {}
    for (u, v), m in aux.mult:
        weights.setdefault(u, []).append((m, v))

    def heaviest(i):
        best = max(weights.get(i, []), key=lambda item: (item[0], -item[1]), default=None)
        return best[1] if best and best[0] >= q else None

    chosen = heavy_selection(range(half), heaviest, p)
    if len(chosen) < p:
        raise PreconditionError(f"only {len(chosen)} disjoint multiedges of multiplicity {q}", clause="multiedges")

    pairs, trees, bundles = [], [], []
    for i, j in chosen:
        x, y = lw.terminal_sets[i], lw.terminal_sets[j]
        bundle = [path for path in lw.paths if x >> path[0] & 1 and y >> path[-1] & 1][:q]
        pairs.append((x, y))
        trees.append((lw.trees[i], lw.trees[j]))
        bundles.append(tuple(bundle))
    log(f"paired {p} terminal sets out of {half}", 1)
    return PairedLinkage(tuple(pairs), tuple(trees), tuple(bundles), lw.tree_support)


def _tree_graph(g: Graph, tree) -> Graph:
    return Graph.from_edges(g.n, tree[1])


def _terminal_parts(t: Graph, vertices: int, walk: list, terminals: int) -> list:
    """(path vertex, part, terminal) for the parts of walk's path partition that hold a terminal."""
    local, old = t.induced(vertices)
    index = {v: i for i, v in enumerate(old)}
    partition = path_partition(local, [index[v] for v in walk])
    rows = []
    for u, part in zip(walk, partition.parts):
        members = mask_of(old[i] for i in bits(part))
        if members & terminals:
            rows.append((u, members, lowest(members & terminals)))
    return rows


def _best_terminal_path(t: Graph, vertices: int, terminals: int) -> list:
    """Tree path whose partition has the most terminal-holding parts.

    First candidate: a longest path of the normalised tree; then every terminal-to-terminal path.
    """
    local, old = t.induced(vertices)
    index = {v: i for i, v in enumerate(old)}
    local_terminals = mask_of(index[v] for v in bits(terminals & vertices))
    normalized = normalize_terminal_tree(local, local_terminals)
    ends = long_path(normalized.tree)
    first = tree_path(local, normalized.rep[ends[0]], normalized.rep[ends[-1]])
    best = [old[i] for i in first]
    best_count = len(_terminal_parts(t, vertices, best, terminals))
    members = list(bits(local_terminals))
    for a_pos, a in enumerate(members):
        for b in members[a_pos:]:
            walk = [old[i] for i in tree_path(local, a, b)]
            count = len(_terminal_parts(t, vertices, walk, terminals))
            if count > best_count:
                best, best_count = walk, count
    return best


def _row_branch_sets(walk: list, rows: list, chosen_vertices: list) -> list:
    """Cut walk into consecutive segments, one per chosen path vertex, each with the parts of its vertices."""
    position = {u: i for i, u in enumerate(walk)}
    chosen_positions = sorted(position[u] for u in chosen_vertices)
    part_of = {u: members for u, members, _ in rows}
    cuts = [0] + [(a + b) // 2 + 1 for a, b in zip(chosen_positions, chosen_positions[1:])] + [len(walk)]
    segments = []
    for start, end in zip(cuts, cuts[1:]):
        mask = 0
        for u in walk[start:end]:
            mask |= part_of.get(u, 1 << u)
        segments.append(mask)
    return segments


def pairs_to_xi_models(g: Graph, pl: PairedLinkage, r: int, k: int) -> list:
    """Per pair: terminal paths P_i, P_j; Erdős–Szekeres on partner positions picks r rungs in monotone order."""
    if r < 1 or k < 1:
        raise ParameterError("r and k must be positive", clause="r")
    check = verify_paired_linkage(g, pl)
    if not check:
        raise PreconditionError(f"paired linkage fails: {check.clause} ({check.detail})", clause=check.clause)
    if len(pl.pairs) < k:
        raise PreconditionError(f"{len(pl.pairs)} pairs for {k} models", clause="pairs")
    needed = (r - 1) ** 2 + 1
    pattern = xi(r)
    models = []
    for (x, y), (tx, ty), bundle in list(zip(pl.pairs, pl.trees, pl.bundles))[:k]:
        rung = {path[0]: path for path in bundle}
        ends_x = mask_of(rung)
        tree_x = _tree_graph(g, tx)
        walk_x = _best_terminal_path(tree_x, tx[0], ends_x)
        rows_x = _terminal_parts(tree_x, tx[0], walk_x, ends_x)

        partners = mask_of(rung[t][-1] for _, _, t in rows_x)
        tree_y = _tree_graph(g, ty)
        walk_y = _best_terminal_path(tree_y, ty[0], partners)
        rows_y = _terminal_parts(tree_y, ty[0], walk_y, partners)
        slot = {t: i for i, (_, _, t) in enumerate(rows_y)}
        usable = [(u, t) for u, _, t in rows_x if rung[t][-1] in slot]
        if len(usable) < needed:
            raise PreconditionError(f"{len(usable)} ordered terminals, need {needed}", clause="ordered terminals")

        usable = usable[:needed]
        order = erdos_szekeres([slot[rung[t][-1]] for _, t in usable], r, r)
        picked = [usable[i] for i in order.indices]
        picked_rungs = [rung[t] for _, t in picked]
        by_vertex_y = {t: u for u, _, t in rows_y}
        x_sets = _row_branch_sets(walk_x, rows_x, [u for u, _ in picked])
        y_sets = [mask_of(path[1:-1]) for path in picked_rungs]
        z_sets = _row_branch_sets(walk_y, rows_y, [by_vertex_y[path[-1]] for path in picked_rungs])
        if order.direction == "decreasing":
            z_sets.reverse()
        model = MinorModel(pattern, g, tuple(x_sets + y_sets + z_sets))
        result = verify_model(model)
        if not result:
            raise WitnessInvalidError(f"assembled Ξ_{r} model fails: {result.clause}", clause=result.clause)
        models.append(model)
    return models


def pairs_to_k2r_models(g: Graph, pl: PairedLinkage, r: int, k: int) -> list:
    """Each pair's trees become the two hubs, r path interiors the middle vertices."""
    if r < 1 or k < 1:
        raise ParameterError("r and k must be positive", clause="r")
    check = verify_paired_linkage(g, pl)
    if not check:
        raise PreconditionError(f"paired linkage fails: {check.clause} ({check.detail})", clause=check.clause)
    if len(pl.pairs) < k:
        raise PreconditionError(f"{len(pl.pairs)} pairs for {k} models", clause="pairs")
    pattern = complete_bipartite(2, r)
    models = []
    for (tx, ty), bundle in list(zip(pl.trees, pl.bundles))[:k]:
        if len(bundle) < r:
            raise PreconditionError(f"a pair has {len(bundle)} paths, need {r}", clause="bundle")
        if any(len(path) < 3 for path in bundle[:r]):
            raise PreconditionError("a connecting path has length < 2", clause="path length")
        middles = [mask_of(path[1:-1]) for path in bundle[:r]]
        model = MinorModel(pattern, g, (tx[0], ty[0], *middles))
        result = verify_model(model)
        if not result:
            raise WitnessInvalidError(f"assembled K_{{2,{r}}} model fails: {result.clause}", clause=result.clause)
        models.append(model)
    return models
#endregion


#region Thresholds
def mesh_plus_threshold(p: int, q: int) -> int:
    return 20 * p * p * q * q - 8 * p * p * q + 2 * q - 1


@dataclass(frozen=True)
class Th1Constants:
    k0: float
    r0: float
    ordered_terminals: int
    identity_holds: bool


def th1_constants(k: int, r: int) -> Th1Constants:
    """k0 = k·sqrt(log2 2k), r0 = 3·2^{r(r-2)/2}; checks 2·log2(2r0/3) = (r-1)² + 1 exactly."""
    if k < 1 or r < 1:
        raise ParameterError("k and r must be positive", clause="k")
    k0 = k * math.sqrt(math.log2(2 * k))
    twice_exponent = r * (r - 2)
    # 2r0/3 = 2^{1 + r(r-2)/2}, so 2·log2(2r0/3) = 2 + r(r-2) exactly
    doubled_log = 2 + twice_exponent
    r0 = 3 * 2 ** (twice_exponent // 2) if twice_exponent % 2 == 0 else 3 * 2 ** (twice_exponent / 2)
    identity = Fraction(doubled_log) == (r - 1) ** 2 + 1
    return Th1Constants(k0, r0, (r - 1) ** 2 + 1, identity)
#endregion
