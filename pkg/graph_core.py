#
#  graph_core.py
#
#  Immutable simple graphs and multigraphs on dense integer ids, generators,
#  contractions and (contraction) degeneracy.
#
#  Vertex sets are plain ints used as bitsets over 0..n-1.
#
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx
import numpy as np

from errors import MissingEdgeError, ParameterError, PreconditionError
from util import CheckResult, check_limit, log


VertexSet = int


#region Bitsets
def bits(mask: int) -> Iterator[int]:
    """Members of a bitset in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1
#endregion


@dataclass(frozen=True)
class Graph:
    """Finite simple graph on vertices 0..n-1, stored as neighbourhood bitsets."""
    n: int
    adj: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ParameterError(f"adjacency has {len(self.adj)} rows for n = {self.n}")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise ParameterError(f"loop at vertex {v}", clause="no loops")
            if row & ~full:
                raise ParameterError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            for u in bits(row):
                if not self.adj[u] >> v & 1:
                    raise ParameterError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        if n < 0:
            raise ParameterError("vertex count must be non-negative")
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ParameterError(f"loop at vertex {u}", clause="no loops")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge {u}-{v} has an endpoint outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> tuple[Graph, list]:
        """Relabels nodes in sorted order; also returns the node list (new id -> old node)."""
        nodes = sorted(graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        edges = [(index[a], index[b]) for a, b in graph.edges() if a != b]
        return cls.from_edges(len(nodes), edges), nodes

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def edges(self) -> tuple:
        return tuple((u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1)))

    @property
    def m(self) -> int:
        return sum(popcount(row) for row in self.adj) // 2

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def degrees(self) -> list:
        return [popcount(row) for row in self.adj]

    def neighbors(self, v: int) -> list:
        return list(bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and 0 <= v < self.n and bool(self.adj[u] >> v & 1)

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def degree_in(self, v: int, mask: int) -> int:
        return popcount(self.adj[v] & mask)

    def neighborhood(self, mask: int) -> int:
        """Open neighbourhood of a vertex set."""
        result = 0
        for v in bits(mask):
            result |= self.adj[v]
        return result & ~mask

    def edges_within(self, mask: int) -> int:
        return sum(popcount(self.adj[v] & mask) for v in bits(mask)) // 2

    def component_of(self, v: int, mask: int | None = None) -> int:
        allowed = self.full if mask is None else mask
        seen = 1 << v
        frontier = seen
        while frontier:
            reach = 0
            for u in bits(frontier):
                reach |= self.adj[u]
            frontier = reach & allowed & ~seen
            seen |= frontier
        return seen

    def components(self, mask: int | None = None) -> list:
        remaining = self.full if mask is None else mask
        parts = []
        while remaining:
            part = self.component_of(lowest(remaining), remaining)
            parts.append(part)
            remaining &= ~part
        return parts

    def is_connected(self, mask: int | None = None) -> bool:
        mask = self.full if mask is None else mask
        if not mask:
            return True
        return self.component_of(lowest(mask), mask) == mask

    def is_tree(self) -> bool:
        return self.n >= 1 and self.m == self.n - 1 and self.is_connected()

    def induced(self, mask: int) -> tuple[Graph, tuple]:
        """G[mask] relabelled densely; second value maps new id -> old id."""
        old = tuple(bits(mask))
        index = {v: i for i, v in enumerate(old)}
        rows = []
        for v in old:
            rows.append(mask_of(index[u] for u in bits(self.adj[v] & mask)))
        return Graph(len(old), tuple(rows)), old

    def delete_vertices(self, mask: int) -> tuple[Graph, tuple]:
        return self.induced(self.full & ~mask)

    def permuted(self, perm: Sequence[int]) -> Graph:
        """Vertex v becomes perm[v]."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def disjoint_union(self, other: Graph) -> Graph:
        shift = self.n
        edges = list(self.edges) + [(u + shift, v + shift) for u, v in other.edges]
        return Graph.from_edges(self.n + other.n, edges)

    def with_edges(self, edges: Iterable[Sequence[int]]) -> Graph:
        return Graph.from_edges(self.n, list(self.edges) + list(edges))


def graph_hash(g: Graph) -> str:
    text = f"{g.n}:" + ";".join(f"{u},{v}" for u, v in g.edges)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MultiGraph:
    """Loopless multigraph; `mult` is a sorted tuple of ((u, v), multiplicity) with u < v."""
    n: int
    mult: tuple

    def __post_init__(self):
        for (u, v), m in self.mult:
            if u == v:
                raise ParameterError(f"loop at vertex {u}", clause="no loops")
            if not (0 <= u < v < self.n):
                raise ParameterError(f"multiedge {u}-{v} is not normalised or out of range")
            if m < 1:
                raise ParameterError(f"multiedge {u}-{v} has multiplicity {m}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> MultiGraph:
        """Accepts (u, v) pairs (each adds one) or (u, v, m) triples."""
        counts = {}
        for edge in edges:
            u, v = edge[0], edge[1]
            m = edge[2] if len(edge) > 2 else 1
            key = (min(u, v), max(u, v))
            counts[key] = counts.get(key, 0) + m
        return cls(n, tuple(sorted(counts.items())))

    def multiplicity(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        for edge, m in self.mult:
            if edge == key:
                return m
        return 0

    def multidegree(self, v: int) -> int:
        return sum(m for (a, b), m in self.mult if v in (a, b))

    def underlying(self) -> Graph:
        return Graph.from_edges(self.n, (edge for edge, _ in self.mult))


#region Generators
def complete(n: int) -> Graph:
    _positive(n=n)
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite(p: int, q: int) -> Graph:
    _positive(p=p, q=q)
    return Graph.from_edges(p + q, ((u, p + v) for u in range(p) for v in range(q)))


def xi(r: int) -> Graph:
    """Two r-vertex rows x_i = i and z_i = 2r + i joined by rungs through y_i = r + i."""
    _positive(r=r)
    edges = []
    for i in range(r - 1):
        edges.append((i, i + 1))
        edges.append((2 * r + i, 2 * r + i + 1))
    for i in range(r):
        edges.append((i, r + i))
        edges.append((r + i, 2 * r + i))
    return Graph.from_edges(3 * r, edges)


def cycle(n: int) -> Graph:
    if n < 3:
        raise ParameterError(f"a cycle needs at least 3 vertices, got {n}", clause="n")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    _positive(n=n)
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star(n: int) -> Graph:
    """K_{1,n}: center 0 and leaves 1..n."""
    _positive(n=n)
    return Graph.from_edges(n + 1, ((0, i) for i in range(1, n + 1)))


def grid(p: int, q: int) -> Graph:
    _positive(p=p, q=q)
    edges = []
    for i in range(p):
        for j in range(q):
            if i + 1 < p:
                edges.append((i * q + j, (i + 1) * q + j))
            if j + 1 < q:
                edges.append((i * q + j, i * q + j + 1))
    return Graph.from_edges(p * q, edges)


def complete_ternary(h: int) -> Graph:
    """Root of degree 3, every other internal vertex has two children, all leaves at depth h."""
    _positive(h=h)
    edges = []
    level = [0]
    count = 1
    for depth in range(h):
        children_per = 3 if depth == 0 else 2
        next_level = []
        for parent in level:
            for _ in range(children_per):
                edges.append((parent, count))
                next_level.append(count)
                count += 1
        level = next_level
    return Graph.from_edges(count, edges)


def disjoint_copies(k: int, base: Graph) -> Graph:
    _positive(k=k)
    result = Graph.empty(0)
    for _ in range(k):
        result = result.disjoint_union(base)
    return result


def random_gnp(n: int, p: float, seed: int) -> Graph:
    _positive(n=n)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"edge probability {p} is outside [0, 1]", clause="p")
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_ternary_tree(n: int, seed: int) -> Graph:
    _positive(n=n)
    rng = np.random.default_rng(seed)
    degree = [0] * n
    edges = []
    for v in range(1, n):
        candidates = [u for u in range(v) if degree[u] < 3]
        parent = candidates[int(rng.integers(len(candidates)))]
        edges.append((parent, v))
        degree[parent] += 1
        degree[v] += 1
    return Graph.from_edges(n, edges)


def random_pw2(n: int, seed: int):
    """Graph of pathwidth <= 2 with the path decomposition it was grown from.

    Vertices arrive in id order; each one is joined to a random subset of the current
    window (at most 2 earlier vertices), the window plus the newcomer is emitted as a bag,
    then one old vertex leaves the window for good.
    """
    from width import TreeDecomposition

    _positive(n=n)
    rng = np.random.default_rng(seed)
    window = []
    edges = []
    bags = []
    for v in range(n):
        for u in window:
            if rng.random() < 0.5:
                edges.append((u, v))
        bag = window + [v]
        bags.append(mask_of(bag))
        if len(bag) == 3:
            drop = int(rng.integers(2))
            bag.pop(drop)
        window = bag
    graph = Graph.from_edges(n, edges)
    tree = path(len(bags))
    return graph, TreeDecomposition(tree, tuple(bags))


def random_permutation(n: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    return [int(x) for x in rng.permutation(n)]


FAMILIES = {
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "xi": xi,
    "cycle": cycle,
    "path": path,
    "star": star,
    "grid": grid,
    "complete_ternary": complete_ternary,
    "disjoint_copies": disjoint_copies,
    "random_gnp": random_gnp,
    "random_ternary_tree": random_ternary_tree,
    "random_pw2": lambda n, seed: random_pw2(n, seed)[0],
}


def generate(family: str, *params) -> Graph:
    """generate("xi", 5), generate("disjoint_copies", 3, complete(3)), generate("random_gnp", 10, 0.3, 7)"""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ParameterError(f"unknown graph family {family!r}", clause="family") from None
    try:
        return builder(*params)
    except TypeError as e:
        raise ParameterError(f"bad parameters for {family}: {e}", clause="family") from None


def parse_family(text: str) -> Graph:
    """Parses "complete_bipartite 2 3", "xi 4", "disjoint_copies 2 complete_bipartite 2 3"."""
    words = text.replace(",", " ").split()
    if not words:
        raise ParameterError("empty family description", clause="family")
    family = words[0]
    if family == "disjoint_copies":
        if len(words) < 3:
            raise ParameterError("disjoint_copies needs a count and a base family", clause="family")
        return disjoint_copies(_int(words[1]), parse_family(" ".join(words[2:])))
    params = []
    for word in words[1:]:
        params.append(float(word) if "." in word else _int(word))
    return generate(family, *params)


def _int(word: str) -> int:
    try:
        return int(word)
    except ValueError:
        raise ParameterError(f"expected an integer, got {word!r}", clause="family") from None


def _positive(**params):
    for name, value in params.items():
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise ParameterError(f"parameter {name} must be a positive integer, got {value!r}", clause=name)
#endregion


#region Contractions
def contract_edge_mapped(g: Graph, e: Sequence[int]) -> tuple[Graph, tuple]:
    """Contract e; the merged vertex keeps the smaller id, later ids shift down by one.

    Second value maps every old vertex to its new id.
    """
    u, v = sorted(e)
    if not g.has_edge(u, v):
        raise MissingEdgeError(f"{u}-{v} is not an edge", clause="edge")
    mapping = tuple(w if w < v else (u if w == v else w - 1) for w in range(g.n))
    edges = set()
    for a, b in g.edges:
        x, y = mapping[a], mapping[b]
        if x != y:
            edges.add((min(x, y), max(x, y)))
    return Graph.from_edges(g.n - 1, edges), mapping


def contract_edge(g: Graph, e: Sequence[int]) -> Graph:
    return contract_edge_mapped(g, e)[0]
#endregion


#region Degeneracy
@dataclass(frozen=True)
class DegeneracyWitness:
    """`elimination_order[core_start:]` induces the subgraph whose min degree equals `value`."""
    value: int
    elimination_order: tuple
    core_start: int

    def validate(self, g: Graph) -> CheckResult:
        if sorted(self.elimination_order) != list(range(g.n)):
            return CheckResult.failed("order", "elimination order is not a permutation")
        position = {v: i for i, v in enumerate(self.elimination_order)}
        for v in self.elimination_order:
            later = sum(1 for u in g.neighbors(v) if position[u] > position[v])
            if later > self.value:
                return CheckResult.failed("later neighbours", f"vertex {v} has {later} > {self.value}")
        if g.n:
            core = mask_of(self.elimination_order[self.core_start:])
            core_min = min(g.degree_in(v, core) for v in bits(core))
            if core_min != self.value:
                return CheckResult.failed("core", f"witness core has min degree {core_min}")
        return CheckResult.passed()


def degeneracy(g: Graph) -> DegeneracyWitness:
    """Repeated min-degree removal (lowest id on ties)."""
    alive = g.full
    order = []
    value = 0
    core_start = 0
    while alive:
        v = min(bits(alive), key=lambda x: (g.degree_in(x, alive), x))
        d = g.degree_in(v, alive)
        if d > value or not order:
            value = max(value, d)
            core_start = len(order)
        order.append(v)
        alive &= ~(1 << v)
    return DegeneracyWitness(value, tuple(order), core_start)


def average_degree(g: Graph) -> float:
    return 2 * g.m / g.n if g.n else 0.0


def _min_degree_upper_bound(f: Graph) -> int:
    # a minor on m' vertices has at most f.m edges and degree at most m' - 1
    best = 0
    for size in range(1, f.n + 1):
        best = max(best, min(size - 1, (2 * f.m) // size))
    return best


class _IsomorphismMemo:
    """Remembers graphs up to isomorphism: WL-hash buckets, exact check inside a bucket."""

    def __init__(self):
        self.buckets = {}

    def seen(self, f: Graph) -> bool:
        nxg = f.to_networkx()
        key = (f.n, f.m, tuple(sorted(f.degrees())), nx.weisfeiler_lehman_graph_hash(nxg, iterations=3))
        bucket = self.buckets.setdefault(key, [])
        for other in bucket:
            if nx.is_isomorphic(nxg, other):
                return True
        bucket.append(nxg)
        return False


def _minor_children(f: Graph, branch: tuple):
    # some optimal minor above min degree must delete or contract a min-degree vertex
    v = min(f.vertices, key=lambda x: (f.degree(x), x))
    deleted, old = f.delete_vertices(1 << v)
    yield deleted, tuple(branch[i] for i in old)
    for u in f.neighbors(v):
        contracted, mapping = contract_edge_mapped(f, (v, u))
        merged = [0] * contracted.n
        for w in range(f.n):
            merged[mapping[w]] |= branch[w]
        yield contracted, tuple(merged)


def _dense_minor_search(g: Graph, threshold: int | None):
    """DFS over minors; returns (best value, witness minor, branch sets of the witness in g)."""
    memo = _IsomorphismMemo()
    start = (g, tuple(1 << v for v in range(g.n)))
    best = [g.min_degree() if g.n else 0, start]
    stack = [start]
    visited = 0
    while stack:
        f, branch = stack.pop()
        if f.n == 0 or memo.seen(f):
            continue
        visited += 1
        value = f.min_degree()
        if value > best[0]:
            best[0], best[1] = value, (f, branch)
            if threshold is not None and value >= threshold:
                break
        if _min_degree_upper_bound(f) <= best[0]:
            continue
        stack.extend(_minor_children(f, branch))
    log(f"contraction degeneracy search visited {visited} minors up to isomorphism", 1)
    return best[0], best[1][0], best[1][1]


def contraction_degeneracy(g: Graph, mode: str = "exact") -> int:
    """Max over minors of the minimum degree.

    exact: exhaustive search over deletion/contraction sequences, memoised up to isomorphism.
    lower_bound: minor-min-width, always <= the exact value.
    """
    if mode == "lower_bound":
        return minor_min_width(g)
    if mode != "exact":
        raise ParameterError(f"unknown mode {mode!r}", clause="mode")
    check_limit("contraction_degeneracy_exact", g.n, "contraction_degeneracy")
    return _dense_minor_search(g, None)[0]


def dense_minor(g: Graph, threshold: int):
    """A minor of g with min degree >= threshold and its branch sets in g, or None."""
    if g.n and g.min_degree() >= threshold:
        return g, tuple(1 << v for v in range(g.n))
    check_limit("contraction_degeneracy_exact", g.n, "dense_minor")
    value, minor, branch = _dense_minor_search(g, threshold)
    if value < threshold:
        return None
    return minor, branch


def minor_min_width(g: Graph) -> int:
    """Contract a min-degree vertex into the neighbour it shares fewest neighbours with."""
    f = g
    best = 0
    while f.n:
        v = min(f.vertices, key=lambda x: (f.degree(x), x))
        best = max(best, f.degree(v))
        if f.degree(v) == 0:
            f = f.delete_vertices(1 << v)[0]
            continue
        u = min(f.neighbors(v), key=lambda x: (popcount(f.adj[x] & f.adj[v]), x))
        f = contract_edge(f, (v, u))
    return best
#endregion


def require_edges(g: Graph, what: str):
    if g.m == 0:
        raise PreconditionError(f"{what} needs a graph with at least one edge", clause="nonempty")
