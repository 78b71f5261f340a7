#
#  width.py
#
#  Exact treewidth / pathwidth with certificates, nice tree decompositions and k-meshes.
#
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from errors import ValidationError
from graph_core import Graph, bits, degeneracy, lowest, mask_of, minor_min_width, path, popcount
from minors import connected_sets
from util import CheckResult, check_limit, log


@dataclass(frozen=True)
class TreeDecomposition:
    """bags[t] is the bitset of tree node t."""
    tree: Graph
    bags: tuple

    @property
    def width(self) -> int:
        return max(max((popcount(b) for b in self.bags), default=0) - 1, 0)

    def is_path(self) -> bool:
        return self.tree.is_tree() and self.tree.max_degree() <= 2


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """kinds[t] is ("base"|"join", None) or ("introduce"|"forget", vertex); children[t] lists child nodes."""
    decomposition: TreeDecomposition
    root: int
    kinds: tuple
    children: tuple

    @property
    def bags(self) -> tuple:
        return self.decomposition.bags

    @property
    def width(self) -> int:
        return self.decomposition.width

    def postorder(self) -> list:
        order = []
        stack = [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            stack.append((node, True))
            for child in reversed(self.children[node]):
                stack.append((child, False))
        return order

    def descendants(self, node: int) -> list:
        found = []
        stack = [node]
        while stack:
            t = stack.pop()
            found.append(t)
            stack.extend(self.children[t])
        return found


def _single_bag(mask: int) -> TreeDecomposition:
    return TreeDecomposition(Graph.empty(1), (mask,))


#region Validation
def verify_decomposition(g: Graph, t: TreeDecomposition, declared_width: int | None = None) -> CheckResult:
    tree = t.tree
    if len(t.bags) != tree.n:
        return CheckResult.failed("bags", f"{len(t.bags)} bags for {tree.n} tree nodes")
    if not tree.is_tree():
        return CheckResult.failed("tree", "decomposition tree is not a tree")
    covered = 0
    for node, bag in enumerate(t.bags):
        if bag & ~g.full:
            return CheckResult.failed("range", f"bag {node} names vertices outside the graph")
        covered |= bag
    if covered != g.full:
        return CheckResult.failed("vertex coverage", f"vertices {list(bits(g.full & ~covered))} in no bag")
    for u, v in g.edges:
        pair = (1 << u) | (1 << v)
        if not any(bag & pair == pair for bag in t.bags):
            return CheckResult.failed("edge coverage", f"edge {u}-{v} lies in no bag")
    for v in g.vertices:
        nodes = mask_of(node for node, bag in enumerate(t.bags) if bag >> v & 1)
        if not tree.is_connected(nodes):
            return CheckResult.failed("connectivity of occurrence", f"bags holding {v} are not connected")
    if declared_width is not None and declared_width != t.width:
        return CheckResult.failed("width", f"declared {declared_width}, actual {t.width}")
    return CheckResult.passed()


def verify_nice(g: Graph, ntd: NiceTreeDecomposition) -> CheckResult:
    result = verify_decomposition(g, ntd.decomposition)
    if not result:
        return result
    bags, kinds, children = ntd.bags, ntd.kinds, ntd.children
    if bags[ntd.root]:
        return CheckResult.failed("root", "root bag is not empty")
    tree_edges = {(min(a, b), max(a, b)) for a in range(len(bags)) for b in children[a]}
    if tree_edges != set(ntd.decomposition.tree.edges) or len(ntd.postorder()) != len(bags):
        return CheckResult.failed("rooting", "children do not describe the decomposition tree")
    for node, (kind, vertex) in enumerate(kinds):
        kids = children[node]
        bag = bags[node]
        if kind == "base":
            ok = not kids and not bag
        elif kind == "introduce":
            ok = len(kids) == 1 and not bags[kids[0]] >> vertex & 1 and bag == bags[kids[0]] | 1 << vertex
        elif kind == "forget":
            ok = len(kids) == 1 and bags[kids[0]] >> vertex & 1 and bag == bags[kids[0]] & ~(1 << vertex)
        elif kind == "join":
            ok = len(kids) == 2 and bags[kids[0]] == bag == bags[kids[1]]
        else:
            ok = False
        if not ok:
            return CheckResult.failed(f"{kind} node", f"node {node} breaks the {kind} rule")
    return CheckResult.passed()
#endregion


#region Treewidth
def decomposition_from_ordering(g: Graph, order) -> TreeDecomposition:
    """Eliminate in `order`: node i holds order[i] plus its later neighbours in the fill graph."""
    if g.n == 0:
        return _single_bag(0)
    position = {v: i for i, v in enumerate(order)}
    adj = list(g.adj)
    bags = []
    parents = []
    for i, v in enumerate(order):
        later = adj[v] & ~mask_of(order[:i + 1])
        bags.append(later | 1 << v)
        for u in bits(later):
            adj[u] |= later & ~(1 << u)
        parents.append(min((position[u] for u in bits(later)), default=None))
    edges = []
    roots = []
    for i, parent in enumerate(parents):
        if parent is None:
            roots.append(i)
        else:
            edges.append((i, parent))
    # one tree per component; chain the roots
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition(Graph.from_edges(g.n, edges), tuple(bags))


def _from_networkx_decomposition(decomposition: nx.Graph) -> TreeDecomposition:
    nodes = list(decomposition.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    edges = [(index[a], index[b]) for a, b in decomposition.edges()]
    # disconnected graphs come back as a forest
    heads = [lowest(part) for part in Graph.from_edges(len(nodes), edges).components()]
    edges.extend(zip(heads, heads[1:]))
    tree = Graph.from_edges(len(nodes), edges)
    return TreeDecomposition(tree, tuple(mask_of(node) for node in nodes))


def _elimination_degree(g: Graph, eliminated: int, v: int) -> int:
    """|Q(S, v)|: vertices outside S + v reachable from v through S."""
    reach = g.component_of(v, eliminated | 1 << v)
    return popcount(g.neighborhood(reach) & ~eliminated)


def treewidth_lower_bound(g: Graph) -> int:
    return max(degeneracy(g).value, minor_min_width(g))


def treewidth_exact(g: Graph) -> tuple[int, TreeDecomposition]:
    """Subset DP over elimination prefixes, TW(S + v) = max(TW(S), |Q(S, v)|).

    Only prefixes below the incumbent are kept; a prefix S with TW(S) and n - |S| - 1 both
    under the incumbent finishes in any order and improves it.
    """
    check_limit("treewidth", g.n, "treewidth_exact")
    if g.n == 0:
        return 0, _single_bag(0)

    upper, heuristic = treewidth_min_fill_in(g.to_networkx())
    best = _from_networkx_decomposition(heuristic)
    lower = treewidth_lower_bound(g)
    log(f"treewidth bounds {lower}..{upper}", 1)
    if lower >= upper:
        return upper, best

    best_order = None
    history = []
    layer = {0: (-1, None, None)}
    while layer and upper > lower:
        history.append(layer)
        size = len(history) - 1
        next_layer = {}
        for prefix, (value, _, _) in layer.items():
            finish = max(value, g.n - size - 1, 0)
            if finish < upper:
                upper = finish
                best_order = _unwind(history, prefix) + [v for v in g.vertices if not prefix >> v & 1]
                if upper <= lower:
                    break
            for v in bits(g.full & ~prefix):
                width = max(value, _elimination_degree(g, prefix, v))
                if width >= upper:
                    continue
                key = prefix | 1 << v
                if key not in next_layer or width < next_layer[key][0]:
                    next_layer[key] = (width, prefix, v)
        layer = {key: item for key, item in next_layer.items() if item[0] < upper}

    if best_order is not None:
        best = decomposition_from_ordering(g, best_order)
    log(f"treewidth {best.width}", 1)
    return best.width, best


def _unwind(history, prefix) -> list:
    """Elimination order leading to `prefix`, read back through the layer parents."""
    order = []
    depth = len(history) - 1
    while True:
        _, parent, v = history[depth][prefix]
        if v is None:
            break
        order.append(v)
        prefix = parent
        depth -= 1
    order.reverse()
    return order
#endregion


#region Pathwidth
def _boundary(g: Graph, prefix: int) -> int:
    """Vertices of the prefix that still have a neighbour outside it."""
    return popcount(mask_of(v for v in bits(prefix) if g.adj[v] & ~prefix))


def pathwidth_exact(g: Graph) -> tuple[int, TreeDecomposition]:
    """Vertex separation DP over layouts; bag i is the boundary of the first i - 1 vertices plus v_i."""
    check_limit("pathwidth", g.n, "pathwidth_exact")
    if g.n == 0:
        return 0, _single_bag(0)

    # best[S]: min over layouts of S of the largest boundary among its proper prefixes
    best = {0: (0, None, None)}
    layer = [0]
    for _ in range(g.n):
        next_layer = {}
        for prefix in layer:
            value = max(best[prefix][0], _boundary(g, prefix))
            for v in bits(g.full & ~prefix):
                key = prefix | 1 << v
                if key not in next_layer or value < next_layer[key][0]:
                    next_layer[key] = (value, prefix, v)
        best.update(next_layer)
        layer = list(next_layer)

    order = []
    prefix = g.full
    while prefix:
        _, parent, v = best[prefix]
        order.append(v)
        prefix = parent
    order.reverse()

    bags = []
    placed = 0
    for v in order:
        bags.append(mask_of(u for u in bits(placed) if g.adj[u] & ~placed) | 1 << v)
        placed |= 1 << v
    decomposition = TreeDecomposition(path(g.n), tuple(bags))
    log(f"pathwidth {best[g.full][0]}", 1)
    return decomposition.width, decomposition
#endregion


#region Nice decompositions
class _NiceBuilder:
    def __init__(self):
        self.bags = []
        self.kinds = []
        self.children = []

    def add(self, bag: int, kind: str, vertex, children) -> int:
        self.bags.append(bag)
        self.kinds.append((kind, vertex))
        self.children.append(tuple(children))
        return len(self.bags) - 1

    def morph(self, node: int, target: int) -> int:
        """Forget what target lacks, then introduce what it adds."""
        bag = self.bags[node]
        for v in bits(bag & ~target):
            bag &= ~(1 << v)
            node = self.add(bag, "forget", v, (node,))
        for v in bits(target & ~bag):
            bag |= 1 << v
            node = self.add(bag, "introduce", v, (node,))
        return node


def make_nice(g: Graph, t: TreeDecomposition) -> NiceTreeDecomposition:
    """Root at node 0, splice introduce/forget chains along tree edges, binarise joins, forget up to an empty root."""
    check = verify_decomposition(g, t)
    if not check:
        raise ValidationError(f"cannot make an invalid decomposition nice: {check.clause} ({check.detail})",
                              clause=check.clause)

    builder = _NiceBuilder()
    parent = {0: None}
    order = [0]
    for node in order:
        for child in t.tree.neighbors(node):
            if child not in parent:
                parent[child] = node
                order.append(child)

    top = {}
    for node in reversed(order):
        bag = t.bags[node]
        kids = [c for c in t.tree.neighbors(node) if parent.get(c) == node]
        if not kids:
            top[node] = builder.morph(builder.add(0, "base", None, ()), bag)
            continue
        branches = [builder.morph(top[c], bag) for c in kids]
        current = branches[0]
        for other in branches[1:]:
            current = builder.add(bag, "join", None, (current, other))
        top[node] = current

    root = builder.morph(top[0], 0)
    edges = [(node, child) for node, kids in enumerate(builder.children) for child in kids]
    tree = Graph.from_edges(len(builder.bags), edges)
    nice = NiceTreeDecomposition(TreeDecomposition(tree, tuple(builder.bags)), root,
                                 tuple(builder.kinds), tuple(builder.children))
    log(f"nice decomposition with {tree.n} nodes, width {nice.width}", 1)
    return nice
#endregion


#region Meshes
@dataclass(frozen=True)
class MeshWitness:
    a_set: int
    b_set: int
    tree_vertices: int
    tree_edges: tuple
    s: int
    k: int

    @property
    def boundary(self) -> int:
        return self.a_set & self.b_set


def mesh_treewidth_bound(p: int, q: int) -> int:
    """No q-mesh of order p forces treewidth below this."""
    return p + q - 1


def good_mesh_threshold(p: int, q: int) -> int:
    return 5 * p * q - 2 * q + 2 * p - 1


def good_mesh_required(p: int, q: int) -> int:
    """What the mesh bound needs for a (pq)-mesh of order (2p-1)(2q+1); one more than good_mesh_threshold."""
    return mesh_treewidth_bound((2 * p - 1) * (2 * q + 1), p * q)


def external_network(g: Graph, boundary: int, b_set: int, sources: int, sinks: int) -> nx.Graph:
    """G[B] minus boundary vertices outside sources/sinks and minus edges inside the boundary,
    with a super source "s" and sink "t"."""
    keep = (b_set & ~boundary) | sources | sinks
    network = nx.Graph()
    network.add_nodes_from(bits(keep))
    for u, v in g.edges:
        if keep >> u & 1 and keep >> v & 1 and not (boundary >> u & 1 and boundary >> v & 1):
            network.add_edge(u, v)
    network.add_edges_from(("s", x) for x in bits(sources))
    network.add_edges_from((y, "t") for y in bits(sinks))
    return network


def external_paths(g: Graph, boundary: int, b_set: int, sources: int, sinks: int) -> list:
    """Maximum family of disjoint sources-sinks paths through B avoiding the boundary's inside."""
    network = external_network(g, boundary, b_set, sources, sinks)
    if not sources or not sinks:
        return []
    try:
        paths = nx.node_disjoint_paths(network, "s", "t")
        return [p[1:-1] for p in paths]
    except nx.NetworkXNoPath:
        return []


def _linked(g: Graph, boundary: int, b_set: int, sources: int, sinks: int) -> bool:
    network = external_network(g, boundary, b_set, sources, sinks)
    return nx.algorithms.connectivity.local_node_connectivity(network, "s", "t") >= popcount(sources)


def externally_connected(g: Graph, boundary: int, b_set: int, k: int):
    """None when every X', Y' with |X'| = |Y'| <= k are linked, else the first failing pair."""
    members = list(bits(boundary))
    for size in range(1, min(k, len(members) // 2) + 1):
        for left in combinations(members, size):
            rest = [v for v in members if v not in left]
            for right in combinations(rest, size):
                if not _linked(g, boundary, b_set, mask_of(left), mask_of(right)):
                    return left, right
    return None


def _tree_degrees(edges) -> dict:
    degree = {}
    for u, v in edges:
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    return degree


def verify_mesh(g: Graph, w: MeshWitness) -> CheckResult:
    check_limit("mesh_verify_s", w.s, "verify_mesh order")
    check_limit("mesh_verify_k", w.k, "verify_mesh connectivity")
    x = w.boundary
    if w.a_set | w.b_set != g.full:
        return CheckResult.failed("cover", "A and B do not cover the graph")

    tree = Graph.from_edges(g.n, w.tree_edges)
    if w.tree_vertices & ~w.a_set or not w.tree_vertices:
        return CheckResult.failed("tree", "tree vertices must be a nonempty subset of A")
    if any(not g.has_edge(u, v) or not (w.tree_vertices >> u & 1 and w.tree_vertices >> v & 1)
           for u, v in w.tree_edges):
        return CheckResult.failed("tree", "tree edge missing from G[A]")
    if len(w.tree_edges) != popcount(w.tree_vertices) - 1 or not tree.is_connected(w.tree_vertices):
        return CheckResult.failed("tree", "tree edges do not span a tree")
    degree = _tree_degrees(w.tree_edges)
    if any(d > 3 for d in degree.values()):
        return CheckResult.failed("tree", "tree is not ternary")

    if x & ~w.tree_vertices:
        return CheckResult.failed("boundary in tree", f"{list(bits(x & ~w.tree_vertices))} not on the tree")
    if any(degree.get(v, 0) > 2 for v in bits(x)):
        return CheckResult.failed("boundary degree", "a boundary vertex has tree degree 3")
    if not any(degree.get(v, 0) == 1 for v in bits(x)):
        return CheckResult.failed("leaf", "no leaf of the tree lies in A and B")
    if popcount(x) != w.s:
        return CheckResult.failed("order", f"|A & B| = {popcount(x)}, expected {w.s}")

    failing = externally_connected(g, x, w.b_set, w.k)
    if failing is not None:
        return CheckResult.failed("external connectivity", f"{list(failing[0])} and {list(failing[1])} are not linked")
    return CheckResult.passed()


def _ternary_spanning_tree(g: Graph, vertices: int, boundary: int):
    """Spanning tree of g[vertices] with degree <= 3, boundary degree <= 2 and a boundary leaf."""
    members = list(bits(vertices))
    if len(members) < 2:
        return None
    edges = [(u, v) for u, v in g.edges if vertices >> u & 1 and vertices >> v & 1]
    cap = {v: (2 if boundary >> v & 1 else 3) for v in members}
    need = len(members) - 1
    component = {v: v for v in members}
    degree = {v: 0 for v in members}
    chosen = []

    def find(v):
        while component[v] != v:
            v = component[v]
        return v

    def search(i):
        if len(chosen) == need:
            if any(degree[v] == 1 for v in bits(boundary)):
                return list(chosen)
            return None
        if len(chosen) + len(edges) - i < need:
            return None
        u, v = edges[i]
        ru, rv = find(u), find(v)
        if ru != rv and degree[u] < cap[u] and degree[v] < cap[v]:
            component[ru] = rv
            degree[u] += 1
            degree[v] += 1
            chosen.append((u, v))
            found = search(i + 1)
            chosen.pop()
            degree[u] -= 1
            degree[v] -= 1
            component[ru] = ru
            if found:
                return found
        return search(i + 1)

    return search(0)


def find_mesh(g: Graph, k: int, s: int) -> MeshWitness | None:
    """Exhaustive: boundary X, then connected A containing X (the tree's vertex set), B = (V - A) + X.

    Taking A = V(T) loses nothing since a larger B only adds paths.
    """
    check_limit("mesh_find_n", g.n, "find_mesh")
    check_limit("mesh_find_k", k, "find_mesh")
    check_limit("mesh_find_s", s, "find_mesh")
    if s < 1 or s > g.n:
        return None

    for boundary_tuple in combinations(range(g.n), s):
        x = mask_of(boundary_tuple)
        if externally_connected(g, x, g.full, k) is not None:
            continue
        seed = lowest(x)
        candidates = sorted((a for a in connected_sets(g, seed, g.full, g.n) if a & x == x),
                            key=lambda a: (popcount(a), a))
        for a in candidates:
            b = (g.full & ~a) | x
            tree = _ternary_spanning_tree(g, a, x)
            if tree is None:
                continue
            if externally_connected(g, x, b, k) is not None:
                continue
            witness = MeshWitness(a, b, a, tuple(tree), s, k)
            log(f"mesh found: A = {list(bits(a))}, boundary {list(boundary_tuple)}", 1)
            return witness
    return None
#endregion
