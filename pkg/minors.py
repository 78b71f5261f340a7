#
#  minors.py
#
#  Minor-model search, verification and minimal-model enumeration.
#
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from cache import get_or_compute
from graph_core import Graph, bits, graph_hash, lowest, popcount
from util import CheckResult, check_limit, get_settings, log


@dataclass(frozen=True)
class MinorModel:
    """Branch sets of `pattern` in `host`; branch_sets[a] is the bitset of pattern vertex a."""
    pattern: Graph
    host: Graph
    branch_sets: tuple

    @property
    def support(self) -> int:
        mask = 0
        for s in self.branch_sets:
            mask |= s
        return mask

    def branch(self, a: int) -> list:
        return list(bits(self.branch_sets[a]))

    def size(self) -> int:
        return popcount(self.support)

    def lifted(self, host: Graph, old_ids) -> MinorModel:
        """Rename host vertices through `old_ids` (new id -> id in `host`)."""
        sets = []
        for s in self.branch_sets:
            mask = 0
            for v in bits(s):
                mask |= 1 << old_ids[v]
            sets.append(mask)
        return MinorModel(self.pattern, host, tuple(sets))


@dataclass(frozen=True)
class ModelFamily:
    models: tuple
    truncated: bool

    @property
    def supports(self) -> tuple:
        return tuple(m.support for m in self.models)

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)


def verify_model(m: MinorModel) -> CheckResult:
    host, pattern = m.host, m.pattern
    if len(m.branch_sets) != pattern.n:
        return CheckResult.failed("bijection", f"{len(m.branch_sets)} branch sets for {pattern.n} pattern vertices")
    seen = 0
    for a, s in enumerate(m.branch_sets):
        if not s:
            return CheckResult.failed("nonempty", f"branch set of {a} is empty")
        if s & ~host.full:
            return CheckResult.failed("range", f"branch set of {a} leaves the host")
        if s & seen:
            owners = [b for b in range(a) if m.branch_sets[b] & s]
            return CheckResult.failed("disjointness", f"branch set of {a} meets {owners}: {list(bits(s & seen))}")
        seen |= s
    for a, s in enumerate(m.branch_sets):
        if not host.is_connected(s):
            return CheckResult.failed("connectivity", f"branch set of {a} = {list(bits(s))} is disconnected")
    for a, b in pattern.edges:
        if not host.neighborhood(m.branch_sets[a]) & m.branch_sets[b]:
            return CheckResult.failed("edge realisation", f"no host edge between branch sets of {a} and {b}")
    return CheckResult.passed()


def compose_models(inner: MinorModel, outer: MinorModel) -> MinorModel:
    """A ≼ B (inner) and B ≼ C (outer) give A ≼ C."""
    if inner.host != outer.pattern:
        raise ValueError("inner model host must be the outer model pattern")
    sets = []
    for s in inner.branch_sets:
        mask = 0
        for b in bits(s):
            mask |= outer.branch_sets[b]
        sets.append(mask)
    return MinorModel(inner.pattern, outer.host, tuple(sets))


#region Search
def _placement_order(pattern: Graph) -> list:
    """BFS per component, components by size, each started at a max-degree vertex."""
    order = []
    for comp in sorted(pattern.components(), key=lambda c: (-popcount(c), lowest(c))):
        start = max(bits(comp), key=lambda v: (pattern.degree(v), -v))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in sorted(pattern.neighbors(v), key=lambda x: (-pattern.degree(x), x)):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return order


def connected_sets(g: Graph, seed: int, allowed: int, max_size: int, blocked: list | None = None):
    """Every connected set inside `allowed` that contains `seed`, each exactly once.

    When `blocked` is a list, blocked[0] is set if some set could not grow past max_size.
    """
    def grow(s, size, ext, excluded):
        yield s
        if size == max_size:
            if ext and blocked is not None:
                blocked[0] = True
            return
        while ext:
            v = lowest(ext)
            bit = 1 << v
            ext ^= bit
            child = s | bit
            yield from grow(child, size + 1, (ext | g.adj[v]) & allowed & ~excluded & ~child, excluded)
            excluded |= bit

    start = 1 << seed
    yield from grow(start, 1, g.adj[seed] & allowed & ~start, 0)


class _ModelSearch:
    """Backtracking over connected branch sets, pattern vertices in BFS order.

    `deepen` names the bound that iterative deepening relaxes ("cap" on each branch set or
    "budget" on the total support); `self.cut` records whether that bound ever blocked growth.
    """

    def __init__(self, host: Graph, pattern: Graph, allowed: int):
        self.host = host
        self.pattern = pattern
        self.allowed = allowed
        self.order = _placement_order(pattern)
        position = {a: i for i, a in enumerate(self.order)}
        self.earlier = [[b for b in pattern.neighbors(a) if position[b] < i] for i, a in enumerate(self.order)]
        # still_needed[step][i]: neighbours of order[i] placed after step
        self.still_needed = [
            [sum(1 for b in pattern.neighbors(a) if position[b] > step) for a in self.order[:step + 1]]
            for step in range(len(self.order))
        ]
        self.nodes = 0

    def run(self, cap: int, budget: int, on_model, known=(), deepen: str = "cap") -> bool:
        self.branch = [0] * self.pattern.n
        self.cut = False
        self.cap, self.budget, self.known, self.deepen = cap, budget, known, deepen
        self.on_model = on_model
        return self._place(0, self.allowed, 0)

    def _feasible(self, step: int, free: int) -> bool:
        needed = self.still_needed[step]
        for i in range(step + 1):
            if needed[i] and popcount(self.host.neighborhood(self.branch[self.order[i]]) & free) < needed[i]:
                return False
        return True

    def _place(self, step: int, free: int, used: int) -> bool:
        self.nodes += 1
        if step == len(self.order):
            return self.on_model(tuple(self.branch))
        a = self.order[step]
        remaining = len(self.order) - step - 1
        if popcount(free) < remaining + 1:
            return False
        by_budget = self.budget - used - remaining
        room = min(self.cap, by_budget)
        deepening_binds = (self.cap < by_budget) if self.deepen == "cap" else (by_budget < self.cap)
        if room < 1:
            self.cut = self.cut or deepening_binds
            return False

        earlier = self.earlier[step]
        touch = [self.host.neighborhood(self.branch[b]) for b in earlier]
        targets = free & touch[0] if earlier else free
        blocked = [False]
        for seed in bits(targets):
            allowed_here = free & ~(targets & ((1 << seed) - 1))
            for s in connected_sets(self.host, seed, allowed_here, room, blocked):
                if any(not (s & t) for t in touch[1:]):
                    continue
                union = (self.allowed & ~free) | s
                if self.known and any(k & ~union == 0 for k in self.known):
                    continue
                self.branch[a] = s
                new_free = free & ~s
                if not self._feasible(step, new_free):
                    continue
                if self._place(step + 1, new_free, used + popcount(s)):
                    self.branch[a] = 0
                    return True
            self.branch[a] = 0
        if blocked[0] and deepening_binds:
            self.cut = True
        return False


def _check_sizes(host: Graph, pattern: Graph):
    check_limit("minor_pattern", pattern.n, "minor search pattern")
    check_limit("minor_host", host.n, "minor search host")


def _obviously_absent(host: Graph, pattern: Graph, allowed: int) -> bool:
    return pattern.n > popcount(allowed) or pattern.m > host.edges_within(allowed)


def find_minor_model(host: Graph, pattern: Graph, allowed: int | None = None) -> MinorModel | None:
    """A model of `pattern` in host[allowed] (branch sets keep host ids), or None.

    Iterative deepening on the largest branch set, so small witnesses come first.
    """
    _check_sizes(host, pattern)
    allowed = host.full if allowed is None else allowed
    if pattern.n == 0:
        return MinorModel(pattern, host, ())
    if _obviously_absent(host, pattern, allowed):
        return None

    search = _ModelSearch(host, pattern, allowed)
    found = []

    def keep(branch):
        found.append(branch)
        return True

    total = popcount(allowed)
    for cap in range(1, total - pattern.n + 2):
        if search.run(cap, total, keep, deepen="cap"):
            log(f"minor found with branch sets of size <= {cap} after {search.nodes} nodes", 1)
            return MinorModel(pattern, host, found[0])
        if not search.cut:
            break
    log(f"no minor, search exhausted after {search.nodes} nodes", 1)
    return None


def has_minor(host: Graph, pattern: Graph, allowed: int | None = None) -> bool:
    return find_minor_model(host, pattern, allowed) is not None


def enumerate_minimal_models(host: Graph, pattern: Graph, limit: int | None = None,
                             allowed: int | None = None) -> ModelFamily:
    """One model per support-minimal support, in order of support size.

    Level T collects every model of total size T whose support contains no support found so
    far; by induction these supports are minimal. Stops once the size bound stops mattering.
    """
    _check_sizes(host, pattern)
    allowed = host.full if allowed is None else allowed
    limit = get_settings()["minimal_models"] if limit is None else limit
    if pattern.n == 0:
        return ModelFamily((MinorModel(pattern, host, ()),), False)
    if _obviously_absent(host, pattern, allowed):
        return ModelFamily((), False)

    search = _ModelSearch(host, pattern, allowed)
    known = []
    models = []
    truncated = False

    def keep(branch):
        nonlocal truncated
        support = 0
        for s in branch:
            support |= s
        known.append(support)
        models.append(MinorModel(pattern, host, branch))
        if limit is not None and len(models) >= limit:
            truncated = True
            return True
        return False

    total = popcount(allowed)
    for size in range(pattern.n, total + 1):
        search.run(total, size, keep, known, deepen="budget")
        if truncated:
            log(f"minimal model enumeration truncated at {limit} models", 3)
            break
        if not search.cut:
            break
    log(f"{len(models)} minimal models after {search.nodes} nodes", 1)
    return ModelFamily(tuple(models), truncated)


def minimal_supports(host: Graph, pattern: Graph, allowed: int | None = None) -> ModelFamily:
    """enumerate_minimal_models memoised per (host, pattern, allowed)."""
    allowed = host.full if allowed is None else allowed
    key = ("supports", graph_hash(host), graph_hash(pattern), allowed)
    return get_or_compute(key, lambda: enumerate_minimal_models(host, pattern, allowed=allowed))


def branch_sets_json(m: MinorModel) -> dict:
    return {str(a): m.branch(a) for a in range(m.pattern.n)}
#endregion
