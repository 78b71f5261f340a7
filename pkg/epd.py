#
#  epd.py
#
#  Packing / covering oracles, the balanced separation, the recursive hitting set,
#  the win/win certificate and the bound formulas.
#
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext
from enum import Enum
from fractions import Fraction

from errors import (DomainError, InvariantError, ParameterError, PreconditionError, SizeLimitError,
                    ValidationError)
from graph_core import Graph, bits, lowest, mask_of, popcount
from minors import has_minor, minimal_supports, verify_model
from util import CheckResult, check_limit, log
from width import NiceTreeDecomposition, make_nice, treewidth_exact, verify_nice


class CertificateKind(Enum):
    PACKING = "packing"
    COVER = "cover"


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    k: int
    models: tuple = ()
    cover: int = 0
    treewidth: int | None = None
    bound: int | None = None

    @property
    def cover_size(self) -> int:
        return popcount(self.cover)


@dataclass(frozen=True)
class Separation:
    a_set: int
    b_set: int
    order: int
    pack_total: int = 0
    split_node: int | None = None
    split_kind: str | None = None
    pack_zero: bool = False


@dataclass(frozen=True)
class BoundParams:
    k: int
    r: int
    c: int = 648

    def __post_init__(self):
        if self.k < 1 or self.r < 1:
            raise ParameterError("k and r must be positive", clause="k")


@dataclass(frozen=True)
class BoundValue:
    """`exact` is set when the value is rational (an int); `ceiling` is always safe to use."""
    expression: str
    exact: int | Fraction | None
    ceiling: int


#region Supports
def _is_triangle(h: Graph) -> bool:
    return h.n == 3 and h.m == 3


def _check_pack_limits(g: Graph, h: Graph):
    key = "pack_host_triangle" if _is_triangle(h) else "pack_host"
    check_limit(key, g.n, "pack/cover host")


def supports_of(g: Graph, h: Graph) -> tuple:
    """Minimal supports of h-models in g; any hitting set for them hits every model."""
    if h.n == 0:
        raise ParameterError("pattern has no vertices", clause="pattern")
    _check_pack_limits(g, h)
    family = minimal_supports(g, h)
    if family.truncated:
        raise SizeLimitError("minimal_models", len(family), len(family), "minimal model enumeration")
    return family.models


class _Packer:
    """Max number of pairwise disjoint supports inside a vertex mask, memoised on the mask."""

    def __init__(self, supports):
        self.supports = supports
        self.memo = {}

    def best(self, mask: int) -> tuple:
        if mask in self.memo:
            return self.memo[mask]
        inside = [s for s in self.supports if s & ~mask == 0]
        if not inside:
            result = (0, ())
        else:
            v = min(lowest(s) for s in inside)
            skip = self.best(mask & ~(1 << v))
            result = skip
            for s in inside:
                if s >> v & 1:
                    count, chosen = self.best(mask & ~s)
                    if count + 1 > result[0]:
                        result = (count + 1, (s,) + chosen)
        self.memo[mask] = result
        return result
#endregion


def pack_exact(g: Graph, h: Graph) -> tuple[int, list]:
    models = supports_of(g, h)
    by_support = {m.support: m for m in models}
    count, chosen = _Packer(tuple(by_support)).best(g.full)
    return count, [by_support[s] for s in chosen]


def _hitting_search(supports, budget: int, hit: int):
    missed = next((s for s in supports if not s & hit), None)
    if missed is None:
        return hit
    if budget == 0:
        return None
    for v in bits(missed):
        found = _hitting_search(supports, budget - 1, hit | 1 << v)
        if found is not None:
            return found
    return None


def cover_exact(g: Graph, h: Graph) -> tuple[int, int]:
    """Smallest vertex set meeting every minimal support, by increasing size; checked by minor search."""
    supports = sorted({m.support for m in supports_of(g, h)}, key=lambda s: (popcount(s), s))
    for size in range(g.n + 1):
        cover = _hitting_search(supports, size, 0)
        if cover is not None:
            if has_minor(g, h, allowed=g.full & ~cover):
                raise ValidationError("cover misses a model of the pattern", clause="cover")
            return popcount(cover), cover
    raise ValidationError("no cover found", clause="cover")


#region Balanced separation
def _require_connected(h: Graph):
    if h.n == 0 or not h.is_connected():
        raise PreconditionError("pattern must be connected", clause="connected pattern")


def _subtree_vertices(ntd: NiceTreeDecomposition) -> list:
    """Union of bags over each node's descendants (the node included)."""
    below = [0] * len(ntd.bags)
    for node in ntd.postorder():
        mask = ntd.bags[node]
        for child in ntd.children[node]:
            mask |= below[child]
        below[node] = mask
    return below


def _separate(g: Graph, ntd: NiceTreeDecomposition, packer: _Packer) -> Separation:
    k = packer.best(g.full)[0]
    if k == 0:
        return Separation(g.full, g.full, g.n, 0, pack_zero=True)

    below = _subtree_vertices(ntd)
    forgotten = [below[t] & ~ntd.bags[t] for t in range(len(ntd.bags))]
    p = [0] * len(ntd.bags)
    for t in ntd.postorder():
        kind, _ = ntd.kinds[t]
        kids = ntd.children[t]
        if kind == "base":
            p[t] = 0
        elif kind == "introduce":
            p[t] = p[kids[0]]
        elif kind == "forget":
            p[t] = packer.best(forgotten[t])[0]
            if p[t] - p[kids[0]] not in (0, 1):
                raise InvariantError(f"forget node {t} changed the packing from {p[kids[0]]} to {p[t]}",
                                     clause="forget")
        else:
            p[t] = p[kids[0]] + p[kids[1]]
            if p[t] != packer.best(forgotten[t])[0]:
                raise InvariantError(f"join node {t} packing is not additive", clause="join")
    if p[ntd.root] != k:
        raise InvariantError(f"root packs {p[ntd.root]}, the graph packs {k}", clause="root")

    heavy = [3 * p[t] > 2 * k for t in range(len(p))]
    splits = [t for t in range(len(p)) if heavy[t] and not any(heavy[c] for c in ntd.children[t])]
    if len(splits) != 1:
        raise InvariantError(f"expected one split node, found {len(splits)}", clause="split")
    t = splits[0]
    kind, _ = ntd.kinds[t]
    kids = ntd.children[t]
    if kind == "forget":
        side = kids[0]
    elif kind == "join":
        side = max(kids, key=lambda c: (p[c], -c))
    else:
        raise InvariantError(f"split node has kind {kind}", clause="split")
    a_set = forgotten[side] | ntd.bags[side]
    b_set = g.full & ~forgotten[side]
    return Separation(a_set, b_set, popcount(a_set & b_set), k, t, kind)


def balanced_separation(g: Graph, h: Graph, ntd: NiceTreeDecomposition | None = None) -> Separation:
    """Separation of order <= width + 1 whose A-side (minus the separator) packs at most 2k/3 models."""
    _require_connected(h)
    if ntd is None:
        _, td = treewidth_exact(g)
        ntd = make_nice(g, td)
    else:
        check = verify_nice(g, ntd)
        if not check:
            raise ValidationError(f"nice decomposition fails: {check.clause}", clause=check.clause)
    packer = _Packer(tuple({m.support for m in supports_of(g, h)}))
    return _separate(g, ntd, packer)


def verify_separation(g: Graph, sep: Separation) -> CheckResult:
    if sep.a_set | sep.b_set != g.full:
        return CheckResult.failed("cover", "A and B do not cover the graph")
    only_a = sep.a_set & ~sep.b_set
    only_b = sep.b_set & ~sep.a_set
    if g.neighborhood(only_a) & only_b:
        return CheckResult.failed("crossing edge", "an edge joins A - B and B - A")
    if sep.order != popcount(sep.a_set & sep.b_set):
        return CheckResult.failed("order", "declared order differs from |A & B|")
    return CheckResult.passed()
#endregion


#region Hitting sets
def hitting_set_recursive(g: Graph, h: Graph, width_budget: int | None = None, trace: list | None = None) -> int:
    """Separator of a balanced separation plus recursive covers of both sides."""
    _require_connected(h)
    supports = tuple({m.support for m in supports_of(g, h)})

    def recurse(mask: int, depth: int) -> int:
        local_supports = [s for s in supports if s & ~mask == 0]
        if not local_supports:
            return 0
        sub, old = g.induced(mask)
        index = {v: i for i, v in enumerate(old)}
        packer = _Packer(tuple(mask_of(index[v] for v in bits(s)) for s in local_supports))
        width, td = treewidth_exact(sub)
        sep = _separate(sub, make_nice(sub, td), packer)
        separator = mask_of(old[v] for v in bits(sep.a_set & sep.b_set))
        if trace is not None:
            trace.append({"depth": depth, "size": sub.n, "pack": sep.pack_total, "order": sep.order, "width": width})
        log(f"{'  ' * depth}n = {sub.n}, pack = {sep.pack_total}, separator {sep.order}, width {width}", 1)
        if width_budget is not None and sep.order > width_budget + 1:
            log(f"separator of order {sep.order} exceeds the width budget {width_budget}", 3)
        left = mask_of(old[v] for v in bits(sep.a_set & ~sep.b_set))
        right = mask_of(old[v] for v in bits(sep.b_set & ~sep.a_set))
        return separator | recurse(left, depth + 1) | recurse(right, depth + 1)

    cover = recurse(g.full, 0)
    if has_minor(g, h, allowed=g.full & ~cover):
        raise ValidationError("recursive hitting set misses a model", clause="cover")
    log(f"recursive hitting set of size {popcount(cover)}", 2)
    return cover


def minimize_cover(g: Graph, h: Graph, cover: int) -> int:
    """Drop vertices (ascending) while the set still meets every minimal support."""
    supports = [m.support for m in supports_of(g, h)]
    for v in bits(cover):
        smaller = cover & ~(1 << v)
        if all(s & smaller for s in supports):
            cover = smaller
    return cover
#endregion


#region Win/win
def k2r_size(h: Graph) -> int | None:
    """r when h is K_{2,r}: two non-adjacent hubs and every other vertex adjacent to exactly both."""
    if h.n < 3 or h.m != 2 * (h.n - 2):
        return None
    for a in range(h.n):
        for b in range(a + 1, h.n):
            if h.has_edge(a, b):
                continue
            hubs = {a, b}
            if all(set(h.neighbors(v)) == hubs for v in h.vertices if v not in hubs):
                return h.n - 2
    return None


def pattern_bound(h: Graph, k: int) -> int | None:
    """Treewidth threshold the theorems give for this pattern, when one applies."""
    r = k2r_size(h)
    return None if r is None else bound_th2(k, r)


def epgap_winwin(g: Graph, h: Graph, k: int) -> Certificate:
    """k disjoint models when they exist, otherwise a cover from the recursive hitting set."""
    if k < 1:
        raise ParameterError("k must be positive", clause="k")
    _require_connected(h)
    count, models = pack_exact(g, h)
    if count >= k:
        return Certificate(CertificateKind.PACKING, k, models=tuple(models[:k]))

    width, _ = treewidth_exact(g)
    bound = pattern_bound(h, k)
    if bound is not None and width >= bound:
        log(f"treewidth {width} reaches the bound {bound} although pack = {count}", 4)
    cover = minimize_cover(g, h, hitting_set_recursive(g, h, width_budget=width))
    return Certificate(CertificateKind.COVER, k, cover=cover, treewidth=width, bound=bound)


def verify_certificate(g: Graph, h: Graph, cert: Certificate, k: int) -> CheckResult:
    if cert.kind is CertificateKind.PACKING:
        if len(cert.models) < k:
            return CheckResult.failed("packing size", f"{len(cert.models)} models, need {k}")
        used = 0
        for m in cert.models:
            if m.pattern != h or m.host != g:
                return CheckResult.failed("packing", "model for another pattern or host")
            result = verify_model(m)
            if not result:
                return result
            if m.support & used:
                return CheckResult.failed("packing disjointness", "two models share a vertex")
            used |= m.support
        return CheckResult.passed()
    if has_minor(g, h, allowed=g.full & ~cert.cover):
        return CheckResult.failed("cover", "a model survives deleting the cover")
    return CheckResult.passed()
#endregion


#region Bounds
def _log2_exact(value: int) -> int | None:
    return value.bit_length() - 1 if value & (value - 1) == 0 else None


def bound_th1(k: int, r: int) -> BoundValue:
    """k² log2(2k) (180·2^{r(r-2)} - 24·2^{r(r-2)/2}) + 6·2^{r(r-2)/2} - 1 for r > 5."""
    BoundParams(k, r)
    if r <= 5:
        raise DomainError(f"the bound needs r > 5, got {r}", clause="r")
    e = r * (r - 2)
    expression = f"{k}^2*log2({2 * k})*(180*2^{e} - 24*2^({e}/2)) + 6*2^({e}/2) - 1"
    log_term = _log2_exact(2 * k)
    if e % 2 == 0 and log_term is not None:
        half = 2 ** (e // 2)
        value = k * k * log_term * (180 * 2 ** e - 24 * half) + 6 * half - 1
        return BoundValue(expression, value, value)

    digits = int(e * math.log10(2) + 2 * math.log10(k) + math.log10(2 * k)) + 60
    with localcontext() as ctx:
        ctx.prec = digits
        log2 = Decimal(2 * k).ln() / Decimal(2).ln() if log_term is None else Decimal(log_term)
        half = Decimal(2) ** (e // 2) * (Decimal(2).sqrt() if e % 2 else 1)
        value = Decimal(k * k) * log2 * (180 * Decimal(2) ** e - 24 * half) + 6 * half - 1
        ceiling = int(value.to_integral_value(rounding=ROUND_CEILING))
    return BoundValue(expression, None, ceiling)


def bound_th2(k: int, r: int, variant: str = "statement") -> int:
    """20k²r² - 8k²r + 2r - 1 as stated; the proof's version ends with + 2k - 1 instead."""
    BoundParams(k, r)
    head = 20 * k * k * r * r - 8 * k * k * r
    if variant == "statement":
        return head + 2 * r - 1
    if variant == "proof":
        return head + 2 * k - 1
    raise ParameterError(f"unknown variant {variant!r}", clause="variant")


def kostochka_threshold(t: int, c: int = BoundParams.c) -> float:
    """c·t·sqrt(log2 t), c = 648 by default: average degree above this forces a K_t minor."""
    if t < 1:
        raise ParameterError("t must be positive", clause="t")
    return c * t * math.sqrt(math.log2(t))
#endregion
