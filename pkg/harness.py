#
#  harness.py
#
#  Seeded verification suite. Every lemma id maps to a trial function seed -> CheckResult;
#  trial seeds are derived from (suite seed, lemma, trial index) so results do not depend on
#  how the trials are scheduled.
#
from __future__ import annotations

import concurrent.futures
import math
import time
from dataclasses import dataclass, field

import numpy as np
import psutil

import cache
from epd import (balanced_separation, cover_exact, epgap_winwin, hitting_set_recursive, pack_exact,
                 verify_certificate, verify_separation)
from errors import EpgapError, SizeLimitError
from graph_core import (Graph, complete, complete_bipartite, degeneracy, mask_of, popcount, random_gnp,
                        random_permutation, random_pw2, random_ternary_tree)
from minors import has_minor, verify_model
from planted import planted_bipartite_multigraph, planted_linkage, planted_mesh, planted_paired_linkage
from structure import (check_pw2_minor_of_xi, disjoint_multiedges, erdos_szekeres, extract_k2r_from_degeneracy,
                       linkage_to_pairs, long_path, low_degree_set, low_degree_vertices, mesh_to_linkage,
                       pairs_to_k2r_models, pairs_to_xi_models, partition_violations, path_partition,
                       stiebitz_partition, th1_constants, tree_cut, verify_linkage, verify_paired_linkage)
from util import CheckResult, derive_seed, log
from width import find_mesh, make_nice, treewidth_exact, verify_mesh


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    seed: int
    clause: str
    detail: str

    def to_json(self):
        return {"trial": self.trial, "seed": self.seed, "clause": self.clause, "detail": self.detail}


@dataclass
class VerificationReport:
    lemma: str
    trials: int
    instances: str
    failures: list = field(default_factory=list)
    skipped: int = 0
    runtime: float | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self, timings: bool = False) -> dict:
        data = {
            "lemma": self.lemma,
            "trials": self.trials,
            "instances": self.instances,
            "failures": [f.to_json() for f in self.failures],
            "failure_count": len(self.failures),
            "skipped": self.skipped
        }
        if timings:
            data["runtime"] = self.runtime
        return data


def _disjoint(models) -> bool:
    used = 0
    for m in models:
        if m.support & used:
            return False
        used |= m.support
    return True


def _models_ok(models, count: int) -> CheckResult:
    if len(models) != count:
        return CheckResult.failed("model count", f"{len(models)} models, expected {count}")
    for m in models:
        result = verify_model(m)
        if not result:
            return result
    if not _disjoint(models):
        return CheckResult.failed("model disjointness", "two models share a vertex")
    return CheckResult.passed()


#region Trials
def trial_smalldeg(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 31))
    a = int(rng.integers(1, 4))
    g = random_gnp(n, float(rng.uniform(0.05, 0.6)), seed)
    if g.m == 0:
        return CheckResult.passed()
    low = low_degree_vertices(g, a)
    if a * popcount(low) <= (a - 1) * n:
        return CheckResult.failed("count", f"{popcount(low)} low-degree vertices of {n}, a = {a}")
    if 2 * g.m >= 2 * degeneracy(g).value * n:
        return CheckResult.failed("average degree", "average degree reaches twice the degeneracy")
    return CheckResult.passed()


def trial_tree_cut(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    t = random_ternary_tree(int(rng.integers(1, 61)), seed)
    k = int(rng.integers(2, 4))
    x = 0
    for v in t.vertices:
        if rng.random() < 0.6:
            x |= 1 << v
    cuts = tree_cut(t, x, k)
    if len(cuts) < popcount(x) // (2 * k - 1) - 1:
        return CheckResult.failed("count", f"{len(cuts)} subtrees for |X| = {popcount(x)}, k = {k}")
    used = 0
    for cut in cuts:
        if cut & used:
            return CheckResult.failed("disjointness", "two subtrees overlap")
        if popcount(cut & x) < k:
            return CheckResult.failed("marked", f"subtree with {popcount(cut & x)} marked vertices")
        if not t.is_connected(cut):
            return CheckResult.failed("subtree", "cut is not connected")
        used |= cut
    return CheckResult.passed()


def trial_stiebitz(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    g = random_gnp(int(rng.integers(1, 41)), float(rng.uniform(0.05, 0.7)), seed)
    k = int(rng.integers(2, 5))
    partition = stiebitz_partition(g, k)
    result = partition.validate(g)
    if not result:
        return result
    bad = partition_violations(g, partition, k)
    if bad:
        return CheckResult.failed("internal degree", f"vertices {bad} below deg/k - 1")
    return CheckResult.passed()


def trial_erdos_szekeres(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    k, l = int(rng.integers(2, 6)), int(rng.integers(2, 6))
    seq = [int(v) for v in rng.permutation((k - 1) * (l - 1) + 1)]
    found = erdos_szekeres(seq, k, l)
    if list(found.indices) != sorted(set(found.indices)):
        return CheckResult.failed("indices", "indices are not strictly increasing")
    if [seq[i] for i in found.indices] != list(found.values):
        return CheckResult.failed("values", "values do not match the indices")
    pairs = list(zip(found.values, found.values[1:]))
    if found.direction == "increasing":
        if len(found) < k or any(a >= b for a, b in pairs):
            return CheckResult.failed("increasing", f"{list(found.values)} for k = {k}")
    elif len(found) < l or any(a <= b for a, b in pairs):
        return CheckResult.failed("decreasing", f"{list(found.values)} for l = {l}")
    return CheckResult.passed()


def trial_path_tree(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    t = random_ternary_tree(int(rng.integers(1, 61)), seed)
    x = low_degree_set(t)
    walk = long_path(t)
    if len(walk) - 1 < 2 * math.log2(2 * popcount(x) / 3):
        return CheckResult.failed("length", f"path of length {len(walk) - 1} for |X| = {popcount(x)}")
    partition = path_partition(t, walk)
    result = partition.validate(t)
    if not result:
        return result
    for u, part in zip(walk, partition.parts):
        if popcount(part & ~(1 << u) & mask_of(walk)) or not part >> u & 1:
            return CheckResult.failed("one path vertex", f"part of {u} holds another path vertex")
        if not part & x:
            return CheckResult.failed("low-degree member", f"part of {u} has no vertex of degree <= 2")
    return CheckResult.passed()


def trial_independent(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    k, r = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    b, left = planted_bipartite_multigraph(k, r, seed)
    edges = disjoint_multiedges(b, k, r, left)
    if len(edges) != k:
        return CheckResult.failed("count", f"{len(edges)} multiedges, expected {k}")
    ends = [v for e in edges for v in e]
    if len(set(ends)) != len(ends):
        return CheckResult.failed("disjointness", f"{edges} share a vertex")
    if any(b.multiplicity(u, v) < r for u, v in edges):
        return CheckResult.failed("multiplicity", f"some multiedge of {edges} is lighter than {r}")
    return CheckResult.passed()


def trial_big_degec(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    base, k, r = [(5, 1, 2), (9, 2, 2), (5, 1, 1)][int(rng.integers(3))]
    extra = int(rng.integers(0, 3))
    edges = [(u, v) for u, v in complete(base).edges]
    edges += [(int(rng.integers(base)), base + i) for i in range(extra)]
    perm = random_permutation(base + extra, seed)
    g = Graph.from_edges(base + extra, edges).permuted(perm)
    return _models_ok(extract_k2r_from_degeneracy(g, k, r), k)


def trial_pw2_xi(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    h, _ = random_pw2(int(rng.integers(1, 10)), seed)
    return verify_model(check_pw2_minor_of_xi(h))


def trial_twk2r(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    r = int(rng.integers(2, 4))
    g = random_gnp(int(rng.integers(1, 13)), float(rng.uniform(0.1, 0.5)), seed)
    width, _ = treewidth_exact(g)
    if width > 2 * r - 3 and not has_minor(g, complete_bipartite(2, r)):
        return CheckResult.failed("treewidth", f"no K_{{2,{r}}} minor but treewidth {width}")
    return CheckResult.passed()


def trial_mesh_tiny(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    p, q = [(1, 1), (2, 1), (1, 2)][int(rng.integers(3))]
    g, w = planted_mesh(p, q, seed)
    result = verify_mesh(g, w)
    if not result:
        return result
    linkage = mesh_to_linkage(g, w, p, q)
    if len(linkage.terminal_sets) != 2 * q or len(linkage.paths) < p * q:
        return CheckResult.failed("linkage size", f"{len(linkage.terminal_sets)} sets, {len(linkage.paths)} paths")
    result = verify_linkage(g, linkage, p)
    if not result:
        return result
    broken, bad = planted_mesh(p, q, seed, broken=True)
    if verify_mesh(broken, bad):
        return CheckResult.failed("broken mesh", "a mesh with a missing spoke passed verification")
    if (p, q) == (1, 1):
        found = find_mesh(g, 1, 3)
        if found is None or not verify_mesh(g, found):
            return CheckResult.failed("find_mesh", "no verified 1-mesh of order 3 found")
    return CheckResult.passed()


def _pack_host(rng, seed: int):
    if rng.random() < 0.5:
        return random_gnp(int(rng.integers(3, 15)), float(rng.uniform(0.15, 0.35)), seed), complete(3)
    return random_gnp(int(rng.integers(5, 11)), float(rng.uniform(0.2, 0.4)), seed), complete_bipartite(2, 3)


def trial_pack_sep(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    g, h = _pack_host(rng, seed)
    width, td = treewidth_exact(g)
    sep = balanced_separation(g, h, make_nice(g, td))
    result = verify_separation(g, sep)
    if not result:
        return result
    if sep.pack_zero:
        return CheckResult.passed() if sep.a_set == sep.b_set == g.full else CheckResult.failed("pack zero")
    if sep.order > width + 1:
        return CheckResult.failed("order", f"separator of order {sep.order} for width {width}")
    side, _ = g.induced(sep.a_set & ~sep.b_set)
    inside = pack_exact(side, h)[0] if side.n else 0
    if 3 * inside > 2 * sep.pack_total:
        return CheckResult.failed("balance", f"pack(A - B) = {inside} > 2/3 of {sep.pack_total}")
    return CheckResult.passed()


def trial_sep_ep(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    g, h = _pack_host(rng, seed)
    trace = []
    cover = hitting_set_recursive(g, h, trace=trace)
    if has_minor(g, h, allowed=g.full & ~cover):
        return CheckResult.failed("cover", "a model survives the recursive hitting set")
    optimum, _ = cover_exact(g, h)
    if popcount(cover) < optimum:
        return CheckResult.failed("optimum", f"hitting set of size {popcount(cover)} below the optimum {optimum}")
    return CheckResult.passed()


def trial_pack_le_cover(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    g, h = _pack_host(rng, seed)
    packing, _ = pack_exact(g, h)
    covering, _ = cover_exact(g, h)
    if packing > covering:
        return CheckResult.failed("pack <= cover", f"pack {packing} > cover {covering}")
    k = int(rng.integers(1, 4))
    return verify_certificate(g, h, epgap_winwin(g, h, k), k)


def trial_pipelines_th1(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    k, r = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    constants = th1_constants(k, r)
    if not constants.identity_holds:
        return CheckResult.failed("constants", f"2 log2(2 r0 / 3) differs from (r-1)^2 + 1 for r = {r}")
    shape = "ternary" if rng.random() < 0.5 else "path"
    g, pl = planted_paired_linkage(k, r, seed, "xi", reverse=bool(rng.random() < 0.3), shape=shape)
    return _models_ok(pairs_to_xi_models(g, pl, r, k), k)


def trial_pipelines_th2(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    k, r = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    if rng.random() < 0.5:
        g, pl = planted_paired_linkage(k, r, seed, "k2r", shape="ternary" if rng.random() < 0.5 else "path")
    else:
        g, lw = planted_linkage(k, r, seed)
        pl = linkage_to_pairs(g, lw, k, r)
        result = verify_paired_linkage(g, pl)
        if not result:
            return result
    return _models_ok(pairs_to_k2r_models(g, pl, r, k), k)
#endregion


LEMMAS = {
    "smalldeg": (trial_smalldeg, "G(n, p), n in [2, 30], a in {1, 2, 3}"),
    "tree_cut": (trial_tree_cut, "random ternary trees n <= 60, random X, k in {2, 3}"),
    "stiebitz": (trial_stiebitz, "G(n, p), n <= 40, k in {2, 3, 4}"),
    "erdos_szekeres": (trial_erdos_szekeres, "random permutations of threshold length, k, l in {2..5}"),
    "path_tree": (trial_path_tree, "random ternary trees n <= 60, longest path and its partition"),
    "independent": (trial_independent, "planted circulant bipartite multigraphs, k <= 2, r <= 3"),
    "big_degec": (trial_big_degec, "K_5 (k=1, r=1|2) and K_9 (k=2, r=2) with pendants, permuted"),
    "pw2_xi": (trial_pw2_xi, "random pathwidth <= 2 graphs, n <= 9"),
    "twk2r": (trial_twk2r, "G(n, p), n <= 12, r in {2, 3}"),
    "mesh_tiny": (trial_mesh_tiny, "planted meshes (p, q) in {(1,1), (2,1), (1,2)} and broken variants"),
    "pack_sep": (trial_pack_sep, "K_3 in G(n<=14, p), K_{2,3} in G(n<=10, p)"),
    "sep_ep": (trial_sep_ep, "K_3 in G(n<=14, p), K_{2,3} in G(n<=10, p)"),
    "pack_le_cover": (trial_pack_le_cover, "K_3 in G(n<=14, p), K_{2,3} in G(n<=10, p), k in {1, 2, 3}"),
    "pipelines_th1": (trial_pipelines_th1, "planted paired linkages on paths and branched trees, k <= 2, r <= 3, some reversed"),
    "pipelines_th2": (trial_pipelines_th2, "planted linkages and paired linkages, k <= 2, r <= 3"),
}


def run_trial(trial, seed: int):
    """CheckResult, or None when the instance ran into a configured size limit."""
    try:
        return trial(seed)
    except SizeLimitError as e:
        log(f"trial {seed} skipped: {e}", 1)
        return None
    except EpgapError as e:
        return CheckResult.failed(e.clause or type(e).__name__, str(e))
    except Exception as e:
        return CheckResult.failed("exception", f"{type(e).__name__}: {e}")


def default_workers() -> int:
    return psutil.cpu_count(logical=True) or 1


def run_lemma(lemma: str, seed: int, trials: int, trial=None, workers: int | None = None) -> VerificationReport:
    trial = trial or LEMMAS[lemma][0]
    seeds = [derive_seed(seed, lemma, i) for i in range(trials)]
    start = time.perf_counter()
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers or default_workers()) as executor:
        # map keeps trial order whatever finishes first
        results = list(executor.map(lambda s: run_trial(trial, s), seeds))
    report = VerificationReport(lemma, trials, LEMMAS[lemma][1] if lemma in LEMMAS else "custom")
    for i, (trial_seed, result) in enumerate(zip(seeds, results)):
        if result is None:
            report.skipped += 1
        elif not result:
            report.failures.append(TrialFailure(i, trial_seed, result.clause, result.detail))
    report.runtime = time.perf_counter() - start
    level = 2 if report.passed else 4
    log(f"{lemma}: {trials - len(report.failures) - report.skipped}/{trials} passed, "
        f"{len(report.failures)} failed, {report.skipped} skipped", level)
    return report


def run_verification_suite(seed: int, trials: int, lemmas=None, overrides: dict | None = None,
                           workers: int | None = None) -> list:
    """One report per lemma id, in registry order. `overrides` swaps in other trial functions."""
    overrides = overrides or {}
    chosen = list(LEMMAS) if not lemmas else [lemma for lemma in LEMMAS if lemma in lemmas]
    unknown = set(lemmas or ()) - set(LEMMAS)
    if unknown:
        raise KeyError(f"unknown lemma ids: {sorted(unknown)}")
    reports = [run_lemma(lemma, seed, trials, overrides.get(lemma), workers) for lemma in chosen]
    cache.flush()
    return reports


def replay(lemma: str, trial_seed: int) -> CheckResult | None:
    """Rerun one recorded trial (None when it hits a size limit); a failure seed reproduces its failure."""
    if lemma not in LEMMAS:
        raise KeyError(f"unknown lemma id: {lemma}")
    return run_trial(LEMMAS[lemma][0], trial_seed)
