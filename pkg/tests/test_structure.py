#
#  test_structure.py
#
import unittest

from hypothesis import assume, given, settings, strategies as st

from errors import ParameterError, PreconditionError
from graph_core import (Graph, MultiGraph, complete, complete_bipartite, complete_ternary, cycle, lowest, path,
                        popcount, star)
from minors import verify_model
from planted import planted_bipartite_multigraph, planted_linkage, planted_mesh, planted_paired_linkage
from structure import (auxiliary_multigraph, check_pw2_minor_of_xi, disjoint_multiedges, erdos_szekeres,
                       extract_k2r_from_degeneracy, linkage_to_pairs, long_path, long_path_bound, low_degree_set,
                       low_degree_vertices, mesh_plus_threshold, mesh_to_linkage, normalize_terminal_tree,
                       pairs_to_k2r_models, pairs_to_xi_models, partition_violations, path_partition,
                       stiebitz_partition, th1_constants, tree_cut, verify_linkage, verify_paired_linkage)
from tests.strategies import distinct_sequences, graphs, graphs_with_edges, subsets, ternary_trees


def disjoint(models) -> bool:
    seen = 0
    for m in models:
        if m.support & seen:
            return False
        seen |= m.support
    return True


class TreeTests(unittest.TestCase):
    def test_tree_cut_on_a_path(self):
        cuts = tree_cut(path(7), path(7).full, 2)
        self.assertEqual(len(cuts), 3)
        self.assertTrue(all(popcount(c) == 2 for c in cuts))

    def test_tree_cut_rejects(self):
        with self.assertRaises(PreconditionError):
            tree_cut(cycle(4), 0b1111, 1)
        with self.assertRaises(PreconditionError):
            tree_cut(star(4), 0b11111, 1)
        with self.assertRaises(ParameterError):
            tree_cut(path(3), 0b111, 0)

    @settings(max_examples=60, deadline=None)
    @given(st.data(), st.integers(1, 4))
    def test_tree_cut_properties(self, data, k):
        t = data.draw(ternary_trees())
        x = data.draw(subsets(t))
        cuts = tree_cut(t, x, k)
        used = 0
        for cut in cuts:
            self.assertFalse(cut & used)
            self.assertTrue(k <= popcount(cut & x) <= 2 * k - 1)
            self.assertTrue(t.is_connected(cut))
            used |= cut
        self.assertGreaterEqual(len(cuts) * (2 * k - 1), popcount(x) - (k - 1))

    def test_long_path_in_complete_ternary(self):
        for h in range(1, 5):
            t = complete_ternary(h)
            walk = long_path(t)
            self.assertEqual(len(walk) - 1, 2 * h)
            self.assertAlmostEqual(long_path_bound(t), 2 * h)

    @settings(max_examples=60, deadline=None)
    @given(ternary_trees())
    def test_long_path_bound(self, t):
        walk = long_path(t)
        self.assertGreaterEqual(len(walk) - 1 + 1e-9, long_path_bound(t))
        self.assertTrue(all(t.has_edge(a, b) for a, b in zip(walk, walk[1:])))

    def test_low_degree_set(self):
        self.assertEqual(low_degree_set(star(3)), 0b1110)
        self.assertEqual(low_degree_set(path(4)), 0b1111)

    def test_path_partition(self):
        t = star(3)
        partition = path_partition(t, [1, 0, 2])
        self.assertEqual(partition.parts, (0b0010, 0b1001, 0b0100))
        self.assertTrue(partition.validate(t))
        self.assertEqual(partition.part_of(3), 1)
        with self.assertRaises(PreconditionError):
            path_partition(t, [1, 2])

    def test_normalize_terminal_tree(self):
        normalized = normalize_terminal_tree(path(5), 0b10001)
        self.assertEqual((normalized.tree.n, normalized.tree.m), (2, 1))
        self.assertEqual(normalized.rep, (0, 4))
        self.assertEqual(normalized.groups, (0b01111, 0b10000))

        normalized = normalize_terminal_tree(star(3), 0b1110)
        self.assertEqual(normalized.tree, star(3))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_normalize_branched_trees(self, data):
        t = data.draw(ternary_trees())
        terminals = data.draw(subsets(t))
        assume(terminals)
        normalized = normalize_terminal_tree(t, terminals)
        tree = normalized.tree
        self.assertTrue(tree.is_tree())
        covered = 0
        for v, group in enumerate(normalized.groups):
            self.assertLessEqual(popcount(group & terminals), 1)
            self.assertTrue(t.is_connected(group))
            covered |= group
            if not group & terminals:
                self.assertGreaterEqual(tree.degree(v), 3)
            else:
                self.assertEqual(normalized.rep[v], lowest(group & terminals))
            if tree.n > 1 and tree.degree(v) <= 1:
                self.assertTrue(group & terminals)
        self.assertEqual(covered & terminals, terminals)


class PartitionTests(unittest.TestCase):
    def test_k4(self):
        g = complete(4)
        partition = stiebitz_partition(g, 2)
        self.assertTrue(partition.validate(g))
        self.assertEqual(partition_violations(g, partition, 2), [])

    def test_bad_k(self):
        with self.assertRaises(ParameterError):
            stiebitz_partition(path(3), 0)

    @settings(max_examples=50, deadline=None)
    @given(graphs(max_n=14), st.integers(1, 4))
    def test_internal_degree(self, g, k):
        partition = stiebitz_partition(g, k)
        self.assertTrue(partition.validate(g))
        self.assertEqual(len(partition.parts), k)
        self.assertEqual(partition_violations(g, partition, k), [])

    def test_low_degree_examples(self):
        self.assertEqual(low_degree_vertices(star(4), 1), 0b11110)
        self.assertEqual(low_degree_vertices(complete(4), 1), 0b1111)
        with self.assertRaises(PreconditionError):
            low_degree_vertices(Graph.empty(3), 1)

    @settings(max_examples=50, deadline=None)
    @given(graphs_with_edges(max_n=14), st.integers(1, 4))
    def test_low_degree_count(self, g, a):
        self.assertGreater(a * popcount(low_degree_vertices(g, a)), (a - 1) * g.n)


class SequenceTests(unittest.TestCase):
    def test_examples(self):
        found = erdos_szekeres([2, 4, 1, 5, 3], 3, 3)
        self.assertEqual(found.direction, "increasing")
        self.assertEqual(found.values, (2, 4, 5))
        self.assertEqual(found.indices, (0, 1, 3))

        found = erdos_szekeres([5, 4, 3, 2, 1], 3, 3)
        self.assertEqual(found.direction, "decreasing")
        self.assertEqual(found.values, (5, 4, 3))

    def test_rejects(self):
        with self.assertRaises(PreconditionError) as caught:
            erdos_szekeres([1, 2, 3], 3, 3)
        self.assertEqual(caught.exception.clause, "length")
        with self.assertRaises(PreconditionError):
            erdos_szekeres([1, 1, 2, 3, 4], 3, 3)
        with self.assertRaises(ParameterError):
            erdos_szekeres([1], 0, 1)

    @settings(max_examples=100, deadline=None)
    @given(distinct_sequences(), st.integers(1, 6), st.integers(1, 6))
    def test_monotone(self, seq, k, l):
        if len(seq) < (k - 1) * (l - 1) + 1:
            return
        found = erdos_szekeres(seq, k, l)
        self.assertEqual(list(found.indices), sorted(set(found.indices)))
        self.assertEqual([seq[i] for i in found.indices], list(found.values))
        pairs = list(zip(found.values, found.values[1:]))
        if found.direction == "increasing":
            self.assertEqual(len(found), k)
            self.assertTrue(all(a < b for a, b in pairs))
        else:
            self.assertEqual(len(found), l)
            self.assertTrue(all(a > b for a, b in pairs))


class MultiedgeTests(unittest.TestCase):
    def test_planted(self):
        for k, r in ((1, 1), (1, 2), (2, 2), (2, 3)):
            for seed in range(3):
                b, left = planted_bipartite_multigraph(k, r, seed)
                edges = disjoint_multiedges(b, k, r, left)
                self.assertEqual(len(edges), k)
                ends = [v for e in edges for v in e]
                self.assertEqual(len(set(ends)), 2 * k)
                self.assertTrue(all(b.multiplicity(u, v) >= r for u, v in edges))

    def test_sides_must_match(self):
        b = MultiGraph.from_edges(3, [(0, 1), (0, 2)])
        with self.assertRaises(PreconditionError) as caught:
            disjoint_multiedges(b, 1, 1)
        self.assertEqual(caught.exception.clause, "sides")

    def test_not_bipartite(self):
        b = MultiGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        with self.assertRaises(PreconditionError):
            disjoint_multiedges(b, 1, 1)


class ExtractionTests(unittest.TestCase):
    def test_k2r_from_complete_graphs(self):
        models = extract_k2r_from_degeneracy(complete(5), 1, 2)
        self.assertEqual(len(models), 1)
        self.assertTrue(verify_model(models[0]))

        models = extract_k2r_from_degeneracy(complete(9), 2, 2)
        self.assertEqual(len(models), 2)
        self.assertTrue(all(verify_model(m) for m in models))
        self.assertTrue(disjoint(models))

    def test_k2r_needs_dense_minor(self):
        with self.assertRaises(PreconditionError):
            extract_k2r_from_degeneracy(cycle(6), 1, 2)

    def test_pw2_patterns_embed_in_xi(self):
        for h in (path(5), cycle(4), star(3), complete_bipartite(2, 3)):
            model = check_pw2_minor_of_xi(h)
            self.assertTrue(verify_model(model))
            self.assertEqual(model.host.n, 3 * h.n)

    def test_pathwidth_three_is_rejected(self):
        with self.assertRaises(PreconditionError) as caught:
            check_pw2_minor_of_xi(complete(4))
        self.assertEqual(caught.exception.clause, "pathwidth")


class LinkageTests(unittest.TestCase):
    def test_mesh_to_linkage(self):
        for p, q in ((1, 1), (2, 1)):
            g, witness = planted_mesh(p, q, 5)
            linkage = mesh_to_linkage(g, witness, p, q)
            self.assertEqual(len(linkage.terminal_sets), 2 * q)
            self.assertGreaterEqual(len(linkage.paths), p * q)
            self.assertTrue(verify_linkage(g, linkage, p))

    def test_mesh_too_small(self):
        g, witness = planted_mesh(1, 1, 5)
        with self.assertRaises(PreconditionError):
            mesh_to_linkage(g, witness, 2, 1)

    def test_linkage_to_pairs(self):
        for p, q in ((1, 1), (1, 2), (2, 1)):
            g, linkage = planted_linkage(p, q, 9)
            self.assertTrue(verify_linkage(g, linkage, q))
            aux = auxiliary_multigraph(linkage)
            self.assertEqual(aux.n, len(linkage.terminal_sets))
            paired = linkage_to_pairs(g, linkage, p, q)
            self.assertEqual(len(paired.pairs), p)
            self.assertTrue(all(len(bundle) == q for bundle in paired.bundles))
            self.assertTrue(verify_paired_linkage(g, paired))

    def test_wrong_terminal_size(self):
        g, linkage = planted_linkage(1, 2, 0)
        self.assertEqual(verify_linkage(g, linkage, 3).clause, "terminal size")

    def test_pairs_to_xi(self):
        for r in (2, 3):
            for reverse in (False, True):
                g, paired = planted_paired_linkage(2, r, 4, mode="xi", reverse=reverse)
                models = pairs_to_xi_models(g, paired, r, 2)
                self.assertEqual(len(models), 2)
                self.assertTrue(all(verify_model(m) for m in models))
                self.assertTrue(disjoint(models))

    def test_pairs_to_k2r(self):
        g, paired = planted_paired_linkage(3, 3, 2, mode="k2r")
        models = pairs_to_k2r_models(g, paired, 3, 3)
        self.assertEqual(len(models), 3)
        self.assertTrue(all(verify_model(m) for m in models))
        self.assertTrue(disjoint(models))
        with self.assertRaises(PreconditionError):
            pairs_to_k2r_models(g, paired, 4, 3)

    def test_pairs_to_xi_on_branched_trees(self):
        for r in (2, 3):
            for seed in range(4):
                g, paired = planted_paired_linkage(2, r, seed, mode="xi", shape="ternary")
                self.assertTrue(verify_paired_linkage(g, paired))
                self.assertTrue(any(popcount(tree[0]) > popcount(x)
                                    for pair, trees in zip(paired.pairs, paired.trees)
                                    for x, tree in zip(pair, trees)))
                models = pairs_to_xi_models(g, paired, r, 2)
                self.assertEqual(len(models), 2)
                self.assertTrue(all(verify_model(m) for m in models))
                self.assertTrue(disjoint(models))

    def test_pairs_to_k2r_on_branched_trees(self):
        g, paired = planted_paired_linkage(2, 3, 6, mode="k2r", shape="ternary")
        models = pairs_to_k2r_models(g, paired, 3, 2)
        self.assertTrue(all(verify_model(m) for m in models))
        self.assertTrue(disjoint(models))

    def test_unknown_shape(self):
        with self.assertRaises(ParameterError):
            planted_paired_linkage(1, 2, 0, shape="star")


class ThresholdTests(unittest.TestCase):
    def test_th1_constants(self):
        for r in range(1, 11):
            constants = th1_constants(2, r)
            self.assertTrue(constants.identity_holds)
            self.assertEqual(constants.ordered_terminals, (r - 1) ** 2 + 1)
        self.assertEqual(th1_constants(1, 4).r0, 48)
        self.assertAlmostEqual(th1_constants(2, 3).k0, 2 * 2 ** 0.5)

    def test_mesh_plus_threshold(self):
        self.assertEqual(mesh_plus_threshold(1, 1), 13)


if __name__ == "__main__":
    unittest.main()
