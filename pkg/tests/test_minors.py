#
#  test_minors.py
#
import unittest
from itertools import product

from hypothesis import given, settings, strategies as st

from cache import clear
from errors import SizeLimitError
from graph_core import Graph, complete, complete_bipartite, cycle, grid, path, popcount, random_gnp, star, xi
from minors import (MinorModel, compose_models, connected_sets, enumerate_minimal_models, find_minor_model,
                    has_minor, minimal_supports, verify_model)
from tests.strategies import graphs


def brute_force_minor(host: Graph, pattern: Graph) -> bool:
    """Try every assignment of host vertices to pattern vertices (or to nothing)."""
    for labels in product(range(-1, pattern.n), repeat=host.n):
        sets = [0] * pattern.n
        for v, a in enumerate(labels):
            if a >= 0:
                sets[a] |= 1 << v
        if all(sets) and verify_model(MinorModel(pattern, host, tuple(sets))):
            return True
    return False


class FindMinorTests(unittest.TestCase):
    def test_examples(self):
        self.assertIsNone(find_minor_model(cycle(6), complete_bipartite(2, 3)))
        self.assertTrue(verify_model(find_minor_model(cycle(5), complete(3))))
        self.assertTrue(verify_model(find_minor_model(grid(3, 3), xi(3))))

    def test_allowed_restricts_the_host(self):
        g = complete(4)
        self.assertFalse(has_minor(g, complete(3), allowed=0b0011))
        model = find_minor_model(g, complete(3), allowed=0b1110)
        self.assertEqual(model.support, 0b1110)

    def test_size_limits(self):
        with self.assertRaises(SizeLimitError):
            find_minor_model(path(25), path(2))
        self.assertTrue(verify_model(find_minor_model(path(24), path(2))))
        with self.assertRaises(SizeLimitError):
            find_minor_model(path(20), path(11))

    def test_empty_pattern(self):
        self.assertTrue(has_minor(path(3), Graph.empty(0)))

    @settings(max_examples=40, deadline=None)
    @given(graphs(max_n=6), graphs(max_n=3))
    def test_agrees_with_brute_force(self, host, pattern):
        self.assertEqual(has_minor(host, pattern), brute_force_minor(host, pattern))

    @settings(max_examples=40, deadline=None)
    @given(graphs(min_n=2, max_n=9), st.data())
    def test_subgraph_is_a_minor(self, g, data):
        keep = [e for e in g.edges if data.draw(st.booleans())]
        sub = Graph.from_edges(g.n, keep)
        isolated = [v for v in sub.vertices if sub.degree(v) == 0]
        sub, _ = sub.delete_vertices(sum(1 << v for v in isolated[1:]))
        if sub.n <= 10:
            self.assertTrue(verify_model(find_minor_model(g, sub)))


class VerifyModelTests(unittest.TestCase):
    def setUp(self):
        self.host = complete(4)
        self.pattern = complete(3)

    def test_valid(self):
        self.assertTrue(verify_model(MinorModel(self.pattern, self.host, (0b0001, 0b0010, 0b1100))))

    def test_disjointness(self):
        result = verify_model(MinorModel(self.pattern, self.host, (0b0011, 0b0010, 0b0100)))
        self.assertEqual(result.clause, "disjointness")

    def test_connectivity(self):
        host = path(4)
        result = verify_model(MinorModel(path(2), host, (0b1001, 0b0010)))
        self.assertEqual(result.clause, "connectivity")

    def test_edge_realisation(self):
        host = path(4)
        result = verify_model(MinorModel(path(2), host, (0b0001, 0b0100)))
        self.assertEqual(result.clause, "edge realisation")

    def test_bijection(self):
        result = verify_model(MinorModel(self.pattern, self.host, (0b0001, 0b0010)))
        self.assertEqual(result.clause, "bijection")


class CompositionTests(unittest.TestCase):
    def test_transitivity(self):
        inner = find_minor_model(cycle(4), complete(3))
        outer = find_minor_model(grid(3, 3), cycle(4))
        composed = compose_models(inner, outer)
        self.assertTrue(verify_model(composed))
        self.assertEqual(composed.host, grid(3, 3))


class ConnectedSetTests(unittest.TestCase):
    def test_counts_on_a_path(self):
        # connected sets of P_4 through vertex 1: {1}, {0,1}, {1,2}, {0,1,2}, {1,2,3}, {0,1,2,3}
        found = list(connected_sets(path(4), 1, 0b1111, 4))
        self.assertEqual(len(found), 6)
        self.assertEqual(len(set(found)), 6)

    def test_size_cap(self):
        blocked = [False]
        found = list(connected_sets(star(4), 0, 0b11111, 2, blocked))
        self.assertTrue(all(popcount(s) <= 2 for s in found))
        self.assertTrue(blocked[0])


class MinimalModelTests(unittest.TestCase):
    def setUp(self):
        clear()

    def test_triangles_of_k4(self):
        family = enumerate_minimal_models(complete(4), complete(3))
        self.assertEqual(len(family), 4)
        self.assertFalse(family.truncated)
        self.assertTrue(all(popcount(s) == 3 for s in family.supports))

    def test_triangle_free(self):
        self.assertEqual(len(enumerate_minimal_models(complete_bipartite(3, 3), complete(3))), 0)

    def test_k23_has_one_support(self):
        family = enumerate_minimal_models(complete_bipartite(2, 3), complete_bipartite(2, 3))
        self.assertEqual(family.supports, (0b11111,))

    def test_cycle_supports_are_chordless_cycles(self):
        # the 5-wheel: five triangles through the hub plus the rim
        wheel = cycle(5).disjoint_union(Graph.empty(1)).with_edges([(5, v) for v in range(5)])
        supports = set(minimal_supports(wheel, complete(3)).supports)
        self.assertEqual(len(supports), 6)
        self.assertIn(0b011111, supports)

    def test_truncation_is_flagged(self):
        family = enumerate_minimal_models(complete(6), complete(3), limit=5)
        self.assertTrue(family.truncated)
        self.assertEqual(len(family), 5)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_supports_are_minimal(self, seed):
        g = random_gnp(8, 0.4, seed)
        supports = minimal_supports(g, complete(3)).supports
        for s in supports:
            for v in range(g.n):
                if s >> v & 1:
                    self.assertFalse(has_minor(g, complete(3), allowed=s & ~(1 << v)))
            self.assertFalse(any(t != s and t & ~s == 0 for t in supports))


if __name__ == "__main__":
    unittest.main()
