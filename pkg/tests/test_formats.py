#
#  test_formats.py
#
import json
import unittest

import networkx as nx
from hypothesis import given, settings

from epd import Certificate, CertificateKind, balanced_separation, bound_th1, epgap_winwin
from errors import Graph6ParseError, ParameterError
from formats.certificates import (bound_to_json, certificate_to_json, decomposition_to_json, dumps, graph_to_json,
                                  linkage_to_json, mesh_to_json, model_to_json, nice_to_json, paired_linkage_to_json,
                                  parse_pace_td, separation_to_json, write_pace_td)
from formats.graph_io import (GraphFormat, detect_format, parse_edgelist, parse_graph6, read_graph, write_dot,
                              write_edgelist, write_graph, write_graph6)
from graph_core import Graph, complete, complete_bipartite, cycle, disjoint_copies, graph_hash, grid, path, xi
from minors import find_minor_model
from planted import planted_linkage, planted_mesh, planted_paired_linkage
from tests.strategies import graphs
from width import make_nice, treewidth_exact, verify_decomposition


class Graph6Tests(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(parse_graph6("@"), Graph.empty(1))
        self.assertEqual(parse_graph6("C~"), complete(4))
        self.assertEqual(parse_graph6("A_"), path(2))
        self.assertEqual(write_graph6(complete(4)), "C~")
        self.assertEqual(write_graph6(Graph.empty(0)), "?")

    def test_header_and_whitespace(self):
        self.assertEqual(parse_graph6(">>graph6<<C~\n"), complete(4))

    def test_large_size_header(self):
        g = path(70)
        text = write_graph6(g)
        self.assertTrue(text.startswith("~"))
        self.assertEqual(parse_graph6(text), g)

    def test_errors_carry_offsets(self):
        with self.assertRaises(Graph6ParseError) as caught:
            parse_graph6("C\x10")
        self.assertEqual(caught.exception.offset, 1)
        with self.assertRaises(Graph6ParseError) as caught:
            parse_graph6("C~~")
        self.assertEqual(caught.exception.offset, 2)
        with self.assertRaises(Graph6ParseError) as caught:
            parse_graph6("A`")
        self.assertEqual(caught.exception.offset, 1)
        with self.assertRaises(Graph6ParseError):
            parse_graph6("")
        with self.assertRaises(Graph6ParseError) as caught:
            parse_graph6(">>graph6<<C!")
        self.assertEqual(caught.exception.offset, 11)

    @settings(max_examples=200, deadline=None)
    @given(graphs(max_n=30))
    def test_matches_networkx(self, g):
        text = write_graph6(g)
        self.assertEqual(text, nx.to_graph6_bytes(g.to_networkx(), header=False).decode().strip())
        self.assertEqual(parse_graph6(text), g)


class EdgeListTests(unittest.TestCase):
    def test_round_trip(self):
        g = grid(2, 3)
        self.assertEqual(parse_edgelist(write_edgelist(g)), g)
        self.assertEqual(parse_edgelist("3 2\n# comment\n0 1\n1 2\n"), path(3))

    def test_errors(self):
        with self.assertRaises(ParameterError):
            parse_edgelist("3 3\n0 1\n1 2\n")
        with self.assertRaises(ParameterError):
            parse_edgelist("0 1 2\n")
        with self.assertRaises(ParameterError):
            parse_edgelist("2 1\n0 x\n")

    def test_detection(self):
        self.assertIs(detect_format("3 2\n0 1\n1 2\n"), GraphFormat.EDGELIST)
        self.assertIs(detect_format("C~\n"), GraphFormat.GRAPH6)
        self.assertEqual(read_graph("C~\n"), complete(4))
        self.assertEqual(read_graph(write_edgelist(xi(3))), xi(3))

    def test_write_graph(self):
        self.assertEqual(write_graph(complete(4)), "C~\n")
        self.assertEqual(write_graph(complete(4), "edgelist"), write_edgelist(complete(4)))
        dot = write_dot(Graph.empty(1).disjoint_union(path(2)))
        self.assertIn("0;", dot)
        self.assertIn("1 -- 2;", dot)
        with self.assertRaises(ValueError):
            write_graph(complete(4), "gml")


class CertificateJsonTests(unittest.TestCase):
    def test_graph_json(self):
        data = graph_to_json(xi(3))
        self.assertEqual(data["n"], 9)
        self.assertEqual(data["hash"], graph_hash(xi(3)))
        self.assertEqual(parse_graph6(data["graph6"]), xi(3))

    def test_model_json(self):
        model = find_minor_model(complete(4), complete(3))
        data = json.loads(dumps(model_to_json(model)))
        self.assertEqual(sorted(data["branch_sets"]), ["0", "1", "2"])
        self.assertEqual(data["branch_sets"]["1"], model.branch(1))
        self.assertEqual(data["pattern_hash"], graph_hash(complete(3)))
        self.assertEqual(data["support_size"], 3)
        self.assertEqual(data["host_hash"], graph_hash(complete(4)))

    def test_packing_certificate(self):
        h = complete_bipartite(2, 3)
        g = disjoint_copies(2, h)
        data = json.loads(dumps(certificate_to_json(epgap_winwin(g, h, 2), g, h)))
        self.assertEqual(data["type"], "packing")
        self.assertEqual(len(data["models"]), 2)
        self.assertNotIn("vertices", data)

    def test_cover_certificate(self):
        g, h = complete(4), complete(3)
        data = certificate_to_json(Certificate(CertificateKind.COVER, 2, cover=0b0011, treewidth=3), g, h)
        self.assertEqual(data["type"], "cover")
        self.assertEqual(data["vertices"], [0, 1])
        self.assertEqual(data["cover_size"], 2)

    def test_dumps_sorts_keys(self):
        self.assertEqual(dumps({"b": 1, "a": [2]}), '{"a": [2], "b": 1}')

    def test_bound_json(self):
        exact = bound_to_json(bound_th1(1, 6))
        self.assertEqual(exact["exact"], 3019825151)
        inexact = bound_to_json(bound_th1(3, 6))
        self.assertIsNone(inexact["exact"])
        self.assertIsInstance(inexact["ceiling"], int)

    def test_mesh_json(self):
        g, witness = planted_mesh(1, 1, 0)
        data = mesh_to_json(witness, g)
        self.assertEqual(data["graph_hash"], graph_hash(g))
        self.assertEqual(len(data["boundary"]), 3)
        self.assertEqual((data["order"], data["connectivity"]), (3, 1))

    def test_linkage_json(self):
        g, lw = planted_linkage(1, 1, 0)
        data = json.loads(dumps(linkage_to_json(lw, g)))
        self.assertEqual(data["graph_hash"], graph_hash(g))
        self.assertEqual((len(data["left"]), len(data["right"])), (4, 4))
        self.assertEqual(len(data["trees"]), 8)
        self.assertEqual(len(data["paths"]), 4)
        for path_ in data["paths"]:
            self.assertTrue(all(g.has_edge(u, v) for u, v in zip(path_, path_[1:])))
        self.assertEqual(data["tree_support"], sorted(v for side in data["left"] + data["right"] for v in side))

    def test_paired_linkage_json(self):
        g, paired = planted_paired_linkage(2, 3, 1, mode="xi", shape="ternary")
        data = json.loads(dumps(paired_linkage_to_json(paired, g)))
        self.assertEqual(data["graph_hash"], graph_hash(g))
        self.assertEqual(len(data["pairs"]), 2)
        for pair in data["pairs"]:
            self.assertEqual([len(s) for s in pair["sets"]], [5, 5])
            self.assertEqual(len(pair["paths"]), 5)
            for tree, terminals in zip(pair["trees"], pair["sets"]):
                self.assertTrue(set(terminals) <= set(tree["vertices"]))
                self.assertEqual(len(tree["edges"]), len(tree["vertices"]) - 1)

    def test_separation_json(self):
        h = complete(3)
        g = disjoint_copies(3, h)
        sep = balanced_separation(g, h)
        data = separation_to_json(sep, g)
        self.assertEqual(data["graph_hash"], graph_hash(g))
        self.assertEqual(sorted(set(data["a"]) | set(data["b"])), list(g.vertices))
        self.assertEqual(data["pack"], 3)

    def test_nice_json(self):
        g = cycle(5)
        _, td = treewidth_exact(g)
        ntd = make_nice(g, td)
        data = json.loads(dumps(nice_to_json(ntd)))
        self.assertEqual(data["width"], 2)
        self.assertEqual(len(data["kinds"]), len(data["bags"]))
        self.assertEqual(len(data["children"]), len(data["bags"]))
        self.assertEqual(data["bags"][data["root"]], [])


class PaceTests(unittest.TestCase):
    def test_round_trip(self):
        for g in (grid(3, 3), complete(5), path(4)):
            _, td = treewidth_exact(g)
            text = write_pace_td(g, td)
            self.assertTrue(text.startswith(f"s td {len(td.bags)} {td.width + 1} {g.n}"))
            parsed = parse_pace_td(text)
            self.assertEqual(parsed.bags, td.bags)
            self.assertTrue(verify_decomposition(g, parsed, declared_width=td.width))

    def test_json_shape(self):
        _, td = treewidth_exact(path(3))
        data = decomposition_to_json(td)
        self.assertEqual(data["width"], 1)
        self.assertEqual(len(data["tree_edges"]), len(data["bags"]) - 1)

    def test_missing_header(self):
        with self.assertRaises(ParameterError):
            parse_pace_td("b 1 1 2\n")


if __name__ == "__main__":
    unittest.main()
