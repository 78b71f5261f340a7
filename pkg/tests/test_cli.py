#
#  test_cli.py
#
import io
import json
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

from formats.graph_io import write_graph6
from graph_core import complete, complete_bipartite, cycle, disjoint_copies, graph_hash, path
from main import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def run(argv, stdin: str = ""):
    out, err = io.StringIO(), io.StringIO()
    with mock.patch("sys.stdin", io.StringIO(stdin)), redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


class BoundCommandTests(unittest.TestCase):
    def test_th2_value(self):
        self.assertEqual(run(["bound", "--theorem", "th2", "--k", "1", "--r", "2", "--value"]), (EXIT_OK, "67\n"))

    def test_th2_json(self):
        code, out = run(["bound", "--theorem", "th2", "--k", "2", "--r", "2"])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["value"], 259)

    def test_th1(self):
        _, out = run(["bound", "--theorem", "th1", "--k", "1", "--r", "6"])
        self.assertEqual(json.loads(out)["exact"], 3019825151)
        self.assertEqual(run(["bound", "--theorem", "th1", "--k", "1", "--r", "5"])[0], EXIT_USAGE)

    def test_missing_parameter(self):
        self.assertEqual(run(["bound", "--theorem", "kost"])[0], EXIT_USAGE)
        self.assertEqual(run(["bound", "--theorem", "kost", "--t", "2", "--value"]), (EXIT_OK, "1296.0\n"))


class GraphCommandTests(unittest.TestCase):
    def test_gen_then_tw(self):
        code, graph = run(["gen", "--family", "xi", "--r", "5"])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(run(["tw", "--value"], stdin=graph), (EXIT_OK, "2\n"))
        self.assertEqual(run(["pw", "--value"], stdin=graph), (EXIT_OK, "2\n"))

    def test_gen_positional_and_edgelist(self):
        code, text = run(["gen", "--family", "grid", "3", "4", "--format", "edgelist"])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(text.splitlines()[0], "12 17")

    def test_gen_missing_parameter(self):
        self.assertEqual(run(["gen", "--family", "complete_bipartite", "--p", "2"])[0], EXIT_USAGE)

    def test_tw_json_and_td(self):
        code, out = run(["tw"], stdin=write_graph6(complete(4)) + "\n")
        data = json.loads(out)
        self.assertEqual((code, data["width"], data["verified"]["ok"]), (EXIT_OK, 3, True))
        code, out = run(["tw", "--td"], stdin=write_graph6(complete(4)) + "\n")
        self.assertEqual(out.splitlines()[0].split()[3:], ["4", "4"])

    def test_tw_nice(self):
        code, out = run(["tw", "--nice"], stdin=write_graph6(cycle(4)) + "\n")
        nice = json.loads(out)["nice"]
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(nice["verified"]["ok"])
        self.assertEqual(nice["bags"][nice["root"]], [])

    def test_sep(self):
        g = disjoint_copies(3, complete(3))
        code, out = run(["sep", "--pattern", "complete 3"], stdin=write_graph6(g))
        data = json.loads(out)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(data["verified"]["ok"])
        self.assertEqual(data["separation"]["graph_hash"], graph_hash(g))
        self.assertEqual(data["separation"]["pack"], 3)

    def test_minor(self):
        code, out = run(["minor", "--pattern", "complete_bipartite 2 3"], stdin=write_graph6(path(6)))
        self.assertEqual(code, EXIT_OK)
        self.assertFalse(json.loads(out)["has_minor"])

    def test_pack_and_cover(self):
        graph = write_graph6(complete(6))
        self.assertEqual(run(["pack", "--pattern", "complete 3", "--value"], stdin=graph), (EXIT_OK, "2\n"))
        code, out = run(["cover", "--pattern", "complete 3"], stdin=write_graph6(complete(5)))
        self.assertEqual(json.loads(out)["cover"], 3)

    def test_epgap(self):
        h = complete_bipartite(2, 3)
        code, out = run(["epgap", "--pattern", write_graph6(h), "--k", "2"],
                        stdin=write_graph6(disjoint_copies(2, h)))
        data = json.loads(out)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(data["type"], "packing")
        self.assertTrue(data["verified"]["ok"])

        code, out = run(["epgap", "--pattern", "complete_bipartite 2 3", "--k", "2"], stdin=write_graph6(h))
        self.assertEqual(json.loads(out)["cover_size"], 1)


class ExitCodeTests(unittest.TestCase):
    def test_size_limit(self):
        self.assertEqual(run(["tw"], stdin=write_graph6(path(25)))[0], EXIT_USAGE)

    def test_bad_graph6(self):
        self.assertEqual(run(["tw"], stdin="C~~\n")[0], EXIT_USAGE)

    def test_unknown_flag(self):
        with self.assertRaises(SystemExit) as caught:
            run(["bound", "--theorem", "th2", "--colour"])
        self.assertEqual(caught.exception.code, 2)

    def test_no_command(self):
        self.assertEqual(run([])[0], EXIT_USAGE)

    def test_verify(self):
        code, out = run(["verify", "--lemma", "stiebitz", "--trials", "20", "--seed", "7", "--workers", "2"])
        self.assertEqual(code, EXIT_OK)
        reports = json.loads(out)["reports"]
        self.assertEqual([r["failure_count"] for r in reports], [0])

    def test_verify_unknown_lemma(self):
        self.assertEqual(run(["verify", "--lemma", "nope", "--trials", "1"])[0], EXIT_USAGE)

    def test_replay(self):
        code, out = run(["replay", "--lemma", "erdos_szekeres", "--trial-seed", "12345"])
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["result"]["ok"])

    def test_config_rejects_unknown_key(self):
        self.assertEqual(run(["config", "no_such_key", "3"])[0], EXIT_USAGE)

    def test_exit_constants(self):
        self.assertEqual((EXIT_OK, EXIT_VIOLATION, EXIT_USAGE), (0, 1, 2))


if __name__ == "__main__":
    unittest.main()
