#
# main.py
#
__VERSION__ = "0.3"

import argparse
import sys
import unittest

from rich import box
from rich.rule import Rule
from rich.table import Table

import cache
from util import SETTINGS_FILE, console, get_settings, log, modify_json

DILL_AVAILABLE = True
try:
    import dill  # noqa: F401
except ModuleNotFoundError:
    DILL_AVAILABLE = False

HYPOTHESIS_AVAILABLE = True
try:
    import hypothesis  # noqa: F401
except ModuleNotFoundError:
    HYPOTHESIS_AVAILABLE = False

from epd import (CertificateKind, balanced_separation, bound_th1, bound_th2, cover_exact, epgap_winwin,
                 kostochka_threshold, pack_exact, verify_certificate, verify_separation)
from errors import EpgapError, ParameterError
from formats.certificates import (bound_to_json, certificate_to_json, decomposition_to_json, dumps, graph_to_json,
                                  model_to_json, nice_to_json, separation_to_json, vertex_list, write_pace_td)
from formats.graph_io import parse_graph6, read_graph, write_graph
from graph_core import FAMILIES, disjoint_copies, generate, parse_family
from minors import find_minor_model
from width import make_nice, pathwidth_exact, treewidth_exact, verify_decomposition, verify_nice

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

# parameter names of each family, in call order
FAMILY_ARGS = {
    "complete": ("n",),
    "complete_bipartite": ("p", "q"),
    "xi": ("r",),
    "cycle": ("n",),
    "path": ("n",),
    "star": ("n",),
    "grid": ("p", "q"),
    "complete_ternary": ("h",),
    "random_gnp": ("n", "prob", "seed"),
    "random_ternary_tree": ("n", "seed"),
    "random_pw2": ("n", "seed"),
}


def check_dependencies():
    if DILL_AVAILABLE:
        log("[bold]dill[/bold] found, the support cache can be saved to disk", 1)
    else:
        log("[bold]dill[/bold] was not found! The support cache will only live in memory.", 3)
    if not HYPOTHESIS_AVAILABLE:
        log("[bold]hypothesis[/bold] was not found! [bold]run_tests[/bold] will skip the property tests.", 3)


#region Helpers
def emit(data, args):
    print(dumps(data, pretty=args.pretty))


def read_input_graph(args):
    if args.input:
        with open(args.input, "r") as fin:
            text = fin.read()
    else:
        text = sys.stdin.read()
    return read_graph(text)


def parse_pattern(text: str):
    """A family string such as "complete_bipartite 2 3", otherwise graph6."""
    first = text.split()[0] if text.split() else ""
    if first in FAMILIES:
        return parse_family(text)
    return parse_graph6(text)
#endregion


#region Commands
def cli_gen(args):
    if args.family == "disjoint_copies":
        if args.k is None or not args.base:
            raise ParameterError("disjoint_copies needs --k and --base", clause="family")
        g = disjoint_copies(args.k, parse_family(args.base))
    elif args.params:
        g = parse_family(" ".join([args.family, *args.params]))
    else:
        names = FAMILY_ARGS.get(args.family)
        if names is None:
            raise ParameterError(f"unknown graph family {args.family!r}", clause="family")
        values = [getattr(args, name) for name in names]
        missing = [name for name, value in zip(names, values) if value is None]
        if missing:
            raise ParameterError(f"{args.family} needs --{', --'.join(missing)}", clause="family")
        g = generate(args.family, *values)
    sys.stdout.write(write_graph(g, args.format))
    return EXIT_OK


def cli_tw(args):
    g = read_input_graph(args)
    width, td = treewidth_exact(g)
    return _report_width(args, g, width, td)


def cli_pw(args):
    g = read_input_graph(args)
    width, td = pathwidth_exact(g)
    return _report_width(args, g, width, td)


def _report_width(args, g, width, td):
    check = verify_decomposition(g, td, width)
    if args.value:
        print(width)
    elif args.td:
        sys.stdout.write(write_pace_td(g, td))
    else:
        data = {"graph": graph_to_json(g), "width": width, "decomposition": decomposition_to_json(td),
                "verified": check.to_json()}
        if args.nice and check:
            ntd = make_nice(g, td)
            check = verify_nice(g, ntd)
            data["nice"] = {**nice_to_json(ntd), "verified": check.to_json()}
        emit(data, args)
    return EXIT_OK if check else EXIT_VIOLATION


def cli_minor(args):
    g = read_input_graph(args)
    h = parse_pattern(args.pattern)
    model = find_minor_model(g, h)
    emit({"host": graph_to_json(g), "pattern": graph_to_json(h), "has_minor": model is not None,
          "model": model_to_json(model) if model else None}, args)
    return EXIT_OK


def cli_pack(args):
    g = read_input_graph(args)
    h = parse_pattern(args.pattern)
    count, models = pack_exact(g, h)
    if args.value:
        print(count)
    else:
        emit({"host": graph_to_json(g), "pattern": graph_to_json(h), "pack": count,
              "models": [model_to_json(m) for m in models]}, args)
    return EXIT_OK


def cli_cover(args):
    g = read_input_graph(args)
    h = parse_pattern(args.pattern)
    size, cover = cover_exact(g, h)
    if args.value:
        print(size)
    else:
        emit({"host": graph_to_json(g), "pattern": graph_to_json(h), "cover": size,
              "vertices": vertex_list(cover)}, args)
    return EXIT_OK


def cli_epgap(args):
    g = read_input_graph(args)
    h = parse_pattern(args.pattern)
    cert = epgap_winwin(g, h, args.k)
    check = verify_certificate(g, h, cert, args.k)
    data = certificate_to_json(cert, g, h)
    data["verified"] = check.to_json()
    emit(data, args)
    if cert.kind is CertificateKind.COVER:
        log(f"cover of size {cert.cover_size} (fewer than {args.k} disjoint models)", 2)
    return EXIT_OK if check else EXIT_VIOLATION


def cli_sep(args):
    g = read_input_graph(args)
    h = parse_pattern(args.pattern)
    sep = balanced_separation(g, h)
    check = verify_separation(g, sep)
    emit({"graph": graph_to_json(g), "separation": separation_to_json(sep, g), "verified": check.to_json()}, args)
    return EXIT_OK if check else EXIT_VIOLATION


def cli_bound(args):
    def need(*names):
        missing = [name for name in names if getattr(args, name) is None]
        if missing:
            raise ParameterError(f"--theorem {args.theorem} needs --{', --'.join(missing)}", clause="bound")

    if args.theorem == "th1":
        need("k", "r")
        value = bound_th1(args.k, args.r)
        data = {"theorem": "th1", "k": args.k, "r": args.r, **bound_to_json(value)}
        number = value.ceiling
    elif args.theorem == "th2":
        need("k", "r")
        number = bound_th2(args.k, args.r, args.variant)
        data = {"theorem": "th2", "k": args.k, "r": args.r, "variant": args.variant, "value": number}
    else:
        need("t")
        number = kostochka_threshold(args.t)
        data = {"theorem": "kost", "t": args.t, "value": number}
    if args.value:
        print(number)
    else:
        emit(data, args)
    return EXIT_OK


def _report_table(reports):
    table = Table("Lemma", "Trials", "Failures", "Skipped", title="Verification Results", box=box.ROUNDED)
    for report in reports:
        colour = "green" if report.passed else "red"
        table.add_row(report.lemma, str(report.trials), f"[{colour}]{len(report.failures)}", str(report.skipped))
    console.print(table)


def cli_verify(args):
    from harness import run_verification_suite

    reports = run_verification_suite(args.seed, args.trials, lemmas=args.lemma, workers=args.workers)
    emit({"seed": args.seed, "trials": args.trials,
          "reports": [r.to_json(timings=args.timings) for r in reports]}, args)
    if args.pretty:
        _report_table(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cli_replay(args):
    from harness import replay

    result = replay(args.lemma, args.trial_seed)
    emit({"lemma": args.lemma, "seed": args.trial_seed, "skipped": result is None,
          "result": result.to_json() if result is not None else None}, args)
    return EXIT_OK if result is None or result else EXIT_VIOLATION


def cli_config(args):
    if args.key not in get_settings():
        raise ParameterError(f"unknown setting {args.key!r}", clause="config")
    value = None if args.value.lower() in ("none", "null") else args.value
    if value is not None:
        try:
            value = int(value)
        except ValueError:
            pass
    modify_json(SETTINGS_FILE, args.key, value)
    emit({args.key: value}, args)
    return EXIT_OK
#endregion


#region Tests
class _TableResult(unittest.TestResult):
    def __init__(self):
        super().__init__()
        self.successes = []

    def addSuccess(self, test):
        super().addSuccess(test)
        self.successes.append(test)


def run_selected_tests(test_names):
    loader = unittest.TestLoader()
    if test_names:
        suite = loader.loadTestsFromNames([name if name.startswith("tests.") else f"tests.{name}"
                                           for name in test_names])
    else:
        suite = loader.discover("tests", top_level_dir=".")

    result = _TableResult()
    suite.run(result)

    table = Table(title="Test Results", show_lines=True, highlight=True)
    table.add_column("Test Name", style="bold")
    table.add_column("Result", style="bold")

    for test in result.successes:
        table.add_row(str(test), "[green]PASS")

    for test, failure_message in result.failures:
        table.add_row(str(test), "[red]FAIL")
        table.add_row("", f"[red]Failure: {failure_message}")

    for test, error_message in result.errors:
        table.add_row(str(test), "[red]ERROR")
        table.add_row("", f"[red]Error: {error_message}")

    for test, _ in result.skipped:
        table.add_row(str(test), "[yellow]SKIPPED")

    console.print(table)
    return result.wasSuccessful()


def cli_run_tests(args):
    console.print(Rule(title="[dim white]Running tests..."), style="dim")
    return EXIT_OK if run_selected_tests(args.tests) else EXIT_VIOLATION
#endregion


def build_parser():
    arg_parser = argparse.ArgumentParser(
        prog="epgap",
        description="Exact packing / covering oracles, decompositions and the Erdős–Pósa extraction "
                    "pipelines for small graphs. JSON goes to standard output, diagnostics to standard error."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="Indent JSON and show tables")
    common.add_argument("--input", type=str, help="Read the graph from a file instead of standard input")

    subparsers = arg_parser.add_subparsers()

    gen_parser = subparsers.add_parser("gen", parents=[common], help="Generate a graph from a family")
    gen_parser.add_argument("--family", required=True, choices=sorted([*FAMILY_ARGS, "disjoint_copies"]))
    gen_parser.add_argument("params", nargs="*", help="Positional family parameters, e.g. 'gen --family grid 3 4'")
    for name in ("n", "p", "q", "r", "h", "k", "seed"):
        gen_parser.add_argument(f"--{name}", type=int)
    gen_parser.add_argument("--prob", type=float, help="Edge probability of random_gnp")
    gen_parser.add_argument("--base", type=str, help="Base family of disjoint_copies, e.g. 'complete 3'")
    gen_parser.add_argument("--format", default="graph6", choices=["graph6", "edgelist", "dot"])
    gen_parser.set_defaults(func=cli_gen)

    for name, func, about in (("tw", cli_tw, "Exact treewidth with a verified decomposition"),
                              ("pw", cli_pw, "Exact pathwidth with a verified path decomposition")):
        width_parser = subparsers.add_parser(name, parents=[common], help=about)
        width_parser.add_argument("--value", action="store_true", help="Print only the width")
        width_parser.add_argument("--td", action="store_true", help="Print the decomposition in PACE .td format")
        width_parser.add_argument("--nice", action="store_true", help="Add the nice form of the decomposition")
        width_parser.set_defaults(func=func)

    minor_parser = subparsers.add_parser("minor", parents=[common], help="Search a minor model of a pattern")
    minor_parser.add_argument("--pattern", required=True, help="Family string or graph6")
    minor_parser.set_defaults(func=cli_minor)

    for name, func, about in (("pack", cli_pack, "Exact packing number with disjoint models"),
                              ("cover", cli_cover, "Exact covering number with a hitting set")):
        oracle_parser = subparsers.add_parser(name, parents=[common], help=about)
        oracle_parser.add_argument("--pattern", required=True, help="Family string or graph6")
        oracle_parser.add_argument("--value", action="store_true", help="Print only the number")
        oracle_parser.set_defaults(func=func)

    epgap_parser = subparsers.add_parser("epgap", parents=[common], help="k disjoint models or a hitting set")
    epgap_parser.add_argument("--pattern", required=True, help="Connected pattern, family string or graph6")
    epgap_parser.add_argument("--k", type=int, required=True)
    epgap_parser.set_defaults(func=cli_epgap)

    sep_parser = subparsers.add_parser("sep", parents=[common], help="Balanced separation from a nice decomposition")
    sep_parser.add_argument("--pattern", required=True, help="Connected pattern, family string or graph6")
    sep_parser.set_defaults(func=cli_sep)

    bound_parser = subparsers.add_parser("bound", parents=[common], help="Evaluate a treewidth bound exactly")
    bound_parser.add_argument("--theorem", required=True, choices=["th1", "th2", "kost"])
    bound_parser.add_argument("--k", type=int)
    bound_parser.add_argument("--r", type=int)
    bound_parser.add_argument("--t", type=int, help="Clique size for kost")
    bound_parser.add_argument("--variant", default="statement", choices=["statement", "proof"])
    bound_parser.add_argument("--value", action="store_true", help="Print only the number")
    bound_parser.set_defaults(func=cli_bound)

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Run the seeded verification suite")
    verify_parser.add_argument("--lemma", action="append", help="Lemma id (repeatable, default: all)")
    verify_parser.add_argument("--trials", type=int, default=100)
    verify_parser.add_argument("--seed", type=int, default=42)
    verify_parser.add_argument("--workers", type=int, help="Worker threads (default: CPU count)")
    verify_parser.add_argument("--timings", action="store_true", help="Include runtimes in the reports")
    verify_parser.set_defaults(func=cli_verify)

    replay_parser = subparsers.add_parser("replay", parents=[common], help="Rerun one recorded trial")
    replay_parser.add_argument("--lemma", required=True)
    replay_parser.add_argument("--trial-seed", type=int, required=True, dest="trial_seed")
    replay_parser.set_defaults(func=cli_replay)

    config_parser = subparsers.add_parser("config", parents=[common], help="Change a setting in settings.json")
    config_parser.add_argument("key")
    config_parser.add_argument("value")
    config_parser.set_defaults(func=cli_config)

    tests_parser = subparsers.add_parser("run_tests", help="Run tests", description="Run tests")
    tests_parser.add_argument("tests", nargs="*", default=[])
    tests_parser.set_defaults(func=cli_run_tests)
    return arg_parser


def main(argv=None) -> int:
    arg_parser = build_parser()
    args = arg_parser.parse_args(argv)

    if not hasattr(args, "func"):
        arg_parser.print_usage(sys.stderr)
        log("You didn't provide a command!", 4)
        return EXIT_USAGE

    check_dependencies()
    try:
        return args.func(args)
    except (EpgapError, KeyError, OSError) as e:
        log(f"{type(e).__name__}: {e}", 4)
        return EXIT_USAGE
    finally:
        cache.flush()


if __name__ == "__main__":
    sys.exit(main())
