"""Command-line driver.

Reports are flat ``key: value`` lines on stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 validation/verification/theory failure, 2 usage or
file errors.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from typing import Callable, TextIO

from eslab import io
from eslab.core import EventStructure
from eslab.domain import DEFAULT_MAX_CONFIGS, branching_degree, check_chopped_lattice, check_perspective_labelling, configurations
from eslab.errors import EsError, ExceedsCap, SizeLimitExceeded
from eslab.gen import FIXTURE_NAMES, KINDS, GenParams, fixture, generate
from eslab.graph import chordal_elimination, chromatic_exact, clique_number, dsatur_greedy, exact_limit, ortho_graph
from eslab.labelling import STRATEGIES, StratifyingFunction, label, optimal_stratifier, verify_labelling
from eslab.theory import FAIL, LemmaResult, verify_theory, verify_theory_random

# the triple check grows fast; larger domains report it as skipped
CHOPPED_LATTICE_LIMIT = 512


class _Out:
    def __init__(self, out: TextIO) -> None:
        self.out = out

    def __call__(self, key: str, value: object) -> None:
        if isinstance(value, bool):
            value = str(value).lower()
        self.out.write(f"{key}: {value}\n")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> EventStructure:
    return io.load_es(_read(path))


def _relation_counts(es: EventStructure, emit: _Out) -> None:
    n = len(es)
    conc = sum(
        1 for i in range(n) for j in range(i + 1, n) if es.concurrent(es.events[i], es.events[j])
    )
    emit("events", n)
    emit("covers", len(es.covers))
    emit("conflict_pairs", len(es.conflict))
    emit("minimal_conflicts", len(es.minimal_conflicts()))
    emit("concurrent_pairs", conc)
    emit("orthogonal_pairs", ortho_graph(es).num_edges())


def cmd_validate(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    emit("valid", True)
    _relation_counts(es, emit)
    return 0


def cmd_analyze(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    _relation_counts(es, emit)
    g = ortho_graph(es)
    emit("degree", clique_number(g))
    emit("width", es.width())
    emit("height", es.height())
    limit = args.max_events_exact if args.max_events_exact is not None else exact_limit()
    try:
        k, _ = chromatic_exact(g, args.exact_cap, limit)
        emit("chromatic", k)
        emit("chromatic_method", "exact")
    except (SizeLimitExceeded, ExceedsCap) as exc:
        emit("chromatic", "unknown")
        emit("chromatic_method", "bounds")
        emit("chromatic_reason", exc.kind)
        emit("chromatic_lower_bound", f"{clique_number(g)} (clique)")
        emit("chromatic_upper_bound", f"{dsatur_greedy(g).num_colors} (greedy)")
    return 0


def cmd_label(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    kwargs = {}
    if args.strategy == "stratified":
        h = {
            "height": StratifyingFunction.height,
            "predecessors": StratifyingFunction.strict_predecessors,
            "optimal": optimal_stratifier,
        }[args.stratifier](es)
        kwargs["h"] = h
    if args.strategy == "exact":
        kwargs["cap"] = args.exact_cap
    lab = label(es, args.strategy, **kwargs)
    bad = verify_labelling(es, lab)
    emit("strategy", lab.strategy)
    emit("alphabet_size", lab.alphabet_size)
    emit("letters_used", lab.letters_used())
    emit("verified", not bad)
    if args.output:
        _write(args.output, io.serialize_labels(lab))
        emit("output", args.output)
    else:
        for x in es.events:
            emit(f"label.{x}", lab[x])
    return 0 if not bad else 1


def cmd_check(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    labels = io.parse_labels(_read(args.labels))
    bad = verify_labelling(es, labels)
    emit("violations", len(bad))
    for x, y in bad:
        emit("violation", f"{x} {y}")
    emit("valid", not bad)
    return 0 if not bad else 1


def cmd_domain(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    d = configurations(es, args.max_configs)
    emit("configurations", len(d))
    emit("hasse_edges", len(d.hasse))
    bd = branching_degree(d)
    emit("branching_degree", bd)
    emit("degree", clique_number(ortho_graph(es)))
    status = 0
    if len(d) <= CHOPPED_LATTICE_LIMIT:
        report = check_chopped_lattice(d)
        emit("chopped_lattice", "ok" if not report else f"{len(report)} counterexamples")
        for entry in report[:20]:
            sys.stderr.write(f"chopped_lattice: {' '.join(entry)}\n")
        status |= bool(report)
    else:
        emit("chopped_lattice", f"skipped (more than {CHOPPED_LATTICE_LIMIT} configurations)")
    labels = None
    if args.labels:
        labels = io.parse_labels(_read(args.labels))
        report = check_perspective_labelling(d, es, labels)
        emit("perspective_violations", len(report))
        for entry in report:
            emit("perspective_violation", " ".join(entry))
        status |= bool(report)
    if args.dot:
        _write(args.dot, io.export_dot_domain(d, labels))
        emit("dot", args.dot)
    return status


def cmd_graph(args: argparse.Namespace, emit: _Out) -> int:
    es = _load(args.file)
    g = ortho_graph(es)
    emit("vertices", len(g))
    emit("edges", g.num_edges())
    emit("clique_number", clique_number(g))
    chordal, _ = chordal_elimination(g)
    emit("chordal", chordal)
    for a, b in g.edges():
        emit("edge", f"{a} {b}")
    if args.dot:
        _write(args.dot, io.export_dot_graph(es))
        emit("dot", args.dot)
    return 0


def cmd_gen(args: argparse.Namespace, emit: _Out) -> int:
    if args.kind == "fixture":
        es = fixture(args.name)
    else:
        es = generate(
            GenParams(
                args.events,
                args.seed,
                args.kind,
                args.degree_cap,
                args.conflict_density,
            )
        )
    text = io.serialize_es(es)
    if args.output:
        _write(args.output, text)
        emit("output", args.output)
        emit("events", len(es))
    else:
        emit.out.write(text)
    return 0


def cmd_verify_theory(args: argparse.Namespace, emit: _Out) -> int:
    results: list[LemmaResult]
    if args.random:
        results = verify_theory_random(args.count, args.events, args.seed)
    elif args.file:
        results = verify_theory(_load(args.file))
    else:
        raise _UsageError("verify-theory needs FILE or --random")
    for r in results:
        emit(r.name, r.status)
        if r.detail and r.status != "ok":
            sys.stderr.write(f"{r.name}: {r.detail}\n")
    return 1 if any(r.status == FAIL for r in results) else 0


class _UsageError(Exception):
    pass


def _nat(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _pos(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a ratio in [0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eslab", description="Event structures and nice labellings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate an .es file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="degree, width, height and labelling number")
    p.add_argument("file")
    p.add_argument("--exact-cap", type=_pos, default=16)
    p.add_argument("--max-events-exact", type=_nat, default=None,
                   help="vertex limit for the exact solver (default: ESLAB_EXACT_LIMIT or 64)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("label", help="compute a nice labelling")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--stratifier", choices=("height", "predecessors", "optimal"), default="height",
                   help="level map for --strategy stratified")
    p.add_argument("--exact-cap", type=_pos, default=16)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("check", help="verify a labelling file")
    p.add_argument("file")
    p.add_argument("--labels", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("domain", help="enumerate the configuration domain")
    p.add_argument("file")
    p.add_argument("--dot")
    p.add_argument("--labels")
    p.add_argument("--max-configs", type=_pos, default=DEFAULT_MAX_CONFIGS)
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("graph", help="the orthogonality graph")
    p.add_argument("file")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("gen", help="generate a structure or emit a fixture")
    gsub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        g = gsub.add_parser(kind)
        g.add_argument("--events", type=_nat, required=True)
        g.add_argument("--seed", type=_nat, required=True)
        g.add_argument("--degree-cap", type=_pos, default=3)
        g.add_argument("--conflict-density", type=_ratio, default=0.3)
        g.add_argument("-o", "--output")
        g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("fixture")
    g.add_argument("name", choices=FIXTURE_NAMES)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify-theory", help="run the lemma suite")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", action="store_true")
    p.add_argument("--count", type=_nat, default=50)
    p.add_argument("--events", type=_nat, default=30)
    p.add_argument("--seed", type=_nat, default=0)
    p.set_defaults(func=cmd_verify_theory)
    return parser


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    emit = _Out(stdout or sys.stdout)
    func: Callable[[argparse.Namespace, _Out], int] = args.func
    try:
        return func(args, emit)
    except EsError as exc:
        sys.stderr.write(f"{exc.kind}: {exc}\n")
        return 1
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"eslab: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"eslab: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
