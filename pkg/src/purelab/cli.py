"""Command-line entry point.

Exit status: 0 when every check passed, 1 when a type error or a semantic
violation was found, 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .corpus import CorpusEntry, golden, load_dir, read_entry
from .encode import check_encoding
from .environment import BOOL_VAL, REF_CELL, EnvSpec
from .evaluator import evaluate, show_outcome
from .oracle import (
    DEFAULT_FUEL, DEFAULT_MAX_NODES, DEFAULT_STORE_BOUND, Bounds, check_effect_safety, obs_purity,
)
from .simple import read_annot_simple
from .suites import SUITES, compare
from .syntax import ParseError, parse_type, print_term
from .systems import SYSTEMS, judge
from .types import TypeCheckError

SCHEMA = "purelab.report/1"

OK, VIOLATION, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ inputs

def read_env(text: str) -> EnvSpec:
    """``a=ref, y=bool`` inline, or a JSON file mapping names to kinds."""
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read environment {text}: {exc}") from exc
        pairs = data.items() if isinstance(data, dict) else data
        kinds = {"ref": REF_CELL, "bool": BOOL_VAL, REF_CELL: REF_CELL, BOOL_VAL: BOOL_VAL}
        try:
            return EnvSpec(tuple((str(n), kinds[k]) for n, k in pairs))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad environment {text}: {exc}") from exc
    try:
        return EnvSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def load_input(args) -> CorpusEntry:
    """The term named on the command line, honoring in-file headers."""
    if args.expr is not None:
        text, path = args.expr, "<expr>"
    elif args.file is None:
        raise UsageError("no term: give a file, - for standard input, or -e TERM")
    elif args.file == "-":
        text, path = sys.stdin.read(), "<stdin>"
    else:
        try:
            text, path = Path(args.file).read_text(encoding="utf-8"), args.file
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from exc
    entry = read_entry(text, path)
    if getattr(args, "env", None) is not None:
        entry = CorpusEntry(entry.name, entry.source, entry.term, read_env(args.env), entry.hole, entry.expect, path)
    if getattr(args, "hole", None) is not None:
        hole = read_annot_simple(*parse_type(args.hole))
        entry = CorpusEntry(entry.name, entry.source, entry.term, entry.env, hole, entry.expect, path)
    return entry


def bounds_of(args) -> Bounds:
    return Bounds(args.max_nodes, args.fuel, args.store_bound)


# ---------------------------------------------------------------- commands

def cmd_typecheck(args) -> tuple[dict, int]:
    entry = load_input(args)
    systems = SYSTEMS if args.system == "all" else (args.system,)
    out, errors, status = {}, {}, OK
    for system in systems:
        try:
            out[system] = judge(system, entry.env, entry.term).judgment
        except TypeCheckError as exc:
            out[system] = None
            errors[system] = str(exc)
            status = VIOLATION
    report = {"term": print_term(entry.term), "env": str(entry.env), "judgments": out}
    if errors:
        report["errors"] = errors
    return report, status


def cmd_purity(args) -> tuple[dict, int]:
    entry = load_input(args)
    systems = SYSTEMS if args.system == "all" else (args.system,)
    out, status = {}, OK
    for system in systems:
        try:
            v = judge(system, entry.env, entry.term)
            out[system] = {"judgment": v.judgment, "pure": v.pure}
        except TypeCheckError as exc:
            out[system] = {"error": str(exc)}
            status = VIOLATION
    return {"term": print_term(entry.term), "env": str(entry.env), "verdicts": out}, status


def cmd_eval(args) -> tuple[dict, int]:
    entry = load_input(args)
    config = []
    init = dict(_assignment(item) for item in args.init or ())
    unknown = set(init) - entry.env.names
    if unknown:
        raise UsageError(f"--init names not in the environment: {sorted(unknown)}")
    for name, _ in entry.env.entries:
        config.append(init.get(name, False))
    values, store = entry.env.instantiate(config)
    steps: list[dict] = []
    tracer = (lambda rule, term, heap: steps.append({"rule": rule, "term": term, "store": heap})) if args.trace else None
    out = evaluate(values, store, entry.term, args.fuel, trace=tracer)
    report = {"term": print_term(entry.term), "env": entry.env.describe(config), "fuel": args.fuel,
              "outcome": show_outcome(out)}
    if args.trace:
        report["trace"] = steps
    return report, OK


def _assignment(item: str) -> tuple[str, bool]:
    name, _, value = item.partition("=")
    if value not in ("true", "false"):
        raise UsageError(f"--init expects name=true or name=false, got {item!r}")
    return name.strip(), value == "true"


def cmd_encode(args) -> tuple[dict, int]:
    entry = load_input(args)
    report = check_encoding(args.source, entry.env.context_for(args.source), entry.term)
    status = OK
    if report.source_judgment is None:
        status = VIOLATION
    elif args.check and not report.holds:
        status = VIOLATION
    return report.as_dict(), status


def cmd_oracle_purity(args) -> tuple[dict, int]:
    entry = load_input(args)
    try:
        verdict = obs_purity(entry.term, entry.env, bounds_of(args), entry.hole)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return {"term": print_term(entry.term), "env": str(entry.env), **verdict.as_dict()}, OK


def cmd_oracle_safety(args) -> tuple[dict, int]:
    entries = _corpus(args.corpus)
    cases, violations = [], 0
    for entry in entries:
        report = check_effect_safety(args.system, entry.env, [entry.term], bounds_of(args),
                                     restrict=args.restrict)
        for case in report.cases:
            cases.append({"path": entry.path, **case.as_dict()})
        violations += len(report.violations)
    return (
        {"system": args.system, "bounds": bounds_of(args).as_dict(), "terms": len(cases),
         "violations": violations, "cases": cases},
        VIOLATION if violations else OK,
    )


def _corpus(where: Optional[str], errors: Optional[list[dict]] = None) -> list[CorpusEntry]:
    if where is None:
        return golden()
    if not Path(where).is_dir():
        raise UsageError(f"not a directory: {where}")
    return load_dir(where, errors)


def cmd_compare(args) -> tuple[dict, int]:
    errors: list[dict] = []
    entries = _corpus(args.corpus, errors)
    report = {"inputs": [args.corpus or "<golden>"], **compare(entries, bounds_of(args)), "parseErrors": errors}
    if errors:
        return report, USAGE
    return report, VIOLATION if report["unsound"] or report["mismatches"] else OK


_COUNT_PARAM = {"evaluator": "samples", "algebra": "shapes"}


def cmd_suite(args) -> tuple[dict, int]:
    run = SUITES[args.name]
    kwargs: dict = {"seed": args.seed}
    if args.count is not None:
        kwargs[_COUNT_PARAM.get(args.name, "count")] = args.count
    if args.name == "safety":
        kwargs["bounds"] = bounds_of(args)
    elif args.name in ("reorder", "beta"):
        kwargs["fuel"] = args.fuel
        kwargs["store_bound"] = args.store_bound
    result = run(**kwargs)
    return result.as_dict(), OK if result.ok else VIOLATION


# ------------------------------------------------------------------ parser

def _term_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="term file, or - for standard input")
    p.add_argument("-e", "--expr", help="term given inline instead of a file")
    p.add_argument("--env", help="ambient variables, e.g. 'a=ref, y=bool', or a JSON file")


def _bound_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--store-bound", type=int, default=DEFAULT_STORE_BOUND)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    parser = argparse.ArgumentParser(prog="purelab", description="Purity checkers and a semantic purity oracle.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    systems = list(SYSTEMS) + ["all"]

    p = sub.add_parser("typecheck", parents=[common], help="print a term's judgment")
    _term_args(p)
    p.add_argument("--system", choices=systems, default="all")
    p.set_defaults(run=cmd_typecheck)

    p = sub.add_parser("purity", parents=[common], help="does a discipline deem the term pure")
    _term_args(p)
    p.add_argument("--system", choices=systems, default="all")
    p.set_defaults(run=cmd_purity)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term")
    _term_args(p)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--init", action="append", metavar="NAME=BOOL",
                   help="initial value of an ambient variable or cell (default false)")
    p.add_argument("--trace", action="store_true", help="record every rule application")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("encode", parents=[common], help="translate a judgment into the combined discipline")
    _term_args(p)
    p.add_argument("--from", dest="source", choices=("effect", "ability"), required=True)
    p.add_argument("--check", action="store_true", help="exit 1 unless the translation is derivable")
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("oracle", help="semantic checks by context enumeration")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    q = osub.add_parser("purity", parents=[common], help="search for a context exposing impurity")
    _term_args(q)
    _bound_args(q)
    q.add_argument("--hole", help="simple type of the term, for terms that have none")
    q.set_defaults(run=cmd_oracle_purity)
    q = osub.add_parser("safety", parents=[common], help="check a discipline's pure terms against the oracle")
    q.add_argument("--system", choices=SYSTEMS, required=True)
    q.add_argument("--corpus", help="directory of term files (default: the bundled golden corpus)")
    q.add_argument("--restrict", action="store_true",
                   help="only contexts well typed around the term (combined discipline)")
    _bound_args(q)
    q.set_defaults(run=cmd_oracle_safety)

    p = sub.add_parser("compare", parents=[common], help="all verdicts side by side for a corpus")
    p.add_argument("corpus", nargs="?", help="directory of term files (default: the bundled golden corpus)")
    _bound_args(p)
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("suite", parents=[common], help="run a property suite")
    p.add_argument("name", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, help="number of generated cases")
    _bound_args(p)
    p.set_defaults(run=cmd_suite)
    return parser


# ----------------------------------------------------------------- output

def _print_text(command: str, report: dict) -> None:
    if command == "compare":
        print(f"{'term':<28} {'effect':<10} {'ability':<10} {'ae':<10} oracle")
        for row in report["perTerm"]:
            s = row["systems"]
            line = f"{row['name']:<28} {s['effect']:<10} {s['ability']:<10} {s['ae']:<10} {row['oracle']['status']}"
            if "function" in row:
                fc = row["function"]
                line += f"  (function {fc['function']}, ability {fc['valueAbility']})"
            print(line)
            for m in row["mismatches"]:
                print(f"  expected {m['check']} = {m['expected']}, got {m['actual']}")
        for e in report["parseErrors"]:
            print(f"{e['path']}: parse error: {e['error']}")
        print(f"oracle-pure terms: {report['oraclePure']}; typed pure: {report['completeness']}")
        return
    if command.startswith("suite"):
        print(f"{report['suite']}: {report['checked']} checks, {len(report['violations'])} violations")
        for v in report["violations"][:20]:
            print("  " + json.dumps(v, ensure_ascii=False))
        return
    if command == "typecheck":
        errors = report.get("errors", {})
        for system, judgment in report["judgments"].items():
            print(f"{system}: " + (judgment if judgment is not None else f"ill-typed ({errors[system]})"))
        return
    if command == "purity":
        for system, v in report["verdicts"].items():
            print(f"{system}: " + (("pure" if v["pure"] else "impure") if "pure" in v else f"ill-typed ({v['error']})"))
        return
    if command == "eval":
        for step in report.get("trace", ()):
            print(f"{step['rule']:<6} store={step['store']}  {step['term']}")
        print(report["outcome"])
        return
    for key, value in report.items():
        if key in ("schema", "command"):
            continue
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        print(f"{key}: {value}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command + (f" {args.oracle_command}" if args.command == "oracle" else "")
    started = time.perf_counter()
    try:
        body, status = args.run(args)
    except ParseError as exc:
        print(f"purelab: parse error: {exc}", file=sys.stderr)
        return USAGE
    except UsageError as exc:
        print(f"purelab: {exc}", file=sys.stderr)
        return USAGE
    except TypeCheckError as exc:
        print(f"purelab: type error: {exc}", file=sys.stderr)
        return VIOLATION
    report = {"schema": SCHEMA, "command": command, **body}
    if args.timing:
        report["wallTime"] = round(time.perf_counter() - started, 3)
    if args.json:
        print(json.dumps(report, ensure_ascii=False, indent=2))
    else:
        _print_text(command, report)
    return status


if __name__ == "__main__":
    sys.exit(main())
