"""Command line front end.

Exit status: 0 success (g-coherent / all checks pass), 1 negative verdict,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import lp
from .coherence import (
    Bounds,
    InconsistentDuplicateError,
    NotGCoherentError,
    check_g_coherence,
    correct_assessment_with_raw,
    propagate_bounds,
    select_precise,
)
from .construction import ConstructionError, merge, zero_layer_sequence
from .events import ConditionalEvent, EmptyAntecedentError, EventSyntaxError, UndeclaredAtomError, WorldCapError, event
from .fileformat import (
    DocumentError,
    fmt,
    format_document,
    load_problem,
    load_result,
    parse_document,
    parse_precise,
    result_document,
)
from .verify import ORACLE_CAP, verify_table

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (
    DocumentError,
    EventSyntaxError,
    UndeclaredAtomError,
    WorldCapError,
    EmptyAntecedentError,
    OSError,
    json.JSONDecodeError,
)


def _entries(problem, normalized) -> str:
    return ", ".join(str(i + 1) for i in problem.entries_of(normalized))


def _load(args):
    doc = parse_document(Path(args.file).read_text())
    return doc, load_problem(doc, args.world_cap)


def cmd_check(args, out) -> int:
    doc, problem = _load(args)
    verdict = check_g_coherence(problem.assessment)
    if not verdict:
        print("not g-coherent", file=out)
        print(f"failing subfamily: entries {_entries(problem, verdict.failing)}", file=out)
        return EXIT_NEGATIVE
    print("g-coherent", file=out)
    for k, level in enumerate(verdict.levels):
        masses = " ".join(f"{key}={fmt(m)}" for key, m in zip(level.constituents.keys, level.witness) if m)
        print(f"level {k}: entries {_entries(problem, level.indices)}; witness {masses}", file=out)
    return EXIT_OK


def cmd_correct(args, out) -> int:
    doc, problem = _load(args)
    corrected, raw = correct_assessment_with_raw(problem.assessment)
    raw_in = problem.bounds_to_input([(b.low, b.high) for b in raw])
    print(format_document(doc, problem.bounds_to_input(corrected.bounds), [Bounds(*b) for b in raw_in]), end="", file=out)
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    doc, problem = _load(args)
    cap = doc.world_cap if args.world_cap is None else args.world_cap
    target = ConditionalEvent(event(args.event, doc.atoms, cap), event(args.given, doc.atoms, cap))
    if not target.antecedent:
        raise EmptyAntecedentError(len(doc.entries), target.label)
    if len(problem.assessment):
        b = propagate_bounds(problem.assessment, target)
        lo, hi = b.low, b.high
    else:
        eh = target.conjunction
        lo = 1 if eh == target.antecedent else 0
        hi = 0 if not eh else 1
    print(f"[{fmt(lo)}, {fmt(hi)}]", file=out)
    return EXIT_OK


def cmd_synthesize(args, out) -> int:
    doc, problem = _load(args)
    oracle_cap = doc.oracle_cap if args.oracle_cap is None else args.oracle_cap
    override = doc.precise
    if args.precise:
        override = parse_precise(Path(args.precise).read_text())
    if override is not None:
        override = problem.to_normalized(override)
    with lp.recording() as log:
        try:
            corrected, raw = correct_assessment_with_raw(problem.assessment)
            precise = select_precise(corrected, override)
        except NotGCoherentError as exc:
            print(f"not g-coherent: failing subfamily: entries {_entries(problem, exc.failing)}", file=out)
            print(str(exc), file=out)
            return EXIT_NEGATIVE
        stages = zero_layer_sequence(precise.family, precise.values, doc.witnesses)
        table = merge(stages, stages[0].constituent_set)
    report = verify_table(table, problem.assessment, oracle_cap=oracle_cap)
    result = result_document(problem, corrected, raw, precise, table, report, log if args.trace else None)
    text = json.dumps(result, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_verify(args, out) -> int:
    data = json.loads(Path(args.file).read_text())
    problem, table = load_result(data)
    oracle_cap = ORACLE_CAP if args.oracle_cap is None else args.oracle_cap
    try:
        report = verify_table(table, problem.assessment, oracle_cap=oracle_cap)
    except ZeroDivisionError:
        print("axiom_i: fail (a conditioning event has zero mass in its stage)", file=out)
        return EXIT_NEGATIVE
    for name, result in report.items():
        status = {True: "pass", False: "fail", None: "skipped"}[result.passed]
        line = f"{name}: {status}"
        if result.counterexample:
            line += " " + json.dumps(result.counterexample)
        print(line, file=out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condprob", description="Exact g-coherence checks and conditional probability synthesis for interval assessments.")
    parser.add_argument("--world-cap", type=int, default=None, help="maximum number of atoms")
    parser.add_argument("--oracle-cap", type=int, default=None, help="maximum family size for the subset oracle")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check g-coherence of an assessment file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("correct", help="print the least-committal correction")
    p.add_argument("file")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("bounds", help="coherent bounds for a further conditional event")
    p.add_argument("file")
    p.add_argument("--event", required=True)
    p.add_argument("--given", default="TRUE")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("synthesize", help="build a conditional probability with a quasi-additive class")
    p.add_argument("file")
    p.add_argument("--precise", help="file with one precise value per entry")
    p.add_argument("--trace", action="store_true", help="include every linear program solved")
    p.add_argument("-o", "--output", help="write the result document here instead of stdout")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="re-run the checks on a stored result document")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotGCoherentError, InconsistentDuplicateError) as exc:
        print(f"not g-coherent: {exc}", file=out)
        return EXIT_NEGATIVE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=out)
        return EXIT_NEGATIVE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
