"""Assessment files and result documents.

Assessment files are line oriented::

    # comment
    atoms A B C D
    assess "A & B & C" given "D" in [1/2, 1]
    assess "B" given "A & C" = 0
    option world_cap 20
    option oracle_cap 12
    precise 1/2 0 1/3
    witness 0 020=1

Result documents are JSON with every rational written as ``"p/q"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coherence import Assessment, Bounds, normalize_assessment
from .construction import ConditionalProbabilityTable, MassFunction, Stage
from .events import DEFAULT_WORLD_CAP, ConditionalEvent, Event, build_constituents, check_atoms, event
from .verify import ORACLE_CAP, VerificationReport


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+|\.\d+)?\Z")
_ASSESS_RE = re.compile(
    r'assess\s+"([^"]*)"\s+given\s+"([^"]*)"\s+'
    r"(?:in\s*\[\s*([^,\s\]]+)\s*,\s*([^\]\s]+)\s*\]|=\s*(\S+))\s*\Z"
)


def fmt(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str, line: int | None = None) -> Fraction:
    if not _RATIONAL_RE.match(text):
        raise DocumentError(f"malformed rational {text!r}", line)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise DocumentError(f"zero denominator in {text!r}", line) from None


@dataclass
class Entry:
    consequent: str
    antecedent: str
    lower: Fraction
    upper: Fraction
    line: int = 0


@dataclass
class AssessmentDocument:
    atoms: list[str]
    entries: list[Entry]
    world_cap: int = DEFAULT_WORLD_CAP
    oracle_cap: int = ORACLE_CAP
    precise: list[Fraction] | None = None
    witnesses: dict[int, dict[str, Fraction]] = field(default_factory=dict)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_document(text: str) -> AssessmentDocument:
    atoms: list[str] | None = None
    doc = AssessmentDocument([], [])
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head = line.split(None, 1)[0]
        rest = line[len(head):].split()
        if head == "atoms":
            if atoms is not None:
                raise DocumentError("atoms declared twice", n)
            try:
                check_atoms(rest)
            except ValueError as exc:
                raise DocumentError(str(exc), n) from None
            atoms = rest
        elif head == "assess":
            m = _ASSESS_RE.match(line)
            if m is None:
                raise DocumentError('expected: assess "<expr>" given "<expr>" in [<a>, <b>]  or  = <p>', n)
            if m.group(5) is not None:
                lo = hi = parse_rational(m.group(5), n)
            else:
                lo, hi = parse_rational(m.group(3), n), parse_rational(m.group(4), n)
            if not 0 <= lo <= hi <= 1:
                raise DocumentError(f"interval [{fmt(lo)}, {fmt(hi)}] is not within 0 <= a <= b <= 1", n)
            doc.entries.append(Entry(m.group(1), m.group(2), lo, hi, n))
        elif head == "option":
            if len(rest) != 2 or rest[0] not in ("world_cap", "oracle_cap") or not rest[1].isdigit():
                raise DocumentError("expected: option world_cap <int>  or  option oracle_cap <int>", n)
            setattr(doc, rest[0], int(rest[1]))
        elif head == "precise":
            doc.precise = [parse_rational(t, n) for t in rest]
        elif head == "witness":
            if not rest or not rest[0].isdigit():
                raise DocumentError("expected: witness <stage> <key>=<mass> ...", n)
            masses = {}
            for item in rest[1:]:
                key, sep, value = item.partition("=")
                if not sep or not re.fullmatch(r"[012]+", key):
                    raise DocumentError(f"malformed witness item {item!r}", n)
                masses[key] = parse_rational(value, n)
            doc.witnesses[int(rest[0])] = masses
        else:
            raise DocumentError(f"unknown directive {head!r}", n)
    if atoms is None:
        raise DocumentError("missing 'atoms' line")
    doc.atoms = atoms
    return doc


def parse_precise(text: str) -> list[Fraction]:
    tokens = []
    for n, raw in enumerate(text.splitlines(), 1):
        parts = _strip(raw).split()
        if parts and parts[0] == "precise":
            parts = parts[1:]
        tokens.extend((t, n) for t in parts)
    return [parse_rational(t, n) for t, n in tokens]


@dataclass(frozen=True)
class Problem:
    """An assessment document resolved to events, with its normalized form."""

    atoms: tuple[str, ...]
    family: tuple[ConditionalEvent, ...]
    bounds: tuple[tuple[Fraction, Fraction], ...]
    assessment: Assessment
    mapping: tuple[tuple[int, bool], ...]  # input entry -> (normalized entry, complemented)

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    def entries_of(self, normalized: Sequence[int]) -> list[int]:
        wanted = set(normalized)
        return [i for i, (k, _) in enumerate(self.mapping) if k in wanted]

    def to_input(self, values: Sequence[Fraction]) -> list[Fraction]:
        return [1 - values[k] if flipped else values[k] for k, flipped in self.mapping]

    def bounds_to_input(self, bounds: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
        return [(1 - bounds[k][1], 1 - bounds[k][0]) if flipped else bounds[k] for k, flipped in self.mapping]

    def to_normalized(self, values: Sequence[Fraction]) -> list[Fraction]:
        """Map per-entry precise values onto normalized entries; merged entries must agree."""
        if len(values) != len(self.mapping):
            raise DocumentError(f"expected {len(self.mapping)} precise values, got {len(values)}")
        out: list[Fraction | None] = [None] * len(self.assessment)
        for i, ((k, flipped), v) in enumerate(zip(self.mapping, values)):
            v = 1 - v if flipped else Fraction(v)
            if out[k] is not None and out[k] != v:
                raise DocumentError(f"precise value of entry {i + 1} contradicts an equivalent entry")
            out[k] = v
        return out


def build_problem(atoms: Sequence[str], family: Sequence[ConditionalEvent], bounds) -> Problem:
    assessment, mapping = normalize_assessment(family, bounds)
    return Problem(tuple(atoms), tuple(family), tuple(bounds), assessment, tuple(mapping))


def load_problem(doc: AssessmentDocument, world_cap: int | None = None) -> Problem:
    cap = doc.world_cap if world_cap is None else world_cap
    family = []
    for e in doc.entries:
        family.append(ConditionalEvent(event(e.consequent, doc.atoms, cap), event(e.antecedent, doc.atoms, cap)))
    return build_problem(doc.atoms, family, [(e.lower, e.upper) for e in doc.entries])


def format_document(doc: AssessmentDocument, bounds: Sequence[tuple[Fraction, Fraction]], raw: Sequence[Bounds] | None = None) -> str:
    lines = ["atoms " + " ".join(doc.atoms)]
    for k, (e, (lo, hi)) in enumerate(zip(doc.entries, bounds)):
        line = f'assess "{e.consequent}" given "{e.antecedent}" '
        line += f"= {fmt(lo)}" if lo == hi else f"in [{fmt(lo)}, {fmt(hi)}]"
        if raw is not None:
            line += f"  # propagated [{fmt(raw[k].low)}, {fmt(raw[k].high)}]"
        lines.append(line)
    return "\n".join(lines) + "\n"


# --- result documents ------------------------------------------------------

def event_json(ev: Event) -> dict:
    return {"expr": ev.text, "worlds": ev.worlds()}


def event_from_json(data: dict, size: int) -> Event:
    return Event.from_worlds(data["worlds"], size, data.get("expr"))


def _bounds_json(lo, hi) -> list[str]:
    return [fmt(lo), fmt(hi)]


def _stage_json(stage: Stage, refined: MassFunction) -> dict:
    return {
        "index": stage.index,
        "members": list(stage.members),
        "precise": [fmt(v) for v in stage.precise_values],
        "constituents": {c.key: c.worlds.worlds() for c in stage.constituent_set},
        "solution": {c.key: fmt(m) for c, m in zip(stage.constituent_set, stage.solution)},
        "antecedents_zero": [event_json(h) for h in stage.antecedents_zero],
        "antecedents_positive": [event_json(h) for h in stage.antecedents_positive],
        "conditioning_class": [event_json(h) for h in stage.conditioning_class],
        "family_positive": list(stage.family_positive),
        "family_zero": list(stage.family_zero),
        "refined_masses": {k: fmt(m) for k, m in refined.by_key().items()},
    }


def trace_json(log) -> list[dict]:
    out = []
    for kind, lp, objective, outcome in log:
        item = {
            "kind": kind,
            "variables": list(lp.variables),
            "constraints": [[[fmt(a) for a in c.coeffs], c.relation, fmt(c.rhs)] for c in lp.constraints],
            "status": outcome.status,
        }
        if objective is not None:
            item["objective"] = [fmt(a) for a in objective]
        if outcome.value is not None:
            item["value"] = fmt(outcome.value)
        if outcome.witness is not None:
            item["witness"] = [fmt(v) for v in outcome.witness]
        out.append(item)
    return out


def result_document(
    problem: Problem,
    corrected: Assessment,
    raw: Sequence[Bounds],
    precise: Assessment,
    table: ConditionalProbabilityTable,
    report: VerificationReport,
    trace=None,
) -> dict:
    corrected_in = problem.bounds_to_input(corrected.bounds)
    raw_in = problem.bounds_to_input([(b.low, b.high) for b in raw])
    values = [table.query(ce.consequent, ce.antecedent) for ce in problem.family]
    doc = {
        "atoms": list(problem.atoms),
        "family": [
            {
                "consequent": event_json(ce.consequent),
                "antecedent": event_json(ce.antecedent),
                "normalized_index": k,
                "complemented": flipped,
            }
            for ce, (k, flipped) in zip(problem.family, problem.mapping)
        ],
        "assessment": [_bounds_json(lo, hi) for lo, hi in problem.bounds],
        "corrected": [
            {"interval": _bounds_json(*c), "propagated": _bounds_json(*r)} for c, r in zip(corrected_in, raw_in)
        ],
        "precise": [fmt(v) for v in problem.to_input(precise.values)],
        "stages": [_stage_json(s, mu) for s, mu in zip(table.stages, table.refined)],
        "class_X": [{"event": event_json(h), "owner": r} for h, r in table.class_x],
        "table": [None if v is None else fmt(v) for v in values],
        "report": report.as_dict(),
    }
    if trace is not None:
        doc["trace"] = trace_json(trace)
    return doc


def load_result(data: dict) -> tuple[Problem, ConditionalProbabilityTable]:
    """Rebuild the problem and the merged table stored in a result document."""
    try:
        atoms = data["atoms"]
        size = 1 << len(atoms)
        family = [
            ConditionalEvent(event_from_json(e["consequent"], size), event_from_json(e["antecedent"], size))
            for e in data["family"]
        ]
        bounds = [(parse_rational(a), parse_rational(b)) for a, b in data["assessment"]]
        problem = build_problem(atoms, family, bounds)
        base = build_constituents(problem.assessment.family)
        stages, refined = [], []
        for s in data["stages"]:
            members = tuple(s["members"])
            sub = tuple(problem.assessment.family[m] for m in members)
            cs = build_constituents(sub)
            if set(cs.keys) != set(s["constituents"]):
                raise DocumentError(f"stage {s['index']}: constituents do not match its family")
            ev = lambda items: tuple(event_from_json(h, size) for h in items)  # noqa: E731
            stages.append(Stage(
                index=s["index"],
                members=members,
                family=sub,
                precise_values=tuple(parse_rational(v) for v in s["precise"]),
                constituent_set=cs,
                solution=tuple(parse_rational(s["solution"][k]) for k in cs.keys),
                antecedents_zero=ev(s["antecedents_zero"]),
                antecedents_positive=ev(s["antecedents_positive"]),
                conditioning_class=ev(s["conditioning_class"]),
                family_positive=tuple(s["family_positive"]),
                family_zero=tuple(s["family_zero"]),
            ))
            masses = s["refined_masses"]
            if set(masses) != set(base.keys):
                raise DocumentError(f"stage {s['index']}: refined masses do not cover the base constituents")
            refined.append(MassFunction(base.constituents, tuple(parse_rational(masses[k]) for k in base.keys)))
        class_x = tuple((event_from_json(x["event"], size), x["owner"]) for x in data["class_X"])
    except (KeyError, TypeError, IndexError) as exc:
        raise DocumentError(f"malformed result document: {exc!r}") from None
    table = ConditionalProbabilityTable(base, tuple(stages), tuple(refined), class_x)
    return problem, table
