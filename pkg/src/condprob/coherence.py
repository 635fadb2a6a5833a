"""G-coherence of interval assessments, bound propagation and correction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .events import ConditionalEvent, ConstituentSet, EmptyAntecedentError, Event, build_constituents
from .lp import LinearProgram, constraint, optimize, solve_feasibility


class NotGCoherentError(ValueError):
    def __init__(self, failing: tuple[int, ...], message: str = "assessment is not g-coherent"):
        super().__init__(f"{message} (failing subfamily: {', '.join(str(i + 1) for i in failing)})")
        self.failing = failing


class InconsistentDuplicateError(ValueError):
    pass


@dataclass(frozen=True)
class Assessment:
    family: tuple[ConditionalEvent, ...]
    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if len(self.family) != len(self.bounds):
            raise ValueError("family and bounds differ in length")
        keys = set()
        for i, (ce, (lo, hi)) in enumerate(zip(self.family, self.bounds)):
            if not 0 <= lo <= hi <= 1:
                raise ValueError(f"entry {i + 1}: bounds [{lo}, {hi}] are not within 0 <= a <= b <= 1")
            if ce.key in keys or ce.complement_key in keys:
                raise ValueError(f"entry {i + 1} repeats an earlier conditional event; normalize the family first")
            keys.add(ce.key)

    @classmethod
    def precise(cls, family: Sequence[ConditionalEvent], values: Sequence) -> "Assessment":
        return cls(tuple(family), tuple((Fraction(v), Fraction(v)) for v in values))

    def __len__(self) -> int:
        return len(self.family)

    @property
    def is_precise(self) -> bool:
        return all(lo == hi for lo, hi in self.bounds)

    @property
    def values(self) -> tuple[Fraction, ...]:
        if not self.is_precise:
            raise ValueError("assessment is not precise")
        return tuple(lo for lo, _ in self.bounds)

    def restrict(self, indices: Sequence[int]) -> "Assessment":
        return Assessment(tuple(self.family[i] for i in indices), tuple(self.bounds[i] for i in indices))

    def replace(self, j: int, lo, hi) -> "Assessment":
        bounds = list(self.bounds)
        bounds[j] = (Fraction(lo), Fraction(hi))
        return Assessment(self.family, tuple(bounds))


@dataclass(frozen=True)
class Bounds:
    low: Fraction
    high: Fraction

    def __post_init__(self):
        if not 0 <= self.low <= self.high <= 1:
            raise ValueError(f"invalid bounds [{self.low}, {self.high}]")

    def __contains__(self, p) -> bool:
        return self.low <= p <= self.high

    def intersect(self, lo, hi) -> "Bounds | None":
        a, b = max(self.low, lo), min(self.high, hi)
        return Bounds(a, b) if a <= b else None


@dataclass(frozen=True)
class ZeroSet:
    forced_zero: tuple[Event, ...]
    positive_capable: tuple[Event, ...]


@dataclass(frozen=True)
class Level:
    indices: tuple[int, ...]
    constituents: ConstituentSet
    witness: tuple[Fraction, ...]
    system: LinearProgram


@dataclass(frozen=True)
class GCoherenceVerdict:
    g_coherent: bool
    levels: tuple[Level, ...] = ()
    failing: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.g_coherent


def normalize_assessment(family: Sequence[ConditionalEvent], bounds: Sequence) -> tuple[Assessment, list[tuple[int, bool]]]:
    """Merge repeated conditional events and complements E^c|H into one entry.

    Returns the normalized assessment and, for each input entry, the index of
    its normalized entry and whether it was complemented.  Intervals of merged
    entries are intersected.
    """
    out_family: list[ConditionalEvent] = []
    out_bounds: list[list[Fraction]] = []
    where: dict[tuple[int, int], int] = {}
    mapping: list[tuple[int, bool]] = []
    for i, (ce, (lo, hi)) in enumerate(zip(family, bounds)):
        lo, hi = Fraction(lo), Fraction(hi)
        if not ce.antecedent:
            raise EmptyAntecedentError(i, ce.label)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"entry {i + 1}: bounds [{lo}, {hi}] are not within 0 <= a <= b <= 1")
        if ce.key in where:
            k, flipped = where[ce.key], False
        elif ce.complement_key in where:
            k, flipped = where[ce.complement_key], True
            lo, hi = 1 - hi, 1 - lo
        else:
            k, flipped = len(out_family), False
            where[ce.key] = k
            out_family.append(ce)
            out_bounds.append([lo, hi])
            mapping.append((k, False))
            continue
        cur = out_bounds[k]
        cur[0], cur[1] = max(cur[0], lo), min(cur[1], hi)
        if cur[0] > cur[1]:
            raise InconsistentDuplicateError(f"entry {i + 1} repeats entry {k + 1} with a disjoint interval")
        mapping.append((k, flipped))
    return Assessment(tuple(out_family), tuple((a, b) for a, b in out_bounds)), mapping


def mass_form(cs: ConstituentSet, event: Event) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in cs.indicator(event))


def build_system(assessment: Assessment, cs: ConstituentSet, normalization: str | Event = "union") -> LinearProgram:
    """Homogeneous interval constraints over the constituents of ``cs``.

    ``normalization`` is ``"union"`` (total mass and mass of the union of
    antecedents both equal 1), ``"none"``, or an event whose mass is set to 1.
    """
    for i, ce in enumerate(assessment.family):
        if not (cs.is_measurable(ce.antecedent) and cs.is_measurable(ce.conjunction)):
            raise ValueError(f"entry {i + 1} is not expressible over the given constituents")
    rows = []
    for ce, (lo, hi) in zip(assessment.family, assessment.bounds):
        eh = cs.indicator(ce.conjunction)
        h = cs.indicator(ce.antecedent)
        if lo == hi:
            rows.append(constraint([e - lo * k for e, k in zip(eh, h)], "=="))
        else:
            rows.append(constraint([e - hi * k for e, k in zip(eh, h)], "<="))
            rows.append(constraint([e - lo * k for e, k in zip(eh, h)], ">="))
    if normalization == "union":
        if not assessment.family:
            raise ValueError("union normalization needs a non-empty family")
        union = assessment.family[0].antecedent
        for ce in assessment.family[1:]:
            union = union | ce.antecedent
        rows.append(constraint(cs.indicator(union), "==", 1))
        rows.append(constraint([1] * len(cs), "==", 1))
    elif isinstance(normalization, Event):
        if not cs.is_measurable(normalization):
            raise ValueError("normalization event is not expressible over the given constituents")
        rows.append(constraint(cs.indicator(normalization), "==", 1))
    elif normalization != "none":
        raise ValueError(f"unknown normalization {normalization!r}")
    return LinearProgram(cs.keys, tuple(rows))


def distinct_antecedents(family: Sequence[ConditionalEvent]) -> list[Event]:
    out: list[Event] = []
    for ce in family:
        if ce.antecedent not in out:
            out.append(ce.antecedent)
    return out


def _forced_zero(lp: LinearProgram, cs: ConstituentSet, antecedents: Sequence[Event]) -> list[bool]:
    flags = []
    for h in antecedents:
        out = optimize(lp, mass_form(cs, h), "max")
        flags.append(out.status == "optimal" and out.value == 0)
    return flags


def compute_zero_set(assessment: Assessment) -> ZeroSet:
    """Antecedents whose mass vanishes at every solution of the normalized system."""
    cs = build_constituents(assessment.family)
    lp = build_system(assessment, cs)
    if not solve_feasibility(lp).is_feasible:
        raise NotGCoherentError(tuple(range(len(assessment))), "the normalized system has no solution")
    hs = distinct_antecedents(assessment.family)
    flags = _forced_zero(lp, cs, hs)
    return ZeroSet(tuple(h for h, z in zip(hs, flags) if z), tuple(h for h, z in zip(hs, flags) if not z))


def check_g_coherence(assessment: Assessment) -> GCoherenceVerdict:
    """Level-wise check: solve, then recurse on the entries whose antecedents are forced to zero mass."""
    indices = tuple(range(len(assessment)))
    levels = []
    while indices:
        sub = assessment.restrict(indices)
        cs = build_constituents(sub.family)
        lp = build_system(sub, cs)
        out = solve_feasibility(lp)
        if not out.is_feasible:
            return GCoherenceVerdict(False, tuple(levels), indices)
        levels.append(Level(indices, cs, out.witness, lp))
        hs = distinct_antecedents(sub.family)
        zero = {h for h, z in zip(hs, _forced_zero(lp, cs, hs)) if z}
        indices = tuple(i for i in indices if assessment.family[i].antecedent in zero)
    return GCoherenceVerdict(True, tuple(levels))


def propagate_bounds(assessment: Assessment, target: ConditionalEvent, *, checked: bool = False) -> Bounds:
    """The interval of values for ``target`` that keep the assessment g-coherent.

    At each level the ratio range of the target is taken over solutions that
    give its antecedent positive mass; the search then continues on the
    entries forced to zero mass once the target antecedent carries none.
    """
    if not target.antecedent:
        raise EmptyAntecedentError(len(assessment), target.label)
    if not checked:
        verdict = check_g_coherence(assessment)
        if not verdict:
            raise NotGCoherentError(verdict.failing)
    h = target.antecedent
    eh = target.conjunction
    indices = tuple(range(len(assessment)))
    low = high = None
    while True:
        sub = assessment.restrict(indices)
        cs = build_constituents(sub.family + (target,))
        lp = build_system(sub, cs, normalization=h)
        phi = mass_form(cs, eh)
        lo = optimize(lp, phi, "min")
        if lo.status == "optimal":
            hi = optimize(lp, phi, "max")
            low = lo.value if low is None else min(low, lo.value)
            high = hi.value if high is None else max(high, hi.value)
            if low == 0 and high == 1:
                break
        if not indices:
            break
        dead = build_system(sub, cs).with_constraints(constraint(mass_form(cs, h), "==", 0))
        if not solve_feasibility(dead).is_feasible:
            break
        hs = distinct_antecedents(sub.family)
        zero = {g for g, z in zip(hs, _forced_zero(dead, cs, hs)) if z}
        indices = tuple(i for i in indices if assessment.family[i].antecedent in zero)
    if low is None:
        raise AssertionError("no level admitted a value for the target")
    return Bounds(low, high)


def correct_assessment_with_raw(assessment: Assessment) -> tuple[Assessment, list[Bounds]]:
    verdict = check_g_coherence(assessment)
    if not verdict:
        raise NotGCoherentError(verdict.failing)
    raw = [propagate_bounds(assessment, ce, checked=True) for ce in assessment.family]
    bounds = []
    for b, (lo, hi) in zip(raw, assessment.bounds):
        cut = b.intersect(lo, hi)
        if cut is None:
            raise AssertionError("propagated bounds miss the input interval of a g-coherent assessment")
        bounds.append((cut.low, cut.high))
    return Assessment(assessment.family, tuple(bounds)), raw


def correct_assessment(assessment: Assessment) -> Assessment:
    """Least-committal correction: each interval shrunk to its coherent values."""
    return correct_assessment_with_raw(assessment)[0]


def select_precise(assessment: Assessment, override: Sequence | None = None) -> Assessment:
    """A precise coherent assessment inside the intervals.

    Without ``override`` the entries are fixed one at a time, in family order,
    at the midpoint of their currently admissible range.
    """
    if override is not None:
        values = [Fraction(v) for v in override]
        if len(values) != len(assessment):
            raise ValueError(f"expected {len(assessment)} precise values, got {len(values)}")
        for i, (v, (lo, hi)) in enumerate(zip(values, assessment.bounds)):
            if not lo <= v <= hi:
                raise NotGCoherentError((i,), f"precise value {v} lies outside [{lo}, {hi}]")
        precise = Assessment.precise(assessment.family, values)
        verdict = check_g_coherence(precise)
        if not verdict:
            raise NotGCoherentError(verdict.failing, "precise values are not coherent")
        return precise
    verdict = check_g_coherence(assessment)
    if not verdict:
        raise NotGCoherentError(verdict.failing)
    working = assessment
    for j, ce in enumerate(assessment.family):
        lo, hi = working.bounds[j]
        if lo != hi:
            b = propagate_bounds(working, ce, checked=True).intersect(lo, hi)
            mid = (b.low + b.high) / 2
            working = working.replace(j, mid, mid)
    return working
