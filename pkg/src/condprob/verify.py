"""Independent checks on a merged conditional probability table."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterator, Sequence

from .coherence import Assessment, build_system, distinct_antecedents
from .construction import ConditionalProbabilityTable
from .events import ConditionalEvent, Event, build_constituents
from .lp import solve_feasibility

EXHAUSTIVE_LIMIT = 10
SAMPLES = 1000
ORACLE_CAP = 12


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    passed: bool | None  # None: not run
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.passed is not False

    def as_dict(self) -> dict:
        out: dict = {"passed": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


PASS = CheckResult(True)


def fail(**details) -> CheckResult:
    return CheckResult(False, {k: _plain(v) for k, v in details.items()})


def _plain(v):
    if isinstance(v, Event):
        return v.describe()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass(frozen=True)
class VerificationReport:
    axiom_i: CheckResult
    axiom_ii: CheckResult
    axiom_iii: CheckResult
    quasi_additive: CheckResult
    coherent: CheckResult
    consistent: CheckResult
    cardinality_bound: CheckResult

    @property
    def passed(self) -> bool:
        return all(bool(getattr(self, f.name)) for f in fields(self))

    def items(self) -> Iterator[tuple[str, CheckResult]]:
        for f in fields(self):
            yield f.name, getattr(self, f.name)

    def as_dict(self) -> dict:
        return {name: r.as_dict() for name, r in self.items()}


class _Algebra:
    """Events of the algebra generated by the base constituents, indexed by subset bitmask."""

    def __init__(self, table: ConditionalProbabilityTable, limit: int, samples: int, seed: int):
        self.table = table
        self.parts = [c.worlds for c in table.base.constituents]
        self.k = len(self.parts)
        self.size = table.base.union_antecedent.size
        self.exhaustive = self.k <= limit
        self.samples = samples
        self.rng = random.Random(seed)

    def event(self, subset: int) -> Event:
        mask = 0
        for i, part in enumerate(self.parts):
            if subset >> i & 1:
                mask |= part.mask
        return Event(mask, self.size)

    def subsets(self) -> Iterator[int]:
        if self.exhaustive:
            yield from range(1 << self.k)
        else:
            for _ in range(self.samples):
                yield self.rng.getrandbits(self.k)

    def disjoint_pairs(self) -> Iterator[tuple[int, int]]:
        if self.exhaustive:
            for union in range(1 << self.k):
                s = union
                while True:
                    t = union ^ s
                    if s <= t:
                        yield s, t
                    if s == 0:
                        break
                    s = (s - 1) & union
        else:
            for _ in range(self.samples):
                s = self.rng.getrandbits(self.k)
                yield s, self.rng.getrandbits(self.k) & ~s


def check_axioms(table: ConditionalProbabilityTable, *, limit: int = EXHAUSTIVE_LIMIT, samples: int = SAMPLES, seed: int = 0) -> tuple[CheckResult, CheckResult, CheckResult]:
    """Conditional probability axioms: finite additivity, P(H|H) = 1, product rule."""
    alg = _Algebra(table, limit, samples, seed)
    full = Event.full(alg.size)
    memo: dict[tuple[int, int], Fraction] = {}

    def p(subset: int, h: Event) -> Fraction:
        key = (subset, h.mask)
        if key not in memo:
            memo[key] = table.query(alg.event(subset), h)
        return memo[key]

    return _axiom_i(table, alg, full, p), _axiom_ii(table), _axiom_iii(table, alg, p)


def _axiom_i(table, alg, full, p) -> CheckResult:
    for r, mu in enumerate(table.refined):
        if any(m < 0 for m in mu.masses) or sum(mu.masses) != 1:
            owned = [h for h, s in table.class_x if s == r]
            return fail(H=owned[-1] if owned else None, stage=r, reason="stage masses are not a probability")
    for h in table.conditioning_events:
        if table.query(full, h) != 1:
            return fail(H=h, reason="P(TRUE|H) != 1")
        for s in alg.subsets():
            if p(s, h) < 0:
                return fail(H=h, E=alg.event(s), reason="negative value")
        for s, t in alg.disjoint_pairs():
            if p(s | t, h) != p(s, h) + p(t, h):
                return fail(H=h, E1=alg.event(s), E2=alg.event(t), reason="additivity")
    return PASS


def _axiom_ii(table) -> CheckResult:
    for h in table.conditioning_events:
        if table.query(h, h) != 1:
            return fail(H=h)
    return PASS


def _axiom_iii(table, alg, p) -> CheckResult:
    for h, g in itertools.product(table.conditioning_events, repeat=2):
        # triples with E1 H = g; the product rule only depends on E1 through E1 H
        if not g <= h:
            continue
        p_g_h = table.query(g, h)
        g_subset = sum(1 << i for i, part in enumerate(alg.parts) if part <= g)
        for s in alg.subsets():
            lhs = p(s & g_subset, h)
            rhs = p(s, g) * p_g_h
            if lhs != rhs:
                return fail(H=h, E1=g, E2=alg.event(s), lhs=lhs, rhs=rhs)
    return PASS


def cross_stage_pairs(table: ConditionalProbabilityTable) -> list[tuple[Event, Event]]:
    """Pairs (H, E1H) of class events with E1H owned by a later stage than H."""
    out = []
    for (h, r), (g, s) in itertools.product(table.class_x, repeat=2):
        if r < s and g <= h:
            out.append((h, g))
    return out


def check_quasi_additive(table: ConditionalProbabilityTable) -> CheckResult:
    xs = table.conditioning_events
    for h1, h2 in itertools.combinations_with_replacement(xs, 2):
        cover = h1 | h2
        if not any(cover <= k and table.query(h1, k) + table.query(h2, k) > 0 for k in xs):
            return fail(H1=h1, H2=h2)
    return PASS


def _subfamilies(n: int) -> Iterator[tuple[int, ...]]:
    for size in range(1, n + 1):
        yield from itertools.combinations(range(n), size)


def subsets_solvable(assessment: Assessment, cap: int = ORACLE_CAP) -> tuple[bool, tuple[int, ...] | None]:
    """Solvability of the normalized system for every non-empty subfamily.

    Returns ``(True, None)`` or ``(False, J)`` for the first failing subfamily J.
    """
    n = len(assessment)
    if n > cap:
        raise OracleCapError(f"{n} conditional events exceed the oracle cap of {cap}")
    for subset in _subfamilies(n):
        sub = assessment.restrict(subset)
        cs = build_constituents(sub.family)
        if not solve_feasibility(build_system(sub, cs)).is_feasible:
            return False, subset
    return True, None


def check_coherence_oracle(family: Sequence[ConditionalEvent], precise: Sequence, cap: int = ORACLE_CAP) -> CheckResult:
    ok, failing = subsets_solvable(Assessment.precise(tuple(family), precise), cap)
    return PASS if ok else fail(subfamily=[i + 1 for i in failing])


def check_consistency(table: ConditionalProbabilityTable, original: Assessment) -> CheckResult:
    chosen = {}
    for stage in table.stages:
        for m, v in zip(stage.members, stage.precise_values):
            if m in stage.family_positive:
                chosen[m] = v
    for i, (ce, (lo, hi)) in enumerate(zip(original.family, original.bounds)):
        value = table.query(ce.consequent, ce.antecedent)
        if value is None:
            return fail(index=i + 1, reason="undefined")
        if not lo <= value <= hi:
            return fail(index=i + 1, value=value, interval=[lo, hi])
        if i in chosen and chosen[i] != value:
            return fail(index=i + 1, value=value, selected=chosen[i])
    return PASS


def check_cardinality(table: ConditionalProbabilityTable, family: Sequence[ConditionalEvent]) -> CheckResult:
    n = len(distinct_antecedents(family))
    size = len(table.class_x)
    if size > 2 * n:
        return fail(size=size, bound=2 * n)
    missing = [ce.antecedent for ce in family if table.owner(ce.antecedent) is None]
    if missing:
        return fail(missing=missing)
    return PASS


def verify_table(table: ConditionalProbabilityTable, original: Assessment, *, oracle_cap: int = ORACLE_CAP, seed: int = 0) -> VerificationReport:
    ax1, ax2, ax3 = check_axioms(table, seed=seed)
    values = [table.query(ce.consequent, ce.antecedent) for ce in original.family]
    if any(v is None for v in values):
        coherent = fail(reason="table is undefined on part of the family")
    elif len(values) > oracle_cap:
        coherent = CheckResult(None, {"reason": f"family larger than the oracle cap {oracle_cap}"})
    else:
        coherent = check_coherence_oracle(original.family, values, oracle_cap)
    return VerificationReport(
        axiom_i=ax1,
        axiom_ii=ax2,
        axiom_iii=ax3,
        quasi_additive=check_quasi_additive(table),
        coherent=coherent,
        consistent=check_consistency(table, original),
        cardinality_bound=check_cardinality(table, original.family),
    )
