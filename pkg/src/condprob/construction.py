"""Zero-layer construction of a conditional probability with a quasi-additive class.

A stage solves the normalized system of a precise assessment, splits the
antecedents into those carrying mass and those that do not, and hands the
latter to the next stage.  Stage masses are then refined onto the base
partition and merged into one table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .coherence import Assessment, build_system, distinct_antecedents, mass_form
from .events import (
    ConditionalEvent,
    Constituent,
    ConstituentSet,
    Event,
    StructureError,
    build_constituents,
    parent_constituent,
)
from .lp import InfeasibleError, LinearProgram, max_support_solution


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Stage:
    index: int
    members: tuple[int, ...]  # positions in the input family
    family: tuple[ConditionalEvent, ...]
    precise_values: tuple[Fraction, ...]
    constituent_set: ConstituentSet
    solution: tuple[Fraction, ...]
    antecedents_zero: tuple[Event, ...]
    antecedents_positive: tuple[Event, ...]
    conditioning_class: tuple[Event, ...]
    family_positive: tuple[int, ...]  # positions in the input family
    family_zero: tuple[int, ...]

    @property
    def union_antecedent(self) -> Event:
        return self.constituent_set.union_antecedent

    def phi(self, event: Event) -> Fraction:
        return sum((m for c, m in zip(self.constituent_set, self.solution) if m and c.worlds <= event), Fraction(0))

    def query(self, consequent: Event, antecedent: Event) -> Fraction | None:
        if antecedent not in self.conditioning_class:
            return None
        return self.phi(consequent & antecedent) / self.phi(antecedent)


def stage_system(family: Sequence[ConditionalEvent], precise: Sequence) -> tuple[ConstituentSet, LinearProgram]:
    cs = build_constituents(family)
    return cs, build_system(Assessment.precise(family, precise), cs)


def build_stage(
    family: Sequence[ConditionalEvent],
    precise: Sequence,
    index: int = 0,
    *,
    members: Sequence[int] | None = None,
    witness: Sequence | Mapping[str, Fraction] | None = None,
) -> Stage:
    """Solve one stage.

    By default the solution maximizes the set of antecedents with positive
    mass.  ``witness`` overrides it, either as a vector over the stage
    constituents or as a mapping from constituent key to mass (missing keys
    are zero); it must solve the stage system exactly.
    """
    family = tuple(family)
    precise = tuple(Fraction(p) for p in precise)
    members = tuple(range(len(family))) if members is None else tuple(members)
    cs, lp = stage_system(family, precise)
    hs = distinct_antecedents(family)
    if witness is None:
        try:
            solution, _ = max_support_solution(lp, [mass_form(cs, h) for h in hs])
        except InfeasibleError:
            raise ConstructionError(f"stage {index}: the precise values admit no solution") from None
    else:
        if isinstance(witness, Mapping):
            unknown = set(witness) - set(cs.keys)
            if unknown:
                raise ConstructionError(f"stage {index}: unknown constituents {sorted(unknown)}")
            solution = tuple(Fraction(witness.get(k, 0)) for k in cs.keys)
        else:
            solution = tuple(Fraction(v) for v in witness)
        if not lp.is_satisfied_by(solution):
            raise ConstructionError(f"stage {index}: the supplied solution does not satisfy the stage system")
    mass = {h: sum((m for c, m in zip(cs, solution) if c.worlds <= h), Fraction(0)) for h in hs}
    zero = tuple(h for h in hs if mass[h] == 0)
    positive = tuple(h for h in hs if mass[h] > 0)
    if not positive:
        raise ConstructionError(f"stage {index}: no antecedent carries mass")
    union = cs.union_antecedent
    klass = positive if union in positive else positive + (union,)
    fam_zero = tuple(m for m, ce in zip(members, family) if ce.antecedent in zero)
    fam_pos = tuple(m for m, ce in zip(members, family) if ce.antecedent not in zero)
    return Stage(index, members, family, precise, cs, solution, zero, positive, klass, fam_pos, fam_zero)


def zero_layer_sequence(
    family: Sequence[ConditionalEvent],
    precise: Sequence,
    witnesses: Mapping[int, Sequence | Mapping[str, Fraction]] | None = None,
) -> list[Stage]:
    family = tuple(family)
    precise = tuple(Fraction(p) for p in precise)
    witnesses = witnesses or {}
    stages = []
    members = tuple(range(len(family)))
    while members:
        i = len(stages)
        stage = build_stage(
            [family[m] for m in members],
            [precise[m] for m in members],
            i,
            members=members,
            witness=witnesses.get(i),
        )
        stages.append(stage)
        if len(stage.family_zero) >= len(members):
            raise ConstructionError(f"stage {i} did not shrink the family")
        members = stage.family_zero
    return stages


@dataclass(frozen=True)
class MassFunction:
    constituents: tuple[Constituent, ...]
    masses: tuple[Fraction, ...]

    def phi(self, event: Event) -> Fraction:
        return sum((m for c, m in zip(self.constituents, self.masses) if m and c.worlds <= event), Fraction(0))

    def by_key(self) -> dict[str, Fraction]:
        return {c.key: m for c, m in zip(self.constituents, self.masses)}


def extend_stage(stage: Stage, base: ConstituentSet) -> MassFunction:
    """Push stage masses down to ``base``, splitting each evenly among its refinements."""
    children: dict[tuple[int, ...], list[int]] = {}
    for k, c0 in enumerate(base.constituents):
        try:
            parent = parent_constituent(c0, stage.constituent_set)
        except StructureError as exc:
            raise ConstructionError(f"stage {stage.index} is not coarser than the base partition") from exc
        children.setdefault(parent.signature, []).append(k)
    masses = [Fraction(0)] * len(base)
    for c, m in zip(stage.constituent_set, stage.solution):
        kids = children.get(c.signature)
        if not kids:
            raise ConstructionError(f"stage constituent {c.key} has no refinement in the base partition")
        for k in kids:
            masses[k] = m / len(kids)
    return MassFunction(base.constituents, tuple(masses))


@dataclass(frozen=True)
class ConditionalProbabilityTable:
    base: ConstituentSet
    stages: tuple[Stage, ...]
    refined: tuple[MassFunction, ...]
    class_x: tuple[tuple[Event, int], ...]

    def owner(self, antecedent: Event) -> int | None:
        for h, r in self.class_x:
            if h == antecedent:
                return r
        return None

    @property
    def conditioning_events(self) -> tuple[Event, ...]:
        return tuple(h for h, _ in self.class_x)

    def query(self, consequent: Event, antecedent: Event) -> Fraction | None:
        return query(self, consequent, antecedent)


def merge(stages: Sequence[Stage], base: ConstituentSet, refined: Sequence[MassFunction] | None = None) -> ConditionalProbabilityTable:
    stages = tuple(stages)
    if refined is None:
        refined = tuple(extend_stage(s, base) for s in stages)
    class_x: list[tuple[Event, int]] = []
    for s in stages:
        for h in s.conditioning_class:
            for g, r in class_x:
                if g == h:
                    raise ConstructionError(f"{h.describe()} is claimed by stages {r} and {s.index}")
            class_x.append((h, s.index))
    # a later-stage event never contains an earlier-stage one
    for h, r in class_x:
        for g, s in class_x:
            if s < r and g <= h:
                raise ConstructionError(f"{g.describe()} (stage {s}) lies inside {h.describe()} (stage {r})")
    return ConditionalProbabilityTable(base, stages, tuple(refined), tuple(class_x))


def query(table: ConditionalProbabilityTable, consequent: Event, antecedent: Event) -> Fraction | None:
    """P(consequent | antecedent), or None when it is not defined.

    Undefined means the antecedent is outside the class or the consequent is
    outside the algebra generated by the base constituents.
    """
    r = table.owner(antecedent)
    if r is None:
        return None
    both = consequent & antecedent
    if not table.base.is_measurable(both):
        return None
    mu = table.refined[r]
    return mu.phi(both) / mu.phi(antecedent)


def synthesize(family: Sequence[ConditionalEvent], precise: Sequence, witnesses=None) -> ConditionalProbabilityTable:
    """Run the stage sequence, refine and merge."""
    stages = zero_layer_sequence(family, precise, witnesses)
    base = stages[0].constituent_set
    return merge(stages, base)
