"""Acceptance gate.  Each criterion prints one PASS/FAIL line in the summary."""

import io
import random
import time
from fractions import Fraction

from condprob.cli import main
from condprob.coherence import (
    Assessment,
    InconsistentDuplicateError,
    check_g_coherence,
    distinct_antecedents,
    normalize_assessment,
    propagate_bounds,
    select_precise,
)
from condprob.construction import merge, stage_system, synthesize, zero_layer_sequence
from condprob.events import ConditionalEvent, build_constituents, constituents_of
from condprob.lp import optimize
from condprob.verify import subsets_solvable, verify_table

from conftest import EXAMPLE1_PRECISE, EXAMPLE1_TEXT, ev
from generators import GRID, dnf, random_assessment, random_event, random_family, random_gcoherent, random_precise

F = Fraction
NAMES = ["A", "B", "C", "D"]


def cli(*argv):
    out = io.StringIO()
    return main([str(a) for a in argv], out), out.getvalue()


def test_criterion_1_example_constituents(family):
    start = time.perf_counter()
    cs = build_constituents(family)
    assert [c.r for c in cs] == [6, 8, 13, 14, 18, 20, 24, 26]
    expected = [
        "A & B & ~C & D", "A & B & ~C & ~D", "A & B & C & D", "A & B & C & ~D",
        "A & ~B & C & D", "A & ~B & C & ~D", "(~A | ~B & ~C) & D", "(~A | ~B & ~C) & ~D",
    ]
    assert [c.worlds for c in cs] == [ev(t) for t in expected]
    inside = constituents_of(ev("D | A & C | A & B"), cs)
    assert len(inside) == 7 and inside == list(cs.constituents[:7])
    assert time.perf_counter() - start < 1


def test_criterion_2_example_g_coherence(example1_file):
    start = time.perf_counter()
    code, text = cli("check", example1_file)
    assert code == 0 and text.startswith("g-coherent\n")
    code, text = cli("correct", example1_file)
    assert code == 0
    body = [line.split("  #")[0] for line in text.splitlines()]
    assert body == EXAMPLE1_TEXT.splitlines()
    assert time.perf_counter() - start < 1


def test_criterion_3_example_synthesis(family, assessment):
    start = time.perf_counter()
    precise = select_precise(assessment, EXAMPLE1_PRECISE)
    stages = zero_layer_sequence(precise.family, precise.values)
    s0, s1 = stages
    cs, system = stage_system(family, EXAMPLE1_PRECISE)
    unit = tuple(F(int(c.worlds == ev("A & ~B & C & ~D"))) for c in cs)
    assert s0.solution == unit
    for j in range(len(cs)):  # every coordinate pinned: the solution set is one point
        axis = [int(i == j) for i in range(len(cs))]
        assert optimize(system, axis, "min").value == optimize(system, axis, "max").value == unit[j]
    assert s0.antecedents_zero == (ev("D"), ev("A & B"))
    assert s0.antecedents_positive == (ev("A & C"),)
    assert s1.antecedents_zero == ()
    table = merge(stages, s0.constituent_set)
    assert [h for h, _ in table.class_x] == [ev(t) for t in ("A & C", "D | A & C | A & B", "D", "A & B", "D | A & B")]
    assert tuple(table.query(ce.consequent, ce.antecedent) for ce in family) == EXAMPLE1_PRECISE
    assert table.owner(ev("D | A & C")) is None
    assert time.perf_counter() - start < 2


def test_criterion_4_example_verification(family, assessment):
    table = synthesize(family, EXAMPLE1_PRECISE)
    report = verify_table(table, assessment)
    assert all(r.passed is True for _, r in report.items()), report.as_dict()
    ok, failing = subsets_solvable(Assessment.precise(family, EXAMPLE1_PRECISE))
    assert ok and failing is None
    assert len(table.class_x) == 5 <= 2 * len(distinct_antecedents(family))


def test_criterion_5_oracle_equivalence():
    rng = random.Random(20261016)
    start = time.perf_counter()
    for _ in range(250):
        a = random_assessment(rng, rng.randint(1, 3), rng.randint(1, 3))
        assert bool(check_g_coherence(a)) == subsets_solvable(a)[0], a
    assert time.perf_counter() - start < 60


def _augmented_ok(assessment, target, p):
    try:
        aug, _ = normalize_assessment(assessment.family + (target,), assessment.bounds + ((p, p),))
    except InconsistentDuplicateError:
        return False
    return subsets_solvable(aug)[0]


def _outside(lo, hi):
    below = [lo / 2, lo / 3] if lo > 0 else []
    above = [(hi + 1) / 2, (2 * hi + 1) / 3] if hi < 1 else []
    return (below[:1] + above[:1]) if below and above else (below or above)


def test_criterion_6_bounds_soundness():
    rng = random.Random(6)
    checked = 0
    while checked < 60:
        atoms = rng.randint(1, 3)
        a = random_gcoherent(rng, rng.randint(1, 3), atoms)
        size = 1 << atoms
        target = ConditionalEvent(random_event(rng, size), random_event(rng, size, nonempty=True))
        b = propagate_bounds(a, target)
        outside = _outside(b.low, b.high)
        if not outside:
            continue
        inside = [b.low + k * (b.high - b.low) / 4 for k in range(5)]
        for p in inside:
            assert _augmented_ok(a, target, p), (a, target, p)
        for p in outside:
            assert not _augmented_ok(a, target, p), (a, target, p)
        checked += 1


def test_criterion_7_pipeline_properties():
    rng = random.Random(7)
    for _ in range(110):
        a = random_gcoherent(rng, rng.randint(1, 4), rng.randint(1, 3))
        precise = select_precise(a)
        stages = zero_layer_sequence(precise.family, precise.values)
        sizes = [len(s.members) for s in stages]
        assert all(x > y for x, y in zip(sizes, sizes[1:]))
        positives = sorted(m for s in stages for m in s.family_positive)
        assert positives == list(range(len(a)))
        classes = [set(s.conditioning_class) for s in stages]
        for i in range(len(classes)):
            for j in range(i + 1, len(classes)):
                assert not classes[i] & classes[j]
        table = merge(stages, stages[0].constituent_set)
        assert len(table.class_x) <= 2 * len(distinct_antecedents(a.family))
        assert tuple(table.query(ce.consequent, ce.antecedent) for ce in a.family) == precise.values
        report = verify_table(table, a)
        assert report.passed and all(r.passed for _, r in report.items()), report.as_dict()
        for h, r in table.class_x:
            for g, s in table.class_x:
                assert not (s < r and g <= h)


def _document(assessment, atoms):
    names = NAMES[:atoms]
    lines = ["atoms " + " ".join(names)]
    for ce, (p, _) in zip(assessment.family, assessment.bounds):
        lines.append(f'assess "{dnf(ce.consequent, names)}" given "{dnf(ce.antecedent, names)}" = {p}')
    return "\n".join(lines) + "\n"


def test_criterion_8_round_trip(tmp_path):
    rng = random.Random(8)
    path = tmp_path / "case.txt"
    for _ in range(110):
        atoms = rng.randint(1, 3)
        a = random_precise(rng, rng.randint(1, 4), atoms)
        table = synthesize(a.family, a.values)
        assert tuple(table.query(ce.consequent, ce.antecedent) for ce in a.family) == a.values
        path.write_text(_document(a, atoms))
        assert cli("check", path)[0] == 0
    rejected = 0
    while rejected < 25:
        atoms = rng.randint(1, 3)
        family = random_family(rng, rng.randint(2, 4), atoms)
        a = Assessment.precise(family, [rng.choice(GRID) for _ in family])
        if subsets_solvable(a)[0]:
            continue
        path.write_text(_document(a, atoms))
        code, text = cli("check", path)
        assert code == 1 and text.startswith("not g-coherent"), text
        rejected += 1
