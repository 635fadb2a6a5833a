"""Random instances for property tests.

Coherent precise assessments come from lexicographic layers of world masses:
P(E|H) is read off the first layer that gives H positive mass.  Such values
are coherent by construction and do not touch the code under test.
"""

from __future__ import annotations

import random
from fractions import Fraction

from condprob.coherence import Assessment
from condprob.events import ConditionalEvent, Event

GRID = [Fraction(k, 6) for k in range(7)]


def random_event(rng: random.Random, size: int, nonempty: bool = False) -> Event:
    while True:
        mask = rng.getrandbits(size)
        if mask or not nonempty:
            return Event(mask, size)


def random_family(rng: random.Random, n: int, atoms: int) -> tuple[ConditionalEvent, ...]:
    size = 1 << atoms
    family, keys = [], set()
    tries = 0
    while len(family) < n:
        tries += 1
        if tries > 1000:
            raise RuntimeError("could not draw distinct conditional events")
        ce = ConditionalEvent(random_event(rng, size), random_event(rng, size, nonempty=True))
        if ce.key in keys or ce.complement_key in keys:
            continue
        keys.add(ce.key)
        family.append(ce)
    return tuple(family)


def random_assessment(rng: random.Random, n: int, atoms: int) -> Assessment:
    family = random_family(rng, n, atoms)
    bounds = []
    for _ in family:
        if rng.random() < 0.5:
            p = rng.choice(GRID)
            bounds.append((p, p))
        else:
            a, b = sorted(rng.sample(GRID, 2))
            bounds.append((a, b))
    return Assessment(family, tuple(bounds))


def lexicographic_values(rng: random.Random, family, size: int) -> list[Fraction]:
    layers = []
    for _ in range(rng.randint(1, 3)):
        layers.append([rng.choice([0, 0, 1, 2, 3]) for _ in range(size)])
    layers.append([rng.randint(1, 4) for _ in range(size)])
    values = []
    for ce in family:
        for mu in layers:
            h = sum(mu[w] for w in ce.antecedent.worlds())
            if h:
                values.append(Fraction(sum(mu[w] for w in ce.conjunction.worlds()), h))
                break
    return values


def random_precise(rng: random.Random, n: int, atoms: int) -> Assessment:
    family = random_family(rng, n, atoms)
    return Assessment.precise(family, lexicographic_values(rng, family, 1 << atoms))


def widen(rng: random.Random, precise: Assessment) -> Assessment:
    bounds = []
    for p in precise.values:
        lo = max(Fraction(0), p - rng.choice([0, Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]))
        hi = min(Fraction(1), p + rng.choice([0, Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]))
        bounds.append((lo, hi))
    return Assessment(precise.family, tuple(bounds))


def random_gcoherent(rng: random.Random, n: int, atoms: int) -> Assessment:
    return widen(rng, random_precise(rng, n, atoms))


def dnf(ev: Event, atoms) -> str:
    """Expression text for an event given as a world set."""
    if not ev:
        return "FALSE"
    terms = []
    for w in ev.worlds():
        lits = [name if w >> j & 1 else "~" + name for j, name in enumerate(atoms)]
        terms.append("(" + " & ".join(lits) + ")")
    return " | ".join(terms)
