"""Exact rational linear programming: two-phase dense simplex with Bland's rule.

All variables are nonnegative.  Every returned witness is checked by exact
substitution before it leaves this module.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

RELATIONS = ("<=", ">=", "==")

_trace: contextvars.ContextVar[list | None] = contextvars.ContextVar("lp_trace", default=None)


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((a * v for a, v in zip(self.coeffs, x) if a), Fraction(0))
        if self.relation == "<=":
            return lhs <= self.rhs
        if self.relation == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


def constraint(coeffs, relation: str, rhs=0) -> Constraint:
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    return Constraint(tuple(Fraction(a) for a in coeffs), relation, Fraction(rhs))


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        n = len(self.variables)
        for k, c in enumerate(self.constraints):
            if len(c.coeffs) != n:
                raise ValueError(f"constraint {k} has {len(c.coeffs)} coefficients for {n} variables")
            if c.relation not in RELATIONS:
                raise ValueError(f"constraint {k} has unknown relation {c.relation!r}")

    def with_constraints(self, *extra: Constraint) -> "LinearProgram":
        return LinearProgram(self.variables, self.constraints + tuple(extra))

    def is_satisfied_by(self, x: Sequence[Fraction]) -> bool:
        return len(x) == len(self.variables) and all(v >= 0 for v in x) and all(c.holds(x) for c in self.constraints)


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "feasible", "infeasible", "optimal" or "unbounded"
    witness: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    pivots: int = 0

    @property
    def is_feasible(self) -> bool:
        return self.status in ("feasible", "optimal", "unbounded")


@contextlib.contextmanager
def recording() -> Iterator[list]:
    """Collect every program solved inside the block as ``(kind, lp, objective, outcome)``."""
    log: list = []
    token = _trace.set(log)
    try:
        yield log
    finally:
        _trace.reset(token)


def _record(kind, lp, objective, outcome):
    log = _trace.get()
    if log is not None:
        log.append((kind, lp, objective, outcome))


class _Tableau:
    def __init__(self, lp: LinearProgram):
        n = len(lp.variables)
        rows, rhs, kinds = [], [], []
        for c in lp.constraints:
            a, b, rel = list(c.coeffs), c.rhs, c.relation
            if b < 0:
                a, b = [-v for v in a], -b
                rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
            rows.append(a)
            rhs.append(b)
            kinds.append(rel)
        n_slack = sum(k != "==" for k in kinds)
        n_art = sum(k != "<=" for k in kinds)
        width = n + n_slack + n_art
        self.n = n
        self.first_artificial = n + n_slack
        self.rows: list[list[Fraction]] = []
        self.rhs = rhs
        self.basis: list[int] = []
        s = n
        t = self.first_artificial
        for a, kind in zip(rows, kinds):
            row = a + [Fraction(0)] * (width - n)
            if kind == "<=":
                row[s] = Fraction(1)
                self.basis.append(s)
                s += 1
            else:
                if kind == ">=":
                    row[s] = Fraction(-1)
                    s += 1
                row[t] = Fraction(1)
                self.basis.append(t)
                t += 1
            self.rows.append(row)
        self.width = width
        self.pivots = 0

    def pivot(self, r: int, j: int, cost_row: list[Fraction] | None = None) -> None:
        row = self.rows[r]
        p = row[j]
        if p != 1:
            row[:] = [v / p for v in row]
            self.rhs[r] /= p
        nz = [k for k, v in enumerate(row) if v]
        for i, other in enumerate(self.rows):
            if i != r and other[j]:
                f = other[j]
                for k in nz:
                    other[k] -= f * row[k]
                self.rhs[i] -= f * self.rhs[r]
        if cost_row is not None and cost_row[j]:
            f = cost_row[j]
            for k in nz:
                cost_row[k] -= f * row[k]
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for k, v in enumerate(self.rows[i]):
                    if v:
                        d[k] -= cb * v
        return d

    def minimize(self, cost: list[Fraction], columns: range) -> str:
        """Run primal simplex on ``cost`` restricted to entering ``columns``."""
        d = self.reduced_costs(cost)
        while True:
            entering = next((j for j in columns if d[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering, d)

    def value(self, cost: list[Fraction]) -> Fraction:
        return sum((cost[b] * self.rhs[i] for i, b in enumerate(self.basis) if cost[b]), Fraction(0))

    def point(self) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * self.n
        for i, b in enumerate(self.basis):
            if b < self.n:
                x[b] = self.rhs[i]
        return tuple(x)

    def phase_one(self) -> bool:
        cost = [Fraction(0)] * self.width
        for j in range(self.first_artificial, self.width):
            cost[j] = Fraction(1)
        self.minimize(cost, range(self.width))
        if self.value(cost) > 0:
            return False
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(self.rows):
            if self.basis[i] >= self.first_artificial:
                j = next((k for k in range(self.first_artificial) if self.rows[i][k]), None)
                if j is None:
                    del self.rows[i], self.rhs[i], self.basis[i]
                    continue
                self.pivot(i, j)
            i += 1
        return True


def _check_witness(lp: LinearProgram, x) -> None:
    if not lp.is_satisfied_by(x):
        raise AssertionError("simplex produced a point that violates the program")


def solve_feasibility(lp: LinearProgram) -> LpOutcome:
    tab = _Tableau(lp)
    if not tab.phase_one():
        out = LpOutcome("infeasible", pivots=tab.pivots)
    else:
        x = tab.point()
        _check_witness(lp, x)
        out = LpOutcome("feasible", x, pivots=tab.pivots)
    _record("feasibility", lp, None, out)
    return out


def optimize(lp: LinearProgram, objective: Sequence, direction: str = "min") -> LpOutcome:
    if len(objective) != len(lp.variables):
        raise ValueError("objective length does not match the variables")
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', not {direction!r}")
    sign = 1 if direction == "min" else -1
    tab = _Tableau(lp)
    if not tab.phase_one():
        out = LpOutcome("infeasible", pivots=tab.pivots)
    else:
        cost = [sign * Fraction(c) for c in objective] + [Fraction(0)] * (tab.width - tab.n)
        status = tab.minimize(cost, range(tab.first_artificial))
        x = tab.point()
        _check_witness(lp, x)
        if status == "unbounded":
            out = LpOutcome("unbounded", x, pivots=tab.pivots)
        else:
            out = LpOutcome("optimal", x, sign * tab.value(cost), tab.pivots)
    _record(direction, lp, tuple(Fraction(c) for c in objective), out)
    return out


def evaluate_form(form: Sequence, x: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(a) * v for a, v in zip(form, x) if a), Fraction(0))


def max_support_solution(lp: LinearProgram, tracked: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], tuple[bool, ...]]:
    """A feasible point at which every tracked form that can be positive is positive.

    Forms are assumed nonnegative on the feasible set (masses of events).
    Each form is maximized and the optimal vertices are averaged.
    """
    base = solve_feasibility(lp)
    if not base.is_feasible:
        raise InfeasibleError("the program has no feasible point")
    points = []
    for form in tracked:
        out = optimize(lp, form, "max")
        if out.status == "unbounded":
            raise ValueError("a tracked form is unbounded on the feasible set")
        points.append(out.witness)
    if not points:
        return base.witness, ()
    k = len(points)
    x = tuple(sum(col, Fraction(0)) / k for col in zip(*points))
    _check_witness(lp, x)
    flags = tuple(evaluate_form(form, x) > 0 for form in tracked)
    return x, flags
