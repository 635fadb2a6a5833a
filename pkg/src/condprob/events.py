"""Propositional events, conditional events and constituent partitions.

Events are sets of atomic worlds stored as integer bitmasks: world ``w``
(bit ``j`` of ``w`` is the truth value of atom ``j``) belongs to an event
when bit ``w`` of its mask is set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

DEFAULT_WORLD_CAP = 20

_ATOM_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_KEYWORDS = {"TRUE", "FALSE"}


class EventSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class UndeclaredAtomError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"undeclared atom {name!r}")
        self.name = name


class WorldCapError(ValueError):
    def __init__(self, atoms: int, cap: int):
        super().__init__(f"{atoms} atoms exceed the world cap of {cap} (2^{atoms} worlds)")
        self.atoms = atoms
        self.cap = cap


class EmptyAntecedentError(ValueError):
    def __init__(self, index: int, label: str = ""):
        where = f" ({label})" if label else ""
        super().__init__(f"conditional event {index + 1}{where} has an impossible antecedent")
        self.index = index


class StructureError(RuntimeError):
    """A partition relation that should hold by construction does not."""


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class Not:
    operand: "Expr"

    def __str__(self) -> str:
        inner = str(self.operand)
        if isinstance(self.operand, (And, Or)):
            inner = f"({inner})"
        return "~" + inner


@dataclass(frozen=True)
class And:
    operands: tuple

    def __str__(self) -> str:
        return " & ".join(f"({o})" if isinstance(o, Or) else str(o) for o in self.operands)


@dataclass(frozen=True)
class Or:
    operands: tuple

    def __str__(self) -> str:
        return " | ".join(str(o) for o in self.operands)


Expr = Union[Var, Const, Not, And, Or]


def check_atoms(atoms: Sequence[str]) -> None:
    seen = set()
    for name in atoms:
        if not _ATOM_RE.match(name) or name in _KEYWORDS:
            raise ValueError(f"invalid atom name {name!r}")
        if name in seen:
            raise ValueError(f"duplicate atom {name!r}")
        seen.add(name)


_TOKEN_RE = re.compile(r"\s*(?:(?P<op>[~&|()])|(?P<name>[A-Za-z][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise EventSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        tokens.append((m.group("op") or m.group("name"), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, atoms: Sequence[str]):
        self.text = text
        self.atoms = set(atoms)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str):
        raise EventSyntaxError(message, self.text, self.tokens[self.i][1])

    def parse(self) -> Expr:
        expr = self.disjunction()
        if self.peek() != "":
            self.fail(f"unexpected {self.peek()!r}")
        return expr

    def disjunction(self) -> Expr:
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Expr:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Expr:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            expr = self.disjunction()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return expr
        if tok == "TRUE":
            self.take()
            return Const(True)
        if tok == "FALSE":
            self.take()
            return Const(False)
        if tok and _ATOM_RE.match(tok):
            if tok not in self.atoms:
                raise UndeclaredAtomError(tok)
            self.take()
            return Var(tok)
        self.fail("expected an atom, TRUE, FALSE, '~' or '('" if tok else "unexpected end of expression")


def parse_event(text: str, atoms: Sequence[str]) -> Expr:
    """Parse ``text`` with ``~`` binding tighter than ``&``, and ``&`` tighter than ``|``."""
    return _Parser(text, atoms).parse()


def world_assignment(index: int, atoms: Sequence[str]) -> dict[str, bool]:
    return {name: bool(index >> j & 1) for j, name in enumerate(atoms)}


def evaluate(expr: Expr, world: Mapping[str, bool]) -> bool:
    if isinstance(expr, Var):
        return bool(world[expr.name])
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Not):
        return not evaluate(expr.operand, world)
    if isinstance(expr, And):
        return all(evaluate(o, world) for o in expr.operands)
    if isinstance(expr, Or):
        return any(evaluate(o, world) for o in expr.operands)
    raise TypeError(f"not an expression: {expr!r}")


# --- events ----------------------------------------------------------------

@dataclass(frozen=True)
class Event:
    """A set of worlds out of ``size`` worlds.  Equality is world-set equality."""

    mask: int
    size: int
    text: str | None = field(default=None, compare=False)

    @classmethod
    def full(cls, size: int) -> "Event":
        return cls((1 << size) - 1, size, "TRUE")

    @classmethod
    def empty(cls, size: int) -> "Event":
        return cls(0, size, "FALSE")

    @classmethod
    def from_worlds(cls, worlds: Iterable[int], size: int, text: str | None = None) -> "Event":
        mask = 0
        for w in worlds:
            if not 0 <= w < size:
                raise ValueError(f"world {w} out of range for {size} worlds")
            mask |= 1 << w
        return cls(mask, size, text)

    def _check(self, other: "Event") -> None:
        if self.size != other.size:
            raise ValueError("events over different world spaces")

    def __and__(self, other: "Event") -> "Event":
        self._check(other)
        text = None
        if self.text is not None and other.text is not None:
            text = f"{_wrap_or(self.text)} & {_wrap_or(other.text)}"
        return Event(self.mask & other.mask, self.size, text)

    def __or__(self, other: "Event") -> "Event":
        self._check(other)
        text = None
        if self.text is not None and other.text is not None:
            text = f"{self.text} | {other.text}"
        return Event(self.mask | other.mask, self.size, text)

    def __invert__(self) -> "Event":
        text = None if self.text is None else "~" + (self.text if _is_simple(self.text) else f"({self.text})")
        return Event(((1 << self.size) - 1) ^ self.mask, self.size, text)

    def __le__(self, other: "Event") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "Event") -> bool:
        return other <= self

    def __bool__(self) -> bool:
        return self.mask != 0

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, world: int) -> bool:
        return bool(self.mask >> world & 1)

    def worlds(self) -> list[int]:
        out, mask, w = [], self.mask, 0
        while mask:
            if mask & 1:
                out.append(w)
            mask >>= 1
            w += 1
        return out

    def describe(self) -> str:
        return self.text if self.text is not None else "{" + ",".join(map(str, self.worlds())) + "}"

    def __repr__(self) -> str:
        return f"Event({self.describe()})"


def _is_simple(text: str) -> bool:
    return re.fullmatch(r"~*[A-Za-z][A-Za-z0-9_]*", text) is not None


def _wrap_or(text: str) -> str:
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "|" and depth == 0:
            return f"({text})"
    return text


def _atom_mask(j: int, m: int) -> int:
    # worlds whose bit j is set: blocks of 2^j ones every 2^(j+1) worlds
    n = 1 << m
    half = 1 << j
    period = half << 1
    block = ((1 << half) - 1) << half
    return block * (((1 << n) - 1) // ((1 << period) - 1))


def extension(expr: Expr, atoms: Sequence[str], world_cap: int = DEFAULT_WORLD_CAP) -> Event:
    """The set of worlds over ``atoms`` in which ``expr`` holds."""
    m = len(atoms)
    if m > world_cap:
        raise WorldCapError(m, world_cap)
    size = 1 << m
    full = (1 << size) - 1
    index = {name: j for j, name in enumerate(atoms)}

    def go(e: Expr) -> int:
        if isinstance(e, Var):
            if e.name not in index:
                raise UndeclaredAtomError(e.name)
            return _atom_mask(index[e.name], m)
        if isinstance(e, Const):
            return full if e.value else 0
        if isinstance(e, Not):
            return full ^ go(e.operand)
        if isinstance(e, And):
            out = full
            for o in e.operands:
                out &= go(o)
            return out
        if isinstance(e, Or):
            out = 0
            for o in e.operands:
                out |= go(o)
            return out
        raise TypeError(f"not an expression: {e!r}")

    return Event(go(expr), size, str(expr))


def event(text: str, atoms: Sequence[str], world_cap: int = DEFAULT_WORLD_CAP) -> Event:
    """Parse and extend in one step."""
    return extension(parse_event(text, atoms), atoms, world_cap)


# --- conditional events and constituents -----------------------------------

@dataclass(frozen=True)
class ConditionalEvent:
    consequent: Event
    antecedent: Event

    def __post_init__(self):
        self.consequent._check(self.antecedent)

    @property
    def conjunction(self) -> Event:
        return self.consequent & self.antecedent

    @property
    def key(self) -> tuple[int, int]:
        """Identity of E|H as a three-valued entity: the pair (EH, H)."""
        return (self.consequent.mask & self.antecedent.mask, self.antecedent.mask)

    @property
    def complement_key(self) -> tuple[int, int]:
        h = self.antecedent.mask
        return (h & ~self.consequent.mask, h)

    @property
    def label(self) -> str:
        return f"{self.consequent.describe()} | {self.antecedent.describe()}"

    def __repr__(self) -> str:
        return f"ConditionalEvent({self.label})"


@dataclass(frozen=True)
class Constituent:
    signature: tuple[int, ...]  # digit i refers to conditional event i
    worlds: Event

    @property
    def r(self) -> int:
        return sum(d * 3**i for i, d in enumerate(self.signature))

    @property
    def key(self) -> str:
        """Ternary numeral of ``r``, most significant digit (last event) first."""
        return "".join(str(d) for d in reversed(self.signature))


@dataclass(frozen=True)
class ConstituentSet:
    family: tuple[ConditionalEvent, ...]
    constituents: tuple[Constituent, ...]
    union_antecedent: Event

    def __iter__(self) -> Iterator[Constituent]:
        return iter(self.constituents)

    def __len__(self) -> int:
        return len(self.constituents)

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(c.key for c in self.constituents)

    def indicator(self, event: Event) -> tuple[int, ...]:
        """0/1 vector marking the constituents contained in ``event``."""
        return tuple(int(c.worlds <= event) for c in self.constituents)

    def is_measurable(self, event: Event) -> bool:
        """True when ``event`` is a union of constituents."""
        covered = 0
        for c in self.constituents:
            if c.worlds <= event:
                covered |= c.worlds.mask
        return covered == event.mask


def dedup_family(family: Iterable[ConditionalEvent]) -> tuple[ConditionalEvent, ...]:
    seen: set = set()
    out = []
    for ce in family:
        if ce.key not in seen:
            seen.add(ce.key)
            out.append(ce)
    return tuple(out)


def build_constituents(family: Sequence[ConditionalEvent]) -> ConstituentSet:
    """Non-empty constituents of ``family``, ordered by ascending ternary value."""
    if not family:
        raise ValueError("empty family")
    for i, ce in enumerate(family):
        if not ce.antecedent:
            raise EmptyAntecedentError(i, ce.label)
    family = dedup_family(family)
    size = family[0].antecedent.size
    parts: list[tuple[tuple[int, ...], int]] = [((), (1 << size) - 1)]
    for ce in family:
        h = ce.antecedent.mask
        eh = ce.consequent.mask & h
        ech = h & ~eh
        split = []
        for sig, mask in parts:
            for digit, piece in ((1, mask & eh), (0, mask & ech), (2, mask & ~h)):
                if piece:
                    split.append((sig + (digit,), piece))
        parts = split
    constituents = [Constituent(sig, Event(mask, size)) for sig, mask in parts]
    constituents.sort(key=lambda c: c.r)
    union = family[0].antecedent
    for ce in family[1:]:
        union = union | ce.antecedent
    return ConstituentSet(family, tuple(constituents), union)


def constituents_of(event: Event, cs: ConstituentSet) -> list[Constituent]:
    return [c for c in cs.constituents if c.worlds <= event]


def parent_constituent(c0: Constituent, sub: ConstituentSet) -> Constituent:
    if not c0.worlds:
        raise StructureError("empty constituent has no parent")
    parents = [c for c in sub.constituents if c0.worlds <= c.worlds]
    if len(parents) != 1:
        raise StructureError(f"constituent {c0.key} has {len(parents)} parents in the coarser partition")
    return parents[0]
