"""Regular programs and their input-output (relational) semantics.

Syntax, loosest to tightest: ``+`` (choice), ``;`` (sequence), postfix ``*``.
Both binary operators associate to the left. The Kleene-algebra constants
``0`` and ``1`` are accepted only with ``ka=True``; tests ``phi?`` only through
:mod:`eqlogic.pdl`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from ._lexer import TokenStream
from .errors import GrammarError, UnknownPrimitive

State = Hashable
Relation = frozenset  # of (State, State)


class Program:
    __slots__ = ()

    def __str__(self) -> str:
        return _show(self, 0)

    def __repr__(self) -> str:
        return f"prog<{self}>"


@dataclass(frozen=True, repr=False)
class Prim(Program):
    name: str


@dataclass(frozen=True, repr=False)
class Seq(Program):
    left: Program
    right: Program


@dataclass(frozen=True, repr=False)
class Choice(Program):
    left: Program
    right: Program


@dataclass(frozen=True, repr=False)
class Star(Program):
    body: Program


@dataclass(frozen=True, repr=False)
class Zero(Program):
    pass


@dataclass(frozen=True, repr=False)
class One(Program):
    pass


@dataclass(frozen=True, repr=False)
class Test(Program):
    formula: object  # a pdl.Formula


ZERO = Zero()
ONE = One()

_CHOICE, _SEQ, _STAR = range(3)


def _level(p: Program) -> int:
    match p:
        case Choice():
            return _CHOICE
        case Seq():
            return _SEQ
        case _:
            return _STAR


def _show(p: Program, need: int) -> str:
    match p:
        case Prim(name):
            s = name
        case Zero():
            s = "0"
        case One():
            s = "1"
        case Seq(left, right):
            s = f"{_show(left, _SEQ)};{_show(right, _STAR)}"
        case Choice(left, right):
            s = f"{_show(left, _CHOICE)} + {_show(right, _SEQ)}"
        case Star(body):
            s = f"{_show(body, _STAR)}*"
            if isinstance(body, Star):
                s = f"({_show(body, _STAR)})*"
        case Test(formula):
            text = str(formula)
            s = f"{text}?" if text.isidentifier() else f"({text})?"
        case _:
            raise TypeError(f"not a program: {p!r}")
    return f"({s})" if _level(p) < need else s


def primitives(p: Program) -> frozenset[str]:
    match p:
        case Prim(name):
            return frozenset({name})
        case Seq(left, right) | Choice(left, right):
            return primitives(left) | primitives(right)
        case Star(body):
            return primitives(body)
        case Zero() | One() | Test():
            return frozenset()
    raise TypeError(p)


def size(p: Program) -> int:
    match p:
        case Seq(left, right) | Choice(left, right):
            return 1 + size(left) + size(right)
        case Star(body):
            return 1 + size(body)
        case _:
            return 1


def is_core(p: Program) -> bool:
    """True iff ``p`` uses only primitives, ``;``, ``+`` and ``*``."""
    match p:
        case Prim():
            return True
        case Seq(left, right) | Choice(left, right):
            return is_core(left) and is_core(right)
        case Star(body):
            return is_core(body)
    return False


def is_ka_term(p: Program) -> bool:
    match p:
        case Prim() | Zero() | One():
            return True
        case Seq(left, right) | Choice(left, right):
            return is_ka_term(left) and is_ka_term(right)
        case Star(body):
            return is_ka_term(body)
    return False


def seq_all(parts: Iterable[Program]) -> Program:
    """Left-nested sequence; the empty sequence is ``1``."""
    out = None
    for part in parts:
        out = part if out is None else Seq(out, part)
    return ONE if out is None else out


# ---------------------------------------------------------------- parsing


class ProgramParser:
    """Recursive-descent parser for programs over a shared token stream.

    Subclasses parse tests by overriding :meth:`test_formula`.
    """

    def __init__(self, ts: TokenStream, ka: bool = False):
        self.ts = ts
        self.ka = ka

    def program(self) -> Program:
        left = self.sequence()
        while self.ts.accept("+"):
            left = Choice(left, self.sequence())
        return left

    def sequence(self) -> Program:
        left = self.starred()
        while self.ts.accept(";"):
            left = Seq(left, self.starred())
        return left

    def starred(self) -> Program:
        p = self.atom()
        while self.ts.accept("*"):
            p = Star(p)
        return p

    def atom(self) -> Program:
        ts = self.ts
        tok = ts.peek()
        if ts.at("("):
            close = ts.matching_paren()
            if close >= 0 and ts.tokens[close + 1].value == "?" and ts.tokens[close + 1].kind == "op":
                return self._test(tok)
            ts.next()
            p = self.program()
            ts.expect(")")
            return p
        if tok.kind == "num":
            if tok.value not in ("0", "1"):
                ts.error("only the constants 0 and 1 are numerals")
            if not self.ka:
                ts.error("constants 0 and 1 need the Kleene-algebra grammar", tok, GrammarError)
            ts.next()
            return ZERO if tok.value == "0" else ONE
        if tok.kind == "ident":
            if ts.at("?", 1):
                return self._test(tok)
            ts.next()
            return Prim(tok.value)
        ts.error("expected a program")

    def _test(self, tok) -> Program:
        f = self.test_formula()
        self.ts.expect("?")
        return Test(f)

    def test_formula(self):
        self.ts.error("tests are only allowed in PDL programs", cls=GrammarError)


def parse_program(text: str, ka: bool = False) -> Program:
    ts = TokenStream(text)
    p = ProgramParser(ts, ka=ka).program()
    ts.expect_eof()
    return p


# ---------------------------------------------------------------- relations


@dataclass(frozen=True)
class Interpretation:
    """A finite state set with one binary relation per primitive program."""

    states: frozenset
    relations: Mapping[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        rels = {name: frozenset(map(tuple, pairs)) for name, pairs in self.relations.items()}
        for name, pairs in rels.items():
            for u, v in pairs:
                if u not in self.states or v not in self.states:
                    raise ValueError(f"pair {(u, v)} of {name!r} leaves the state set")
        object.__setattr__(self, "relations", rels)

    def __hash__(self) -> int:
        return hash((self.states, tuple(sorted(self.relations.items(), key=lambda kv: kv[0]))))

    def relation(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownPrimitive(name) from None

    def to_json(self) -> dict:
        return {
            "states": _sorted(self.states),
            "relations": {k: [list(p) for p in _sorted(v)] for k, v in sorted(self.relations.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Interpretation:
        states = [_jsonable_state(s) for s in data["states"]]
        rels = {
            name: [(_jsonable_state(u), _jsonable_state(v)) for u, v in pairs]
            for name, pairs in data.get("relations", {}).items()
        }
        return cls(frozenset(states), rels)


def _jsonable_state(s):
    return tuple(s) if isinstance(s, list) else s


def _sorted(items):
    return sorted(items, key=lambda x: (str(type(x)), x))


def identity(states: Iterable[State]) -> Relation:
    return frozenset((s, s) for s in states)


def compose(r: Relation, s: Relation) -> Relation:
    """``{(u, v) | exists w. (u, w) in r and (w, v) in s}``."""
    succ: dict = {}
    for w, v in s:
        succ.setdefault(w, set()).add(v)
    return frozenset((u, v) for u, w in r for v in succ.get(w, ()))


def reflexive_transitive_closure(r: Relation, states: Iterable[State]) -> Relation:
    """Union of ``r**n`` for ``n >= 0``, iterated until no new pair appears."""
    acc = set(identity(states))
    frontier = set(acc)
    while frontier:
        new = compose(frontier, r) - acc
        acc |= new
        frontier = new
    return frozenset(acc)


def eval_relation(sigma: Interpretation, program: Program, test=None) -> Relation:
    """Extend ``sigma`` from primitives to every program.

    ``test`` maps a test formula to the set of states satisfying it; without it,
    tests are rejected.
    """
    match program:
        case Prim(name):
            return sigma.relation(name)
        case Seq(left, right):
            return compose(eval_relation(sigma, left, test), eval_relation(sigma, right, test))
        case Choice(left, right):
            return eval_relation(sigma, left, test) | eval_relation(sigma, right, test)
        case Star(body):
            return reflexive_transitive_closure(eval_relation(sigma, body, test), sigma.states)
        case Zero():
            return frozenset()
        case One():
            return identity(sigma.states)
        case Test(formula):
            if test is None:
                raise TypeError("tests need a Kripke structure; use pdl.program_relation")
            return identity(test(formula))
    raise TypeError(f"not a program: {program!r}")
