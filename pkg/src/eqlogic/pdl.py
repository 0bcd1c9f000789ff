"""Propositional dynamic logic over finite Kripke structures.

Formulas mirror the HML syntax with programs inside the modalities::

    [a;(b+c)*]final      <p? ; a>q      init => <a>true      p <=> q

Tests are restricted to propositional formulas (poor-test PDL).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping

from ._lexer import TokenStream
from .errors import RichTestRejected, UnknownProposition, UnknownState
from .regprog import (
    Choice,
    Interpretation,
    Prim,
    Program,
    ProgramParser,
    Relation,
    Seq,
    Star,
    Test,
    eval_relation,
)

State = Hashable


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return _show(self)

    def __repr__(self) -> str:
        return f"pdl<{self}>"


@dataclass(frozen=True, repr=False)
class Prop(Formula):
    name: str


@dataclass(frozen=True, repr=False)
class Truth(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Box(Formula):
    program: Program
    body: Formula


TRUE = Truth()
FALSE = Not(TRUE)


def diamond(program: Program, body: Formula) -> Formula:
    return Not(Box(program, Not(body)))


def disj(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return disj(Not(left), right)


def iff(left: Formula, right: Formula) -> Formula:
    return And(implies(left, right), implies(right, left))


def modal_depth(f: Formula) -> int:
    match f:
        case Prop() | Truth():
            return 0
        case Not(body):
            return modal_depth(body)
        case And(left, right):
            return max(modal_depth(left), modal_depth(right))
        case Box(_, body):
            return 1 + modal_depth(body)
    raise TypeError(f)


def size(f: Formula) -> int:
    match f:
        case Prop() | Truth():
            return 1
        case Not(body) | Box(_, body):
            return 1 + size(body)
        case And(left, right):
            return 1 + size(left) + size(right)
    raise TypeError(f)


def is_propositional(f: Formula) -> bool:
    match f:
        case Prop() | Truth():
            return True
        case Not(body):
            return is_propositional(body)
        case And(left, right):
            return is_propositional(left) and is_propositional(right)
    return False


def propositions(f: Formula) -> frozenset[str]:
    match f:
        case Prop(name):
            return frozenset({name})
        case Truth():
            return frozenset()
        case Not(body):
            return propositions(body)
        case And(left, right):
            return propositions(left) | propositions(right)
        case Box(prog, body):
            return _program_props(prog) | propositions(body)
    raise TypeError(f)


def _program_props(p: Program) -> frozenset[str]:
    match p:
        case Test(formula):
            return propositions(formula)
        case Seq(left, right) | Choice(left, right):
            return _program_props(left) | _program_props(right)
        case Star(body):
            return _program_props(body)
    return frozenset()


def formula_primitives(f: Formula) -> frozenset[str]:
    """Primitive program names under the boxes of ``f``, tests included."""
    match f:
        case Prop() | Truth():
            return frozenset()
        case Not(body):
            return formula_primitives(body)
        case And(left, right):
            return formula_primitives(left) | formula_primitives(right)
        case Box(prog, body):
            return _program_prims(prog) | formula_primitives(body)
    raise TypeError(f)


def _program_prims(p: Program) -> frozenset[str]:
    match p:
        case Prim(name):
            return frozenset({name})
        case Test(formula):
            return formula_primitives(formula)
        case Seq(left, right) | Choice(left, right):
            return _program_prims(left) | _program_prims(right)
        case Star(body):
            return _program_prims(body)
    return frozenset()


def _show(f: Formula) -> str:
    match f:
        case Prop(name):
            return name
        case Truth():
            return "true"
        case Not(Truth()):
            return "false"
        case Not(Box(prog, Not(body))):
            return f"<{prog}>{_show(body)}"
        case Not(And(Not(Not(left)), Not(right))):
            return f"({_show(left)} => {_show(right)})"
        case Not(And(Not(left), Not(right))):
            return f"({_show(left)} | {_show(right)})"
        case Not(body):
            return f"~{_show(body)}"
        case And(left, right):
            return f"({_show(left)} & {_show(right)})"
        case Box(prog, body):
            return f"[{prog}]{_show(body)}"
    raise TypeError(f)


# ---------------------------------------------------------------- parsing


class PdlParser(ProgramParser):
    """Formulas and programs with tests, parsed together."""

    def __init__(self, ts: TokenStream, rich_tests: bool = False):
        super().__init__(ts, ka=False)
        self.rich_tests = rich_tests

    def test_formula(self) -> Formula:
        tok = self.ts.peek()
        f = self.unary()
        if not self.rich_tests and not is_propositional(f):
            raise RichTestRejected(f"test {f}? contains a modality (at offset {tok.pos})")
        return f

    def formula(self) -> Formula:
        left = self.implication()
        if self.ts.accept("<=>"):
            return iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.ts.accept("=>"):
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.ts.accept("|"):
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.ts.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        ts = self.ts
        if ts.accept("~"):
            return Not(self.unary())
        if ts.accept("["):
            prog = self.program()
            ts.expect("]")
            return Box(prog, self.unary())
        if ts.accept("<"):
            prog = self.program()
            ts.expect(">")
            return diamond(prog, self.unary())
        if ts.accept("true"):
            return TRUE
        if ts.accept("false"):
            return FALSE
        if ts.accept("("):
            f = self.formula()
            ts.expect(")")
            return f
        tok = ts.peek()
        if tok.kind == "ident":
            ts.next()
            return Prop(tok.value)
        ts.error("expected a formula")


def parse_pdl(text: str) -> Formula:
    ts = TokenStream(text)
    f = PdlParser(ts).formula()
    ts.expect_eof()
    return f


def parse_test_program(text: str) -> Program:
    """Parse a program that may contain propositional tests."""
    ts = TokenStream(text)
    p = PdlParser(ts).program()
    ts.expect_eof()
    return p


# ---------------------------------------------------------------- structures


@dataclass(frozen=True, eq=False)
class KripkeStructure:
    """``(S, pi, sigma)``: states, a valuation of primitive propositions, and
    an interpretation of primitive programs over the same states."""

    states: tuple
    valuation: Mapping[State, Mapping[str, bool]]
    sigma: Interpretation
    propositions: frozenset = field(default=frozenset())

    def __post_init__(self):
        states = tuple(self.states)
        props = set(self.propositions)
        for s in states:
            props |= set(self.valuation.get(s, {}))
        unknown = set(self.valuation) - set(states)
        if unknown:
            raise UnknownState(", ".join(sorted(map(str, unknown))))
        val = {s: {p: bool(self.valuation.get(s, {}).get(p, False)) for p in sorted(props)} for s in states}
        if self.sigma.states != frozenset(states):
            raise ValueError("program interpretation is over a different state set")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "valuation", val)
        object.__setattr__(self, "propositions", frozenset(props))

    def holds(self, state: State, prop: str) -> bool:
        if state not in self.valuation:
            raise UnknownState(state)
        if prop not in self.propositions:
            raise UnknownProposition(prop)
        return self.valuation[state][prop]

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "props": {str(s): dict(v) for s, v in self.valuation.items()},
            "relations": self.sigma.to_json()["relations"],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> KripkeStructure:
        states = list(data["states"])
        by_name = {str(s): s for s in states}
        props = {}
        for key, vals in data.get("props", {}).items():
            if key not in by_name:
                raise UnknownState(key)
            props[by_name[key]] = dict(vals)
        sigma = Interpretation.from_json({"states": states, "relations": data.get("relations", {})})
        return cls(tuple(states), props, sigma)


class _Checker:
    """Extension-set evaluator with per-structure caches."""

    def __init__(self, m: KripkeStructure, rich_tests: bool = False):
        self.m = m
        self.rich_tests = rich_tests
        self.ext_cache: dict[Formula, frozenset] = {}
        self.rel_cache: dict[Program, Relation] = {}

    def relation(self, prog: Program) -> Relation:
        if prog not in self.rel_cache:
            self.rel_cache[prog] = eval_relation(self.m.sigma, prog, test=self._test)
        return self.rel_cache[prog]

    def _test(self, f: Formula) -> frozenset:
        if not self.rich_tests and not is_propositional(f):
            raise RichTestRejected(f"test {f}? contains a modality")
        return self.extension(f)

    def extension(self, f: Formula) -> frozenset:
        if f in self.ext_cache:
            return self.ext_cache[f]
        m = self.m
        match f:
            case Prop(name):
                if name not in m.propositions:
                    raise UnknownProposition(name)
                out = frozenset(s for s in m.states if m.valuation[s][name])
            case Truth():
                out = frozenset(m.states)
            case Not(body):
                out = frozenset(m.states) - self.extension(body)
            case And(left, right):
                out = self.extension(left) & self.extension(right)
            case Box(prog, body):
                good = self.extension(body)
                bad = {u for u, v in self.relation(prog) if v not in good}
                out = frozenset(m.states) - bad
            case _:
                raise TypeError(f"not a PDL formula: {f!r}")
        self.ext_cache[f] = out
        return out


_checkers: dict[int, _Checker] = {}


def _checker(m: KripkeStructure) -> _Checker:
    c = _checkers.get(id(m))
    if c is None or c.m is not m:
        if len(_checkers) > 256:
            _checkers.clear()
        c = _checkers[id(m)] = _Checker(m)
    return c


def program_relation(m: KripkeStructure, program: Program) -> Relation:
    """Input-output relation of ``program`` in ``m``, tests included."""
    return _checker(m).relation(program)


def extension(m: KripkeStructure, f: Formula) -> frozenset:
    """The set of states of ``m`` at which ``f`` holds."""
    return _checker(m).extension(f)


def pdl_satisfies(m: KripkeStructure, state: State, f: Formula) -> bool:
    if state not in m.valuation:
        raise UnknownState(state)
    return state in extension(m, f)


def valid_in(m: KripkeStructure, f: Formula) -> bool:
    return extension(m, f) == frozenset(m.states)


def enumerate_pdl(
    props: Iterable[str], programs: Iterable[Program], max_modal_depth: int, max_size: int
) -> Iterator[Formula]:
    """Core PDL formulas (props, ``true``, ``~``, ``&``, boxes over ``programs``)
    within both bounds, ordered by size then printed text."""
    atoms = [TRUE] + [Prop(p) for p in sorted(set(props))]
    progs = sorted(set(programs), key=str)
    layers: list[list[tuple[Formula, int]]] = [[]]
    for n in range(1, max_size + 1):
        layer: list[tuple[Formula, int]] = []
        if n == 1:
            layer = [(a, 0) for a in atoms]
        else:
            for f, d in layers[n - 1]:
                layer.append((Not(f), d))
                if d < max_modal_depth:
                    layer.extend((Box(p, f), d + 1) for p in progs)
            for i in range(1, n - 1):
                for f, d in layers[i]:
                    for g, e in layers[n - 1 - i]:
                        layer.append((And(f, g), max(d, e)))
        layer.sort(key=lambda fd: _core_key(fd[0]))
        layers.append(layer)
        for f, _ in layer:
            yield f


def _core_key(f: Formula) -> str:
    match f:
        case Prop(name):
            return name
        case Truth():
            return "true"
        case Not(body):
            return "~" + _core_key(body)
        case And(left, right):
            return f"({_core_key(left)} & {_core_key(right)})"
        case Box(prog, body):
            return f"[{prog}]{_core_key(body)}"
    raise TypeError(f)


def primitive_programs(names: Iterable[str]) -> list[Program]:
    return [Prim(n) for n in sorted(set(names))]
