"""Hennessy-Milner logic: formulas, parsing, satisfaction, and bounded enumeration.

The core connectives are ``true``, negation, conjunction and the box modality.
``false``, ``|``, ``=>`` and ``<a>`` are parsed into the core forms::

    false    = ~true
    f | g    = ~(~f & ~g)
    f => g   = ~f | g
    <a>f     = ~[a]~f
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator

from ._lexer import TokenStream
from .ccs import TAU, Action, Process, receive, send, transitions


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return _show(self)

    def __repr__(self) -> str:
        return f"hml<{self}>"


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
    action: Action
    body: Formula


TRUE = Truth()
FALSE = Not(TRUE)


def diamond(action: Action, body: Formula) -> Formula:
    return Not(Box(action, Not(body)))


def disj(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return disj(Not(left), right)


def conj_all(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out = None
    for part in parts:
        out = part if out is None else And(out, part)
    return TRUE if out is None else out


def size(f: Formula) -> int:
    match f:
        case Truth():
            return 1
        case Not(body) | Box(_, body):
            return 1 + size(body)
        case And(left, right):
            return 1 + size(left) + size(right)
    raise TypeError(f)


def modal_depth(f: Formula) -> int:
    match f:
        case Truth():
            return 0
        case Not(body):
            return modal_depth(body)
        case And(left, right):
            return max(modal_depth(left), modal_depth(right))
        case Box(_, body):
            return 1 + modal_depth(body)
    raise TypeError(f)


def _show(f: Formula) -> str:
    """Render with sugar where the core shape matches it exactly; parses back to ``f``."""
    match f:
        case Truth():
            return "true"
        case Not(Truth()):
            return "false"
        case Not(Box(a, Not(body))):
            return f"<{a}>{_show(body)}"
        case Not(And(Not(Not(left)), Not(right))):
            return f"({_show(left)} => {_show(right)})"
        case Not(And(Not(left), Not(right))):
            return f"({_show(left)} | {_show(right)})"
        case Not(body):
            return f"~{_show(body)}"
        case And(left, right):
            return f"({_show(left)} & {_show(right)})"
        case Box(a, body):
            return f"[{a}]{_show(body)}"
    raise TypeError(f)


def core_text(f: Formula) -> str:
    """Sugar-free rendering; the sort key of :func:`enumerate_formulas`."""
    match f:
        case Truth():
            return "true"
        case Not(body):
            return f"~{core_text(body)}"
        case And(left, right):
            return f"({core_text(left)} & {core_text(right)})"
        case Box(a, body):
            return f"[{a}]{core_text(body)}"
    raise TypeError(f)


class _Parser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)

    def parse(self) -> Formula:
        f = self.implication()
        self.ts.expect_eof()
        return f

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
            a = self.action()
            ts.expect("]")
            return Box(a, self.unary())
        if ts.accept("<"):
            a = self.action()
            ts.expect(">")
            return diamond(a, self.unary())
        if ts.accept("true"):
            return TRUE
        if ts.accept("false"):
            return FALSE
        if ts.accept("("):
            f = self.implication()
            ts.expect(")")
            return f
        ts.error("expected a formula")

    def action(self) -> Action:
        tok = self.ts.expect_ident("action")
        if tok.value == "tau":
            return TAU
        if self.ts.accept("?"):
            return receive(tok.value)
        if self.ts.accept("!"):
            return send(tok.value)
        self.ts.error("expected '?' or '!' after channel name")


def parse_hml(text: str) -> Formula:
    return _Parser(text).parse()


@functools.lru_cache(maxsize=1 << 18)
def satisfies(p: Process, f: Formula) -> bool:
    match f:
        case Truth():
            return True
        case Not(body):
            return not satisfies(p, body)
        case And(left, right):
            return satisfies(p, left) and satisfies(p, right)
        case Box(a, body):
            return all(satisfies(q, body) for b, q in transitions(p) if b == a)
    raise TypeError(f"not an HML formula: {f!r}")


def enumerate_formulas(
    actions: Iterable[Action], max_modal_depth: int, max_size: int
) -> Iterator[Formula]:
    """Every core formula within both bounds, ordered by size then :func:`core_text`."""
    if max_modal_depth < 0:
        raise ValueError("max_modal_depth must be >= 0")
    acts = sorted(set(actions))
    # layers[n] holds (formula, modal depth) pairs of size exactly n
    layers: list[list[tuple[Formula, int]]] = [[]]
    for n in range(1, max_size + 1):
        layer: list[tuple[Formula, int]] = []
        if n == 1:
            layer.append((TRUE, 0))
        else:
            for f, d in layers[n - 1]:
                layer.append((Not(f), d))
                if d < max_modal_depth:
                    layer.extend((Box(a, f), d + 1) for a in acts)
            for i in range(1, n - 1):
                for f, d in layers[i]:
                    for g, e in layers[n - 1 - i]:
                        layer.append((And(f, g), max(d, e)))
        layer.sort(key=lambda fd: core_text(fd[0]))
        layers.append(layer)
        for f, _ in layer:
            yield f
