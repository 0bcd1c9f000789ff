"""CCS process terms, their structural operational semantics, and LTS exploration.

Concrete syntax::

    P ::= 0 | act.P | P + P | P | P | nu x. P | (P)
    act ::= x? | x! | tau

Precedence from tightest to loosest: prefix, ``+``, ``|``, ``nu``.
Every summand of a ``+`` must be a prefixed process (or a parenthesized sum,
which is flattened). Restricted channels are renamed to fresh names of the form
``x#k`` at parse time.
"""
from __future__ import annotations

import functools
import json
import os
from collections import deque
from dataclasses import dataclass, fields
from typing import Iterable, Iterator

from ._lexer import TokenStream
from .errors import BudgetExceeded, GrammarError

RESERVED = frozenset({"tau", "nu"})
DEFAULT_STATE_BUDGET = 100_000
_KIND_ORDER = {"receive": 0, "send": 1, "tau": 2}


def default_state_budget() -> int:
    return int(os.environ.get("EQLOGIC_STATE_BUDGET", DEFAULT_STATE_BUDGET))


@dataclass(frozen=True)
class Action:
    kind: str
    channel: str | None = None

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "tau":
            if self.channel is not None:
                raise ValueError("tau carries no channel")
        elif not self.channel:
            raise ValueError("send/receive need a nonempty channel name")

    @property
    def is_tau(self) -> bool:
        return self.kind == "tau"

    def complement(self) -> Action:
        if self.kind == "send":
            return Action("receive", self.channel)
        if self.kind == "receive":
            return Action("send", self.channel)
        raise ValueError("tau has no complement")

    def sort_key(self) -> tuple:
        return (self.channel or "", _KIND_ORDER[self.kind])

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        return f"{self.channel}{'?' if self.kind == 'receive' else '!'}"

    def __repr__(self) -> str:
        return f"Action({str(self)!r})"

    def __lt__(self, other: Action) -> bool:
        return self.sort_key() < other.sort_key()


TAU = Action("tau")


def send(channel: str) -> Action:
    return Action("send", channel)


def receive(channel: str) -> Action:
    return Action("receive", channel)


def parse_action(text: str) -> Action:
    text = text.strip()
    if text == "tau":
        return TAU
    if len(text) > 1 and text[-1] in "?!":
        return Action("receive" if text[-1] == "?" else "send", text[:-1])
    raise ValueError(f"not an action: {text!r}")


class Process:
    """Base class of CCS terms. Instances are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        # printed names order states everywhere, so keep them
        text = self.__dict__.get("_str")
        if text is None:
            text = _show(self, 0)
            object.__setattr__(self, "_str", text)
        return text

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{self}>"


def _cached_hash(self) -> int:
    # terms are deep and hashed constantly by the LTS and bisimulation code
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True, repr=False)
class Sum(Process):
    summands: tuple[tuple[Action, Process], ...] = ()
    __hash__ = _cached_hash


@dataclass(frozen=True, repr=False)
class Par(Process):
    left: Process
    right: Process
    __hash__ = _cached_hash


@dataclass(frozen=True, repr=False)
class Nu(Process):
    channel: str
    body: Process
    __hash__ = _cached_hash


NIL = Sum(())


def prefix(action: Action, cont: Process = NIL) -> Sum:
    return Sum(((action, cont),))


# precedence levels used by the printer
_NU, _PAR, _SUM, _PREFIX = range(4)


def _level(p: Process) -> int:
    match p:
        case Sum(summands) if len(summands) >= 2:
            return _SUM
        case Sum():
            return _PREFIX
        case Par():
            return _PAR
        case _:
            return _NU


def _show(p: Process, need: int) -> str:
    match p:
        case Sum(()):
            s = "0"
        case Sum(summands):
            s = " + ".join(f"{a}.{_show(q, _PREFIX)}" for a, q in summands)
        case Par(left, right):
            lhs = _show(left, _PAR) if isinstance(left, Par) else _show(left, _PREFIX)
            s = f"{lhs} | {_show(right, _PREFIX)}"
        case Nu(x, body):
            s = f"nu {x}.{_show(body, _PREFIX)}"
        case _:
            raise TypeError(f"not a process: {p!r}")
    return f"({s})" if _level(p) < need else s


def prefix_count(p: Process) -> int:
    match p:
        case Sum(summands):
            return sum(1 + prefix_count(q) for _, q in summands)
        case Par(left, right):
            return prefix_count(left) + prefix_count(right)
        case Nu(_, body):
            return prefix_count(body)
    raise TypeError(f"not a process: {p!r}")


def channels(p: Process) -> frozenset[str]:
    """Free channel names of ``p``."""
    match p:
        case Sum(summands):
            out = set()
            for a, q in summands:
                if a.channel:
                    out.add(a.channel)
                out |= channels(q)
            return frozenset(out)
        case Par(left, right):
            return channels(left) | channels(right)
        case Nu(x, body):
            return channels(body) - {x}
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)

    def parse(self) -> Process:
        p = self.process()
        self.ts.expect_eof()
        return p

    def process(self) -> Process:
        if self.ts.at("nu"):
            return self.restriction()
        left = self.sum()
        while self.ts.accept("|"):
            right = self.restriction() if self.ts.at("nu") else self.sum()
            left = Par(left, right)
        return left

    def restriction(self) -> Process:
        self.ts.expect("nu")
        tok = self.ts.expect_ident("channel name")
        if tok.value in RESERVED:
            self.ts.error("reserved word used as channel", tok, GrammarError)
        self.ts.expect(".")
        return Nu(tok.value, self.process())

    def sum(self) -> Process:
        start = self.ts.peek()
        first = self.summand()
        if not self.ts.at("+"):
            return first
        parts = [(start, first)]
        while self.ts.accept("+"):
            parts.append((self.ts.peek(), self.summand()))
        flat: list[tuple[Action, Process]] = []
        for tok, part in parts:
            if not isinstance(part, Sum):
                self.ts.error("summand is not a prefixed process", tok, GrammarError)
            flat.extend(part.summands)
        return Sum(tuple(flat))

    def summand(self) -> Process:
        tok = self.ts.peek()
        if tok.kind == "num":
            if tok.value != "0":
                self.ts.error("only the numeral 0 is a process")
            self.ts.next()
            return NIL
        if self.ts.at("("):
            self.ts.next()
            p = self.process()
            self.ts.expect(")")
            return p
        if tok.kind == "ident" and tok.value != "nu":
            action = self.action()
            self.ts.expect(".")
            if self.ts.at("nu"):
                return prefix(action, self.restriction())
            return prefix(action, self.summand())
        self.ts.error("expected a process")

    def action(self) -> Action:
        tok = self.ts.expect_ident("action")
        if tok.value == "tau":
            return TAU
        if tok.value in RESERVED:
            self.ts.error("reserved word used as channel", tok, GrammarError)
        if self.ts.accept("?"):
            return receive(tok.value)
        if self.ts.accept("!"):
            return send(tok.value)
        self.ts.error("expected '?' or '!' after channel name")


def _base(name: str) -> str:
    return name.split("#", 1)[0]


def _freshen(p: Process) -> Process:
    """Rename every restricted channel to ``base#k``, k counting binders in preorder."""
    taken = set(channels(p))
    counter = [1]

    def fresh(base: str) -> str:
        while f"{base}#{counter[0]}" in taken:
            counter[0] += 1
        name = f"{base}#{counter[0]}"
        counter[0] += 1
        return name

    def go(q: Process, env: dict[str, str]) -> Process:
        match q:
            case Sum(summands):
                out = []
                for a, cont in summands:
                    if a.channel in env:
                        a = Action(a.kind, env[a.channel])
                    out.append((a, go(cont, env)))
                return Sum(tuple(out))
            case Par(left, right):
                return Par(go(left, env), go(right, env))
            case Nu(x, body):
                name = fresh(_base(x))
                return Nu(name, go(body, {**env, x: name}))
        raise TypeError(q)

    return go(p, {})


def parse_process(text: str) -> Process:
    """Parse CCS concrete syntax into a term, renaming bound channels apart."""
    return _freshen(_Parser(text).parse())


# ---------------------------------------------------------------- semantics


@functools.lru_cache(maxsize=1 << 16)
def transitions(p: Process) -> frozenset[tuple[Action, Process]]:
    """All ``(action, successor)`` pairs derivable by the SOS rules."""
    match p:
        case Sum(summands):
            return frozenset(summands)
        case Nu(x, body):
            return frozenset(
                (a, Nu(x, q)) for a, q in transitions(body) if a.channel != x
            )
        case Par(left, right):
            lt, rt = transitions(left), transitions(right)
            out = {(a, Par(q, right)) for a, q in lt}
            out |= {(a, Par(left, q)) for a, q in rt}
            for a, q in lt:
                if a.is_tau:
                    continue
                co = a.complement()
                out |= {(TAU, Par(q, r)) for b, r in rt if b == co}
            return frozenset(out)
    raise TypeError(f"not a process: {p!r}")


def sorted_transitions(p: Process) -> list[tuple[Action, Process]]:
    return sorted(transitions(p), key=lambda t: (t[0].sort_key(), str(t[1])))


@dataclass(frozen=True)
class Lts:
    root: Process
    states: tuple[Process, ...]
    edges: tuple[tuple[Process, Action, Process], ...]

    def successors(self, state: Process) -> list[tuple[Action, Process]]:
        return [(a, t) for s, a, t in self.edges if s == state]

    @property
    def actions(self) -> frozenset[Action]:
        return frozenset(a for _, a, _ in self.edges)

    def to_json(self) -> dict:
        return {
            "states": [str(s) for s in self.states],
            "root": str(self.root),
            "edges": [[str(s), str(a), str(t)] for s, a, t in self.edges],
        }

    def to_dot(self) -> str:
        ids = {s: i for i, s in enumerate(self.states)}
        lines = ["digraph lts {", "  rankdir=LR;"]
        for s, i in ids.items():
            shape = "doublecircle" if s == self.root else "ellipse"
            lines.append(f"  s{i} [label={json.dumps(str(s))}, shape={shape}];")
        for s, a, t in self.edges:
            lines.append(f"  s{ids[s]} -> s{ids[t]} [label={json.dumps(str(a))}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_lts(p: Process, state_budget: int | None = None) -> Lts:
    """Breadth-first closure of :func:`transitions` from ``p``.

    States are literal terms: ``P | 0`` and ``P`` stay distinct.
    """
    budget = default_state_budget() if state_budget is None else state_budget
    if budget < 1:
        raise ValueError("state_budget must be >= 1")
    seen = {p}
    order = [p]
    edges = []
    queue = deque([p])
    while queue:
        s = queue.popleft()
        for a, t in sorted_transitions(s):
            edges.append((s, a, t))
            if t not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"more than {budget} states reachable from {p}")
                seen.add(t)
                order.append(t)
                queue.append(t)
    return Lts(p, tuple(order), tuple(edges))


def traces(
    p: Process, actions: Iterable[Action] | None = None, limit: int | None = None
) -> Iterator[list]:
    """Enumerate transition sequences ``[P0, a1, P1, ..., an, Pn]``.

    Without ``actions`` the sequences are maximal (end in a deadlocked state);
    with ``actions`` exactly the sequences carrying that label word are produced.
    """
    want = None if actions is None else list(actions)
    count = 0

    def walk(state: Process, path: list) -> Iterator[list]:
        depth = (len(path) - 1) // 2
        moves = sorted_transitions(state)
        if want is not None and depth == len(want):
            yield path
            return
        if want is None and not moves:
            yield path
            return
        for a, t in moves:
            if want is not None and a != want[depth]:
                continue
            yield from walk(t, path + [a, t])

    for tr in walk(p, [p]):
        if limit is not None and count >= limit:
            return
        count += 1
        yield tr


def format_trace(trace: list) -> str:
    parts = [str(trace[0])]
    for i in range(1, len(trace), 2):
        parts.append(f"--{trace[i]}--> {trace[i + 1]}")
    return " ".join(parts)
