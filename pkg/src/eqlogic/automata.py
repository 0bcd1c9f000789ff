"""Finite automata for regular programs.

``build_eps_nfa`` follows the inductive construction clause by clause, with
one addition: the star clause also gets an epsilon edge from its fresh start
into the body, without which the body would be unreachable.

``collapse`` turns the epsilon-automaton into an epsilon-free one whose states
are classes of epsilon-connected states. Two states joined by an epsilon edge
are identified whenever that is language-preserving (the target has no other
way in, or the source no other way out); any epsilon edge left over is removed
by the usual closure. ``collapse(A, literal=True)`` instead identifies every
epsilon-connected pair outright, which can enlarge the language: for
``c*;b*`` it yields ``(b+c)*``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import StateBlowup
from .pdl import KripkeStructure
from .regprog import Choice, Interpretation, One, Prim, Program, Seq, Star, Test, Zero

EPS = None  # label of epsilon moves
DEFAULT_SUBSET_BUDGET = 10**6


@dataclass(frozen=True)
class EpsNfa:
    states: tuple[int, ...]
    initial: int
    finals: frozenset[int]
    transitions: tuple[tuple[int, str | None, int], ...]
    alphabet: frozenset[str] = frozenset()

    def to_json(self) -> dict:
        return _automaton_json(self)

    def to_dot(self) -> str:
        return _automaton_dot(self, "eps_nfa")


@dataclass(frozen=True)
class Nfa:
    states: tuple[int, ...]
    initial: int
    finals: frozenset[int]
    transitions: frozenset[tuple[int, str, int]]
    alphabet: frozenset[str] = frozenset()
    classes: tuple[frozenset[int], ...] = ()

    def to_json(self) -> dict:
        out = _automaton_json(self)
        out["classes"] = [sorted(c) for c in self.classes]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Nfa":
        edges = frozenset((s, a, t) for s, a, t in data["transitions"])
        return cls(
            tuple(data["states"]),
            data["initial"],
            frozenset(data["finals"]),
            edges,
            frozenset(a for _, a, _ in edges),
            tuple(frozenset(c) for c in data.get("classes", ())),
        )

    def to_dot(self) -> str:
        return _automaton_dot(self, "nfa")


def _automaton_json(a) -> dict:
    return {
        "states": list(a.states),
        "initial": a.initial,
        "finals": sorted(a.finals),
        "transitions": [[s, "eps" if lab is EPS else lab, t] for s, lab, t in sorted_edges(a)],
    }


def sorted_edges(a):
    return sorted(a.transitions, key=lambda e: (e[0], "" if e[1] is EPS else e[1], e[2]))


def _automaton_dot(a, name: str) -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  start [shape=point, label=""];']
    for s in a.states:
        shape = "doublecircle" if s in a.finals else "circle"
        lines.append(f"  q{s} [shape={shape}];")
    lines.append(f"  start -> q{a.initial};")
    for s, lab, t in sorted_edges(a):
        lines.append(f"  q{s} -> q{t} [label={json.dumps('eps' if lab is EPS else lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------- construction


def build_eps_nfa(program: Program, literal_star: bool = False) -> EpsNfa:
    """Inductive epsilon-automaton of ``program``.

    ``literal_star=True`` omits the entry edge of the star clause, reproducing
    the construction exactly as printed (where ``L(a*)`` collapses to the empty word).
    """
    counter = iter(range(1 << 62))
    delta: list[tuple[int, str | None, int]] = []

    def go(p: Program) -> tuple[list[int], int, set[int]]:
        match p:
            case Prim(name):
                q0, q1 = next(counter), next(counter)
                delta.append((q0, name, q1))
                return [q0, q1], q0, {q1}
            case Seq(left, right):
                q1, i1, f1 = go(left)
                q2, i2, f2 = go(right)
                delta.extend((f, EPS, i2) for f in sorted(f1))
                return q1 + q2, i1, f2
            case Choice(left, right):
                q0 = next(counter)
                q1, i1, f1 = go(left)
                q2, i2, f2 = go(right)
                delta.extend([(q0, EPS, i1), (q0, EPS, i2)])
                return [q0] + q1 + q2, q0, f1 | f2
            case Star(body):
                q0 = next(counter)
                q1, i1, f1 = go(body)
                if not literal_star:
                    delta.append((q0, EPS, i1))
                delta.extend((f, EPS, q0) for f in sorted(f1))
                return [q0] + q1, q0, f1 | {q0}
            case Zero():
                q0 = next(counter)
                return [q0], q0, set()
            case One():
                q0 = next(counter)
                return [q0], q0, {q0}
            case Test():
                raise TypeError("automata are built for test-free programs only")
        raise TypeError(f"not a program: {p!r}")

    states, initial, finals = go(program)
    alphabet = frozenset(lab for _, lab, _ in delta if lab is not EPS)
    return EpsNfa(tuple(sorted(states)), initial, frozenset(finals), tuple(delta), alphabet)


class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def collapse(a: EpsNfa, literal: bool = False) -> Nfa:
    uf = _UnionFind(a.states)
    eps = [(s, t) for s, lab, t in a.transitions if lab is EPS]
    if literal:
        for s, t in eps:
            uf.union(s, t)
    else:
        while _contract_one(a, uf):
            pass

    members: dict[int, set[int]] = {}
    for q in a.states:
        members.setdefault(uf.find(q), set()).add(q)
    classes = sorted((frozenset(m) for m in members.values()), key=min)
    index = {q: i for i, c in enumerate(classes) for q in c}

    labelled = {(index[s], lab, index[t]) for s, lab, t in a.transitions if lab is not EPS}
    finals = {index[q] for q in a.finals}
    # epsilon edges that survived contraction are removed by closure
    residual: dict[int, set[int]] = {}
    for s, t in eps:
        if index[s] != index[t]:
            residual.setdefault(index[s], set()).add(index[t])
    if residual:
        closure = {c: _reach(c, residual) for c in range(len(classes))}
        labelled = {
            (c, lab, t) for c in closure for d in closure[c] for s, lab, t in labelled if s == d
        }
        finals = {c for c in closure if closure[c] & finals}
    return Nfa(
        tuple(range(len(classes))),
        index[a.initial],
        frozenset(finals),
        frozenset(labelled),
        a.alphabet,
        tuple(classes),
    )


def _reach(start: int, succ: dict[int, set[int]]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        for t in succ.get(stack.pop(), ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _contract_one(a: EpsNfa, uf: _UnionFind) -> bool:
    """Merge the first epsilon-joined pair of classes whose identification is sound."""
    incoming: dict[int, set] = {}
    outgoing: dict[int, set] = {}
    eps_edges = set()
    for s, lab, t in a.transitions:
        cs, ct = uf.find(s), uf.find(t)
        if lab is EPS and cs == ct:
            continue
        incoming.setdefault(ct, set()).add((cs, lab))
        outgoing.setdefault(cs, set()).add((lab, ct))
        if lab is EPS:
            eps_edges.add((cs, ct))
    final = {uf.find(q) for q in a.finals}
    init = uf.find(a.initial)
    for src, dst in sorted(eps_edges):
        only_way_in = incoming[dst] == {(src, EPS)} and dst != init
        only_way_out = outgoing[src] == {(EPS, dst)} and (src not in final or dst in final)
        if only_way_in or only_way_out:
            uf.union(src, dst)
            return True
    return False


def program_nfa(program: Program) -> Nfa:
    return collapse(build_eps_nfa(program))


# -------------------------------------------------------- acceptance


def _eps_closure(a: EpsNfa, states: Iterable[int]) -> frozenset[int]:
    succ: dict[int, set[int]] = {}
    for s, lab, t in a.transitions:
        if lab is EPS:
            succ.setdefault(s, set()).add(t)
    out: set[int] = set()
    for q in states:
        out |= _reach(q, succ)
    return frozenset(out)


class _Stepper:
    """Subset-construction step function shared by both automaton kinds."""

    def __init__(self, a: EpsNfa | Nfa):
        self.a = a
        self.eps = isinstance(a, EpsNfa)
        self.delta: dict[tuple[int, str], set[int]] = {}
        for s, lab, t in a.transitions:
            if lab is not EPS:
                self.delta.setdefault((s, lab), set()).add(t)

    def start(self) -> frozenset[int]:
        init = frozenset({self.a.initial})
        return _eps_closure(self.a, init) if self.eps else init

    def step(self, states: frozenset[int], symbol: str) -> frozenset[int]:
        out: set[int] = set()
        for q in states:
            out |= self.delta.get((q, symbol), set())
        return _eps_closure(self.a, out) if self.eps else frozenset(out)

    def accepting(self, states: frozenset[int]) -> bool:
        return bool(states & self.a.finals)


def accepts(a: Nfa | EpsNfa, word: Sequence[str]) -> bool:
    """Subset simulation; works on both automaton kinds (epsilon-closure for EpsNfa)."""
    st = _Stepper(a)
    cur = st.start()
    for symbol in word:
        cur = st.step(cur, symbol)
        if not cur:
            return False
    return st.accepting(cur)


def eps_accepts(a: EpsNfa, word: Sequence[str]) -> bool:
    return accepts(a, word)


def accepted_words(a: Nfa | EpsNfa, max_length: int, alphabet: Iterable[str] | None = None) -> set[tuple[str, ...]]:
    st = _Stepper(a)
    sigma = sorted(set(alphabet) if alphabet is not None else a.alphabet)
    out: set[tuple[str, ...]] = set()
    frontier = [((), st.start())]
    for depth in range(max_length + 1):
        nxt = []
        for word, cur in frontier:
            if st.accepting(cur):
                out.add(word)
            if depth < max_length:
                for sym in sigma:
                    s2 = st.step(cur, sym)
                    if s2:
                        nxt.append((word + (sym,), s2))
        frontier = nxt
    return out


@dataclass(frozen=True)
class EquivalenceResult:
    equal: bool
    counterexample: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"equal": self.equal}
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
        return out


def equivalent_automata(
    a: Nfa | EpsNfa,
    b: Nfa | EpsNfa,
    budget: int = DEFAULT_SUBSET_BUDGET,
    max_length: int | None = None,
) -> EquivalenceResult:
    """Breadth-first search of the lazily determinized product.

    The first reachable pair of subsets that disagree on acceptance yields a
    shortest separating word (ties broken by symbol order). ``max_length``
    bounds the search depth.
    """
    sa, sb = _Stepper(a), _Stepper(b)
    sigma = sorted(a.alphabet | b.alphabet)
    start = (sa.start(), sb.start())
    parent: dict = {start: None}
    queue = deque([(start, 0)])
    while queue:
        pair, depth = queue.popleft()
        if sa.accepting(pair[0]) != sb.accepting(pair[1]):
            word = []
            node = pair
            while parent[node] is not None:
                node, sym = parent[node]
                word.append(sym)
            return EquivalenceResult(False, tuple(reversed(word)))
        if max_length is not None and depth >= max_length:
            continue
        for sym in sigma:
            nxt = (sa.step(pair[0], sym), sb.step(pair[1], sym))
            if nxt not in parent:
                if len(parent) >= budget:
                    raise StateBlowup(f"product exceeded {budget} subset pairs")
                parent[nxt] = (pair, sym)
                queue.append((nxt, depth + 1))
    return EquivalenceResult(True)


def equivalent(alpha: Program, beta: Program, budget: int = DEFAULT_SUBSET_BUDGET) -> EquivalenceResult:
    """Language equality of two programs, with a shortest counterexample if unequal."""
    return equivalent_automata(program_nfa(alpha), program_nfa(beta), budget)


# -------------------------------------------------------- Kripke view


def to_kripke(a: Nfa, alphabet: Iterable[str] | None = None) -> KripkeStructure:
    """Automaton states become worlds; ``init`` and ``final`` are the only propositions.

    Names in ``alphabet`` without edges are interpreted as the empty relation.
    """
    names = set(a.alphabet) | set(alphabet or ())
    rels = {n: {(s, t) for s, lab, t in a.transitions if lab == n} for n in sorted(names)}
    valuation = {q: {"init": q == a.initial, "final": q in a.finals} for q in a.states}
    sigma = Interpretation(frozenset(a.states), rels)
    return KripkeStructure(a.states, valuation, sigma, frozenset({"init", "final"}))


def program_kripke(program: Program, alphabet: Iterable[str] | None = None) -> KripkeStructure:
    return to_kripke(program_nfa(program), alphabet)
