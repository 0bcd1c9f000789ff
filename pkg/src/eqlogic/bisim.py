"""Strong bisimilarity, decided two independent ways.

:func:`bisimilar_naive` prunes the full relation over the combined state space
until the transfer conditions hold; :func:`bisimilar` runs splitter-based
partition refinement. Both return a :class:`BisimVerdict` whose payload is
either a witness bisimulation or a distinguishing HML formula, and both
payloads are checked before they are returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import hml
from .ccs import Action, Process, build_lts, transitions
from .errors import InternalError

Pair = tuple[Process, Process]


@dataclass(frozen=True)
class BisimVerdict:
    bisimilar: bool
    witness: frozenset[Pair] | None = None
    formula: hml.Formula | None = None

    def to_json(self) -> dict:
        out: dict = {"bisimilar": self.bisimilar}
        if self.witness is not None:
            out["witness"] = sorted([str(s), str(t)] for s, t in self.witness)
        if self.formula is not None:
            out["formula"] = str(self.formula)
        return out


class _Combined:
    """Disjoint-by-term union of the LTSs of two roots, states numbered by printed order."""

    def __init__(self, p: Process, q: Process, state_budget: int | None = None):
        self.lp = build_lts(p, state_budget)
        self.lq = build_lts(q, state_budget)
        states = set(self.lp.states) | set(self.lq.states)
        self.states = sorted(states, key=str)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.succ: list[dict[Action, list[int]]] = [{} for _ in self.states]
        for lts in (self.lp, self.lq):
            for s, a, t in lts.edges:
                targets = self.succ[self.index[s]].setdefault(a, [])
                if self.index[t] not in targets:
                    targets.append(self.index[t])
        for m in self.succ:
            for a in m:
                m[a].sort()
        self.actions = sorted({a for m in self.succ for a in m})

    def moves(self, i: int, a: Action) -> list[int]:
        return self.succ[i].get(a, [])


def combined_states(p: Process, q: Process, state_budget: int | None = None) -> list[Process]:
    return _Combined(p, q, state_budget).states


def is_bisimulation(relation: Iterable[Pair]) -> bool:
    """Check both transfer conditions directly on every pair."""
    rel = set(relation)
    for s, t in rel:
        for a, s2 in transitions(s):
            if not any(b == a and (s2, t2) in rel for b, t2 in transitions(t)):
                return False
        for a, t2 in transitions(t):
            if not any(b == a and (s2, t2) in rel for b, s2 in transitions(s)):
                return False
    return True


def _verified(p: Process, q: Process, f: hml.Formula) -> hml.Formula:
    if not (hml.satisfies(p, f) and not hml.satisfies(q, f)):
        raise InternalError(f"formula {f} does not distinguish {p} from {q}")
    return f


# ------------------------------------------------------------- naive oracle


def bisimilar_naive(p: Process, q: Process, state_budget: int | None = None) -> BisimVerdict:
    """Greatest fixpoint by synchronous pruning of S x S."""
    g = _Combined(p, q, state_budget)
    n = len(g.states)
    rel = {(s, t) for s in range(n) for t in range(n)}
    # reason[(s, t)] = (side, action, successor) explaining removal
    reason: dict[tuple[int, int], tuple[str, Action, int]] = {}
    while True:
        removed = {}
        for s, t in rel:
            why = _violation(g, rel, s, t)
            if why is not None:
                removed[(s, t)] = why
        if not removed:
            break
        rel -= removed.keys()
        reason.update(removed)

    ip, iq = g.index[p], g.index[q]
    if (ip, iq) in rel:
        lp, lq = set(g.lp.states), set(g.lq.states)
        witness = frozenset(
            (g.states[s], g.states[t]) for s, t in rel if g.states[s] in lp and g.states[t] in lq
        )
        if (p, q) not in witness or not is_bisimulation(witness):
            raise InternalError("naive witness is not a bisimulation")
        return BisimVerdict(True, witness=witness)

    memo: dict[tuple[int, int], hml.Formula] = {}

    def dist(s: int, t: int) -> hml.Formula:
        # true at s, false at t
        if (s, t) in memo:
            return memo[(s, t)]
        side, a, succ = reason[(s, t)]
        if side == "left":
            f = hml.diamond(a, hml.conj_all(dist(succ, t2) for t2 in g.moves(t, a)))
        else:
            f = hml.Not(hml.diamond(a, hml.conj_all(dist(succ, s2) for s2 in g.moves(s, a))))
        memo[(s, t)] = f
        return f

    return BisimVerdict(False, formula=_verified(p, q, dist(ip, iq)))


def _violation(g: _Combined, rel: set, s: int, t: int):
    for a, targets in g.succ[s].items():
        for s2 in targets:
            if not any((s2, t2) in rel for t2 in g.moves(t, a)):
                return ("left", a, s2)
    for a, targets in g.succ[t].items():
        for t2 in targets:
            if not any((s2, t2) in rel for s2 in g.moves(s, a)):
                return ("right", a, t2)
    return None


# ---------------------------------------------------- partition refinement


@dataclass(frozen=True)
class _Split:
    block: frozenset
    action: Action
    splitter: frozenset
    inside: frozenset  # states of `block` with an `action`-move into `splitter`


class _Refinement:
    def __init__(self, g: _Combined):
        self.g = g
        n = len(g.states)
        self.blocks: list[frozenset] = [frozenset(range(n))] if n else []
        self.history: list[_Split] = []
        # pred[a][t] = states with an a-move to t
        self.pred: dict[Action, list[list[int]]] = {a: [[] for _ in range(n)] for a in g.actions}
        for s, m in enumerate(g.succ):
            for a, targets in m.items():
                for t in targets:
                    self.pred[a][t].append(s)
        while self._split_once():
            pass

    def _split_once(self) -> bool:
        # smallest splitter first, ties by least member; blocks scanned by least member
        for splitter in sorted(self.blocks, key=lambda b: (len(b), min(b))):
            for a in self.g.actions:
                pre = {s for t in splitter for s in self.pred[a][t]}
                if not pre:
                    continue
                for block in sorted(self.blocks, key=min):
                    inside = block & pre
                    if inside and inside != block:
                        self.blocks.remove(block)
                        self.blocks += [inside, block - inside]
                        self.history.append(_Split(block, a, splitter, frozenset(inside)))
                        return True
        return False

    def same_block(self, s: int, t: int) -> bool:
        return any(s in b and t in b for b in self.blocks)

    def separating(self, s: int, t: int) -> _Split:
        for ev in self.history:
            if s in ev.block and t in ev.block and (s in ev.inside) != (t in ev.inside):
                return ev
        raise InternalError(f"{self.g.states[s]} and {self.g.states[t]} were never separated")

    def formula(self, s: int, t: int, memo: dict | None = None) -> hml.Formula:
        """A formula true at ``s`` and false at ``t``, read off the split history."""
        memo = {} if memo is None else memo
        if (s, t) in memo:
            return memo[(s, t)]
        ev = self.separating(s, t)
        if s in ev.inside:
            s2 = next(x for x in self.g.moves(s, ev.action) if x in ev.splitter)
            f = hml.diamond(
                ev.action,
                hml.conj_all(self.formula(s2, t2, memo) for t2 in self.g.moves(t, ev.action)),
            )
        else:
            f = hml.Not(self.formula(t, s, memo))
        memo[(s, t)] = f
        return f


def bisimilar(p: Process, q: Process, state_budget: int | None = None) -> BisimVerdict:
    """Partition refinement on the union LTS; ``p ~ q`` iff the roots share a block."""
    g = _Combined(p, q, state_budget)
    ref = _Refinement(g)
    ip, iq = g.index[p], g.index[q]
    if ref.same_block(ip, iq):
        block_of = {s: b for b in ref.blocks for s in b}
        witness = frozenset(
            (s, t)
            for s in g.lp.states
            for t in g.lq.states
            if g.index[t] in block_of[g.index[s]]
        )
        return BisimVerdict(True, witness=witness)
    return BisimVerdict(False, formula=_verified(p, q, ref.formula(ip, iq)))


def refinement_rounds(p: Process, q: Process, state_budget: int | None = None) -> int:
    """Number of block splits performed on the union LTS of ``p`` and ``q``."""
    return len(_Refinement(_Combined(p, q, state_budget)).history)


def distinguishing_formula(
    p: Process, q: Process, state_budget: int | None = None
) -> hml.Formula | None:
    """``None`` iff ``p ~ q``; otherwise a re-verified formula with ``p |= f`` and ``q |/= f``."""
    verdict = bisimilar(p, q, state_budget)
    return None if verdict.bisimilar else verdict.formula

