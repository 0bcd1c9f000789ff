"""Seeded generators for processes, programs, Kripke structures and formulas.

Every generator takes an explicit ``random.Random`` or seed, so corpora are
reproducible across runs and platforms.
"""
from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from . import pdl
from .ccs import NIL, TAU, Action, Nu, Par, Process, Sum, receive, send
from .ka import AXIOMS, Equation, replace_at, substitute
from .regprog import ONE, ZERO, Choice, Interpretation, Prim, Program, Seq, Star, is_core
from .regprog import size as program_size

# ---------------------------------------------------------------- processes


def channel_actions(channels: Iterable[str]) -> list[Action]:
    out = [TAU]
    for c in sorted(channels):
        out += [receive(c), send(c)]
    return out


def process_family(max_prefixes: int, channels: Sequence[str]) -> list[Process]:
    """Every restriction-free term with at most ``max_prefixes`` prefixes.

    Sums are taken as multisets of summands (one representative per
    permutation); both operands of ``|`` carry at least one prefix.
    """
    acts = channel_actions(channels)

    @lru_cache(maxsize=None)
    def summands(k: int) -> tuple:
        # prefixed summands using exactly k prefixes
        return tuple((a, c) for a in acts for c in procs(k - 1))

    @lru_cache(maxsize=None)
    def sums(k: int) -> tuple:
        def parts(k: int, max_k: int, max_i: int) -> Iterator[list]:
            if k == 0:
                yield []
                return
            for j in range(min(k, max_k), 0, -1):
                pool = summands(j)
                top = max_i if j == max_k else len(pool) - 1
                for i in range(top, -1, -1):
                    for rest in parts(k - j, j, i):
                        yield [pool[i]] + rest

        if k == 0:
            return (NIL,)
        return tuple(Sum(tuple(ps)) for ps in parts(k, k, len(summands(k)) - 1))

    @lru_cache(maxsize=None)
    def procs(k: int) -> tuple:
        out = list(sums(k))
        for i in range(1, k):
            out += [Par(left, right) for left in procs(i) for right in procs(k - i)]
        return tuple(out)

    return [p for k in range(max_prefixes + 1) for p in procs(k)]


def family_pairs(max_prefixes: int = 3, channels: Sequence[str] = ("x",)) -> list[tuple[Process, Process]]:
    """Unordered pairs (diagonal included) of :func:`process_family`."""
    fam = process_family(max_prefixes, channels)
    return list(itertools.combinations_with_replacement(fam, 2))


def random_process(rng: random.Random, prefixes: int, channels: Sequence[str]) -> Process:
    """A term with exactly ``prefixes`` prefixes; restriction appears at random."""
    acts = channel_actions(channels)
    if prefixes == 0:
        return NIL
    roll = rng.random()
    if roll < 0.15:
        return Nu(rng.choice(list(channels)), random_process(rng, prefixes, channels))
    if roll < 0.4 and prefixes >= 2:
        k = rng.randint(1, prefixes - 1)
        return Par(random_process(rng, k, channels), random_process(rng, prefixes - k, channels))
    # a sum of one or more prefixed summands
    parts = []
    left = prefixes
    while left:
        k = rng.randint(1, left)
        parts.append((rng.choice(acts), random_process(rng, k - 1, channels)))
        left -= k
    return Sum(tuple(parts))


def _bisimilar_variant(rng: random.Random, p: Process) -> Process:
    # a mutation that keeps strong bisimilarity, so random pairs are not all distinct
    match rng.randrange(3):
        case 0:
            return Par(p, NIL)
        case 1:
            return Par(NIL, p) if not isinstance(p, Par) else Par(p.right, p.left)
        case _:
            if isinstance(p, Sum) and p.summands:
                return Sum(p.summands + (rng.choice(p.summands),))
            return Par(p, NIL)


def random_process_pairs(
    seed: int, count: int = 500, max_prefixes: int = 4, channels: Sequence[str] = ("x", "y")
) -> list[tuple[Process, Process]]:
    """``count`` pairs; roughly a quarter are bisimilar by construction."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p = random_process(rng, rng.randint(0, max_prefixes), channels)
        if rng.random() < 0.25:
            q = _bisimilar_variant(rng, p)
        else:
            q = random_process(rng, rng.randint(0, max_prefixes), channels)
        out.append((p, q))
    return out


# ---------------------------------------------------------------- programs


def random_program(rng: random.Random, size: int, prims: Sequence[str], ka: bool = False) -> Program:
    """A program with exactly ``size`` nodes; ``ka`` admits the constants 0 and 1."""
    if size <= 1:
        if ka and rng.random() < 0.25:
            return rng.choice([ZERO, ONE])
        return Prim(rng.choice(list(prims)))
    if size == 2 or rng.random() < 0.2:
        return Star(random_program(rng, size - 1, prims, ka))
    k = rng.randint(1, size - 2)
    op = rng.choice([Seq, Choice])
    return op(random_program(rng, k, prims, ka), random_program(rng, size - 1 - k, prims, ka))


def random_program_pairs(
    seed: int, count: int = 200, max_size: int = 6, prims: Sequence[str] = ("a", "b")
) -> list[tuple[Program, Program]]:
    rng = random.Random(seed)
    return [
        (
            random_program(rng, rng.randint(1, max_size), prims),
            random_program(rng, rng.randint(1, max_size), prims),
        )
        for _ in range(count)
    ]


# axioms that map core programs to core programs, usable in both directions
CORE_REWRITE_AXIOMS = ("plus-assoc", "plus-comm", "plus-idem", "seq-assoc", "seq-dist-l", "seq-dist-r")


def _match(pattern: Program, term: Program, variables: frozenset, binding: dict) -> bool:
    match pattern:
        case Prim(name) if name in variables:
            if name in binding:
                return binding[name] == term
            binding[name] = term
            return True
        case Seq(pl, pr) if isinstance(term, Seq):
            return _match(pl, term.left, variables, binding) and _match(pr, term.right, variables, binding)
        case Choice(pl, pr) if isinstance(term, Choice):
            return _match(pl, term.left, variables, binding) and _match(pr, term.right, variables, binding)
        case Star(pb) if isinstance(term, Star):
            return _match(pb, term.body, variables, binding)
    return pattern == term


def _positions(term: Program, path: tuple = ()) -> Iterator[tuple[tuple, Program]]:
    yield path, term
    match term:
        case Seq(left, right) | Choice(left, right):
            yield from _positions(left, path + (0,))
            yield from _positions(right, path + (1,))
        case Star(body):
            yield from _positions(body, path + (0,))


def rewrites(term: Program, axioms: Sequence[str] = CORE_REWRITE_AXIOMS) -> list[tuple[str, tuple, Program]]:
    """Every single-step rewrite of ``term`` by an axiom instance, either direction."""
    out = []
    for name in axioms:
        schema = AXIOMS[name]
        variables = frozenset(schema.variables)
        for eq in schema.instances:
            for src, dst in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                for path, sub in _positions(term):
                    binding: dict = {}
                    if _match(src, sub, variables, binding) and set(binding) >= _vars(dst, variables):
                        out.append((name, path, replace_at(term, path, substitute(dst, binding))))
    return out


def _vars(p: Program, variables: frozenset) -> set:
    return {name for _, sub in _positions(p) if isinstance(sub, Prim) and (name := sub.name) in variables}


def ka_rewrite_pairs(
    seed: int,
    count: int = 200,
    max_size: int = 6,
    prims: Sequence[str] = ("a", "b"),
    max_steps: int = 3,
    size_cap: int = 14,
) -> list[tuple[Program, Program]]:
    """Pairs ``(alpha, beta)`` where ``beta`` is ``alpha`` after 1..max_steps
    rewrites with :data:`CORE_REWRITE_AXIOMS`; equal languages by construction.

    Each step picks an applicable axiom uniformly, then a rewrite site.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        alpha = random_program(rng, rng.randint(1, max_size), prims)
        beta = alpha
        for _ in range(rng.randint(1, max_steps)):
            by_axiom: dict[str, list[Program]] = {}
            for name, _, result in rewrites(beta):
                if program_size(result) <= size_cap:
                    by_axiom.setdefault(name, []).append(result)
            if not by_axiom:
                break
            # axiom first, then position, so `x -> x + x` does not crowd out the rest
            beta = rng.choice(by_axiom[rng.choice(sorted(by_axiom))])
        if beta != alpha and is_core(beta):
            out.append((alpha, beta))
    return out


def axiom_substitutions(
    seed: int, per_axiom: int = 50, max_size: int = 3, prims: Sequence[str] = ("a", "b")
) -> list[tuple[str, dict[str, Program]]]:
    """``per_axiom`` random substitutions for every schema, in schema order."""
    rng = random.Random(seed)
    return [
        (name, {v: random_program(rng, rng.randint(1, max_size), prims, ka=True) for v in schema.variables})
        for name, schema in AXIOMS.items()
        for _ in range(per_axiom)
    ]


def axiom_instances(
    seed: int, per_axiom: int = 50, max_size: int = 3, prims: Sequence[str] = ("a", "b")
) -> list[tuple[str, Equation]]:
    """Every equation of every substituted schema; Horn rules contribute premise and conclusion."""
    return [
        (name, Equation(substitute(eq.lhs, subst), substitute(eq.rhs, subst)))
        for name, subst in axiom_substitutions(seed, per_axiom, max_size, prims)
        for eq in AXIOMS[name].instances
    ]


# ---------------------------------------------------------------- Kripke structures


def random_interpretation(rng: random.Random, states: int, prims: Sequence[str], density: float = 0.3) -> Interpretation:
    ss = range(states)
    rels = {a: {(u, v) for u in ss for v in ss if rng.random() < density} for a in prims}
    return Interpretation(frozenset(ss), rels)


def random_kripke(
    rng: random.Random, states: int, props: Sequence[str], prims: Sequence[str], density: float = 0.3
) -> pdl.KripkeStructure:
    sigma = random_interpretation(rng, states, prims, density)
    valuation = {s: {p: rng.random() < 0.5 for p in props} for s in range(states)}
    return pdl.KripkeStructure(tuple(range(states)), valuation, sigma, frozenset(props))


def random_pdl(rng: random.Random, props: Sequence[str], prims: Sequence[str], depth: int) -> pdl.Formula:
    """A random formula of modal depth at most ``depth``; boxes hold small programs."""
    roll = rng.random()
    if roll < 0.3 or (depth == 0 and roll < 0.6):
        return rng.choice([pdl.TRUE] + [pdl.Prop(p) for p in props])
    if depth == 0 or roll < 0.5:
        if rng.random() < 0.5:
            return pdl.Not(random_pdl(rng, props, prims, depth))
        return pdl.And(random_pdl(rng, props, prims, depth), random_pdl(rng, props, prims, depth))
    prog = random_program(rng, rng.randint(1, 3), prims)
    body = random_pdl(rng, props, prims, depth - 1)
    return pdl.Box(prog, body) if rng.random() < 0.5 else pdl.diamond(prog, body)
