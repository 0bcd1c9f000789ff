"""Bounded empirical checks linking the logical and the equational views.

* ``check_prop1``: bisimilar processes agree on every HML formula.
* ``check_prop2_intension``: the same, phrased through the set of formulas a
  specification process satisfies.
* ``check_prop3``: language-equal programs have interchangeable diamonds.
* ``check_prop4``: the Kripke structures of two programs validate the same
  formulas iff the programs are language-equal.

"For all formulas" and "for all models" are replaced by finite enumerations and
samples; every report records the bounds it used. A witness is always
re-checked with the base model checkers before it is reported.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from . import hml, pdl
from .automata import accepts, equivalent, program_kripke, program_nfa
from .bisim import bisimilar, combined_states
from .ccs import Process, build_lts
from .corpus import random_kripke, random_pdl
from .errors import CorrespondenceViolation
from .regprog import Interpretation, Prim, Program, primitives, seq_all

CONSISTENT = "consistent"
WITNESS = "witness"


@dataclass(frozen=True)
class ModelWitness:
    """A pointed model where two formulas differ."""

    model: pdl.KripkeStructure
    state: Any
    formula: pdl.Formula
    left: pdl.Formula
    right: pdl.Formula

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "state": self.state,
            "formula": str(self.formula),
            "left": str(self.left),
            "right": str(self.right),
        }


@dataclass(frozen=True)
class CorrespondenceReport:
    proposition: int
    instance: str
    verdict: str  # CONSISTENT or WITNESS
    witness: Any = None
    bounds: dict = field(default_factory=dict)
    evidence: str = ""  # how the verdict was reached

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_json(self) -> dict:
        out = {
            "proposition": self.proposition,
            "instance": self.instance,
            "verdict": self.verdict,
            "bounds": dict(self.bounds),
            "evidence": self.evidence,
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = w.to_json() if hasattr(w, "to_json") else str(w)
        return out


# ---------------------------------------------------------------- processes

DEFAULT_HML_SIZE = 6


def _actions(p: Process, q: Process, state_budget: int | None) -> list:
    return sorted(build_lts(p, state_budget).actions | build_lts(q, state_budget).actions)


def _process_witness(p: Process, q: Process, state_budget: int | None) -> hml.Formula:
    verdict = bisimilar(p, q, state_budget)
    f = verdict.formula
    if not (hml.satisfies(p, f) and not hml.satisfies(q, f)):
        raise CorrespondenceViolation(f"{f} does not separate {p} and {q}")
    return f


def default_depth(p: Process, q: Process, state_budget: int | None = None) -> int:
    """Combined state count of the two LTSs."""
    return len(combined_states(p, q, state_budget))


def check_prop1(
    p: Process,
    q: Process,
    depth: int | None = None,
    max_size: int = DEFAULT_HML_SIZE,
    state_budget: int | None = None,
) -> CorrespondenceReport:
    """Bisimilar pairs must agree on every enumerated formula; others get a checked witness."""
    depth = default_depth(p, q, state_budget) if depth is None else depth
    bounds = {"modal_depth": depth, "formula_size": max_size}
    instance = f"{p} ~ {q}"
    if not bisimilar(p, q, state_budget).bisimilar:
        f = _process_witness(p, q, state_budget)
        return CorrespondenceReport(1, instance, WITNESS, f, bounds, "distinguishing formula, re-checked")
    count = 0
    for f in hml.enumerate_formulas(_actions(p, q, state_budget), depth, max_size):
        count += 1
        if hml.satisfies(p, f) != hml.satisfies(q, f):
            raise CorrespondenceViolation(f"bisimilar {p} and {q} disagree on {f}")
    return CorrespondenceReport(1, instance, CONSISTENT, None, bounds | {"formulas": count}, "enumeration")


def intension_fragment(
    q: Process, actions, depth: int, max_size: int = DEFAULT_HML_SIZE
) -> frozenset[hml.Formula]:
    """The enumerated formulas that ``q`` satisfies."""
    return frozenset(f for f in hml.enumerate_formulas(actions, depth, max_size) if hml.satisfies(q, f))


def check_prop2_intension(
    p: Process,
    q: Process,
    depth: int | None = None,
    max_size: int = DEFAULT_HML_SIZE,
    state_budget: int | None = None,
) -> CorrespondenceReport:
    """Compare what ``p`` satisfies with the enumerated fragment of the intension of ``q``."""
    depth = default_depth(p, q, state_budget) if depth is None else depth
    bounds = {"modal_depth": depth, "formula_size": max_size}
    instance = f"{p} in [[{q}]]"
    if not bisimilar(p, q, state_budget).bisimilar:
        f = _process_witness(p, q, state_budget)
        # membership in the intension is satisfaction by q
        if hml.satisfies(q, f):
            raise CorrespondenceViolation(f"{f} is in the intension of {q}")
        return CorrespondenceReport(2, instance, WITNESS, f, bounds, "formula outside the intension, re-checked")
    actions = _actions(p, q, state_budget)
    fragment = intension_fragment(q, actions, depth, max_size)
    count = 0
    for f in hml.enumerate_formulas(actions, depth, max_size):
        count += 1
        if hml.satisfies(p, f) != (f in fragment):
            raise CorrespondenceViolation(f"{p} and the intension of {q} disagree on {f}")
    return CorrespondenceReport(
        2, instance, CONSISTENT, None, bounds | {"formulas": count, "intension": len(fragment)}, "enumeration"
    )


# ---------------------------------------------------------------- programs


def chain_model(word, alphabet) -> pdl.KripkeStructure:
    """States ``0..len(word)``; letter ``i`` links ``i`` to ``i+1``; ``end`` holds at the last state."""
    n = len(word)
    rels = {a: {(i, i + 1) for i, b in enumerate(word) if b == a} for a in sorted(set(alphabet) | set(word))}
    sigma = Interpretation(frozenset(range(n + 1)), rels)
    valuation = {i: {"end": i == n} for i in range(n + 1)}
    return pdl.KripkeStructure(tuple(range(n + 1)), valuation, sigma, frozenset({"end"}))


def check_prop3(
    alpha: Program,
    beta: Program,
    seed: int = 0,
    sizes: tuple[int, ...] = (1, 2, 3, 4, 5),
    models_per_size: int = 2,
    formulas_per_model: int = 3,
    formula_depth: int = 2,
) -> CorrespondenceReport:
    """Equal programs: sampled models must validate ``<alpha>phi <=> <beta>phi``.

    Unequal programs: the chain model of the shortest counterexample word,
    with ``phi = end``, separates the two diamonds at state 0.
    """
    instance = f"{alpha} = {beta}"
    res = equivalent(alpha, beta)
    prims = sorted(primitives(alpha) | primitives(beta))
    if not res.equal:
        word = res.counterexample
        m = chain_model(word, prims)
        phi = pdl.Prop("end")
        left, right = pdl.diamond(alpha, phi), pdl.diamond(beta, phi)
        if pdl.pdl_satisfies(m, 0, left) == pdl.pdl_satisfies(m, 0, right):
            raise CorrespondenceViolation(f"chain model of {list(word)} does not separate {alpha} and {beta}")
        w = ModelWitness(m, 0, phi, left, right)
        return CorrespondenceReport(3, instance, WITNESS, w, {"word_length": len(word)}, "chain model, re-checked")
    if alpha == beta:
        return CorrespondenceReport(3, instance, CONSISTENT, None, {}, "syntactic identity")
    rng = random.Random(seed)
    props = ("p", "q")
    checks = 0
    for n in sizes:
        for _ in range(models_per_size):
            m = random_kripke(rng, n, props, prims)
            for _ in range(formulas_per_model):
                phi = random_pdl(rng, props, prims, formula_depth)
                if not pdl.valid_in(m, pdl.iff(pdl.diamond(alpha, phi), pdl.diamond(beta, phi))):
                    raise CorrespondenceViolation(f"equal {alpha} and {beta} differ on <.>{phi}")
                checks += 1
    bounds = {"model_sizes": list(sizes), "formula_depth": formula_depth, "samples": checks, "seed": seed}
    return CorrespondenceReport(3, instance, CONSISTENT, None, bounds, "language equality; models sampled")


DEFAULT_PDL_SIZE = 7


def _word_formula(word, in_alpha: bool) -> pdl.Formula:
    init, final = pdl.Prop("init"), pdl.Prop("final")
    if not word:
        return pdl.implies(init, final if in_alpha else pdl.Not(final))
    prog = seq_all(Prim(a) for a in word)
    body = pdl.diamond(prog, final) if in_alpha else pdl.Box(prog, pdl.Not(final))
    return pdl.implies(init, body)


def check_prop4(
    alpha: Program, beta: Program, depth: int = 2, max_size: int = DEFAULT_PDL_SIZE
) -> CorrespondenceReport:
    """Sweep enumerated formulas over ``init``/``final`` and primitive programs.

    The verdict is ``witness`` as soon as some formula is valid in exactly one
    of the two structures; it is oriented to be valid in the structure of
    ``alpha``. Formulas ``init => psi`` are tried first, since they compare the
    initial states directly, in order of modal depth; at each depth ``psi``
    without propositions comes first.
    """
    instance = f"M[{alpha}] vs [[{beta}]]"
    bounds = {"modal_depth": depth, "formula_size": max_size, "programs": "primitive"}
    prims = sorted(primitives(alpha) | primitives(beta))
    ma, mb = program_kripke(alpha, prims), program_kripke(beta, prims)
    programs = pdl.primitive_programs(prims)
    init = pdl.Prop("init")

    def separates(f: pdl.Formula) -> bool:
        return pdl.valid_in(ma, f) and not pdl.valid_in(mb, f)

    formulas = list(pdl.enumerate_pdl(["init", "final"], programs, depth, max_size))
    # shallowest first; at each depth the transition shape of the initial states before propositions
    shapes = list(pdl.enumerate_pdl([], programs, depth, max_size))
    witness = None
    for psi in sorted(shapes + formulas, key=pdl.modal_depth):
        at_a = pdl.pdl_satisfies(ma, _initial(ma), psi)
        if at_a != pdl.pdl_satisfies(mb, _initial(mb), psi):
            witness = pdl.implies(init, psi if at_a else pdl.Not(psi))
            break
    if witness is None:
        for f in formulas:
            va, vb = pdl.valid_in(ma, f), pdl.valid_in(mb, f)
            if va != vb:
                witness = f if va else pdl.Not(f)
                break
    evidence = "enumeration"
    if witness is None:
        res = equivalent(alpha, beta)
        if res.equal:
            return CorrespondenceReport(4, instance, CONSISTENT, None, bounds | {"formulas": len(formulas)}, evidence)
        word = res.counterexample
        witness = _word_formula(word, accepts(program_nfa(alpha), word))
        evidence = "counterexample word"
    if not separates(witness):
        raise CorrespondenceViolation(f"{witness} does not separate M[{alpha}] from M[{beta}]")
    return CorrespondenceReport(4, instance, WITNESS, witness, bounds, evidence + ", re-checked")


def _initial(m: pdl.KripkeStructure):
    return next(s for s in m.states if m.holds(s, "init"))
