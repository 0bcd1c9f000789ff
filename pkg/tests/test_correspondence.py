import random

import pytest
from hypothesis import given, settings

from conftest import processes
from eqlogic import hml, pdl
from eqlogic.automata import equivalent, program_kripke
from eqlogic.ccs import NIL, TAU, parse_process
from eqlogic.corpus import process_family, random_program_pairs
from eqlogic.correspondence import (
    CONSISTENT,
    WITNESS,
    chain_model,
    check_prop1,
    check_prop2_intension,
    check_prop3,
    check_prop4,
    intension_fragment,
)
from eqlogic.regprog import parse_program


def P(text):
    return parse_process(text)


def R(text):
    return parse_program(text)


def test_prop1_examples():
    assert check_prop1(NIL, NIL, depth=3).verdict == CONSISTENT
    rep = check_prop1(P("tau.tau.0"), P("tau.0"), depth=2)
    assert rep.verdict == WITNESS
    assert hml.satisfies(P("tau.tau.0"), rep.witness)
    assert not hml.satisfies(P("tau.0"), rep.witness)


def test_report_json_records_bounds():
    out = check_prop1(P("a!.0"), P("a!.0 + a!.0"), depth=2, max_size=4).to_json()
    assert out["verdict"] == CONSISTENT
    assert out["bounds"]["modal_depth"] == 2 and out["bounds"]["formula_size"] == 4
    assert out["bounds"]["formulas"] > 0


def test_intension_of_nil_has_every_box_false():
    frag = intension_fragment(NIL, [TAU], 1, 3)
    assert hml.parse_hml("[tau]false") in frag


def test_prop2_mirrors_prop1_on_a_family_sample():
    fam = process_family(2, ["x"])
    rng = random.Random(5)
    for p, q in [(rng.choice(fam), rng.choice(fam)) for _ in range(40)]:
        a, b = check_prop1(p, q, max_size=4), check_prop2_intension(p, q, max_size=4)
        assert a.verdict == b.verdict
        assert a.witness == b.witness


@settings(max_examples=25)
@given(processes(max_leaves=3), processes(max_leaves=3))
def test_prop1_and_prop2_agree(p, q):
    assert check_prop1(p, q, max_size=4).verdict == check_prop2_intension(p, q, max_size=4).verdict


def test_prop3_examples():
    assert check_prop3(R("a"), R("a+a")).verdict == CONSISTENT
    rep = check_prop3(R("a"), R("b"))
    assert rep.verdict == WITNESS
    w = rep.witness
    assert w.model.states == (0, 1)
    assert str(w.formula) == "end"
    assert pdl.pdl_satisfies(w.model, 0, w.left)
    assert not pdl.pdl_satisfies(w.model, 0, w.right)
    same = check_prop3(R("a;b*"), R("a;b*"))
    assert same.verdict == CONSISTENT and same.evidence == "syntactic identity"


def test_chain_model_shape():
    m = chain_model(("a", "b", "a"), ["a", "b"])
    assert m.sigma.relation("a") == {(0, 1), (2, 3)}
    assert [s for s in m.states if m.holds(s, "end")] == [3]


def test_prop4_examples():
    assert check_prop4(R("a"), R("a+a"), depth=2).verdict == CONSISTENT
    rep = check_prop4(R("a"), R("b"), depth=1)
    assert str(rep.witness) == "(init => <a>true)"
    assert check_prop4(R("a*;b"), R("a*;b")).verdict == CONSISTENT


@pytest.mark.parametrize("seed", [0, 1])
def test_witnesses_are_shallow_and_rechecked(seed):
    # a witness exists at modal depth at most |w| + 1 for the shortest counterexample w
    for alpha, beta in random_program_pairs(seed, count=25):
        res = equivalent(alpha, beta)
        if res.equal:
            continue
        rep = check_prop4(alpha, beta)
        assert rep.verdict == WITNESS
        assert pdl.modal_depth(rep.witness) <= len(res.counterexample) + 1
        prims = sorted({*map(str, res.counterexample)} | {"a", "b"})
        ma, mb = program_kripke(alpha, prims), program_kripke(beta, prims)
        assert pdl.valid_in(ma, rep.witness) and not pdl.valid_in(mb, rep.witness)
        rep3 = check_prop3(alpha, beta)
        assert rep3.bounds["word_length"] == len(res.counterexample)
