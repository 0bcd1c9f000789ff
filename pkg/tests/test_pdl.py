import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import programs
from eqlogic.automata import equivalent, program_kripke
from eqlogic.corpus import random_kripke, random_pdl
from eqlogic.errors import ParseError, RichTestRejected, UnknownProposition, UnknownState
from eqlogic.pdl import (
    Box,
    KripkeStructure,
    Not,
    Prop,
    diamond,
    extension,
    iff,
    implies,
    parse_pdl,
    parse_test_program,
    pdl_satisfies,
    program_relation,
    valid_in,
)
from eqlogic.regprog import Interpretation, Prim, eval_relation, identity, parse_program


def structure(states, props, rels):
    return KripkeStructure(tuple(states), props, Interpretation(frozenset(states), rels))


@pytest.fixture
def m():
    # 0 -a-> 1 -a-> 2, 0 -b-> 2; p holds at 0 and 2
    return structure(
        [0, 1, 2],
        {0: {"p": True}, 1: {"p": False}, 2: {"p": True, "q": True}},
        {"a": {(0, 1), (1, 2)}, "b": {(0, 2)}},
    )


@st.composite
def kripkes(draw):
    seed = draw(st.integers(0, 10**6))
    n = draw(st.integers(1, 4))
    return random_kripke(random.Random(seed), n, ("p", "q"), ("a", "b"))


@st.composite
def pdl_formulas(draw, depth=2):
    return random_pdl(random.Random(draw(st.integers(0, 10**6))), ("p", "q"), ("a", "b"), depth)


def test_vacuous_box():
    one = structure([0], {0: {"p": False}}, {"a": set()})
    assert pdl_satisfies(one, 0, parse_pdl("[a]p"))


def test_automaton_structure():
    ma = program_kripke(parse_program("a"))
    init = next(s for s in ma.states if ma.holds(s, "init"))
    assert pdl_satisfies(ma, init, parse_pdl("<a>final"))
    assert valid_in(ma, parse_pdl("init => <a>true"))
    assert not valid_in(program_kripke(parse_program("b"), ["a", "b"]), parse_pdl("init => <a>true"))


def test_valuation_is_total(m):
    assert m.holds(0, "q") is False


def test_errors(m):
    with pytest.raises(UnknownProposition):
        pdl_satisfies(m, 0, parse_pdl("r"))
    with pytest.raises(UnknownState):
        pdl_satisfies(m, 7, parse_pdl("p"))
    with pytest.raises(RichTestRejected):
        parse_pdl("[([a]p)?]q")
    with pytest.raises(ParseError):
        parse_pdl("[a p")


def test_tests(m):
    assert program_relation(m, parse_test_program("p?")) == {(0, 0), (2, 2)}
    assert program_relation(m, parse_test_program("(~p & p)?")) == frozenset()


def test_conditional_routes_by_test(m):
    # 0 and 2 satisfy p and may only take a; 1 may only take b
    cond = parse_test_program("(p?;a)+((~p)?;b)")
    assert program_relation(m, cond) == {(0, 1)}
    cond = parse_test_program("(p?;b)+((~p)?;a)")
    assert program_relation(m, cond) == {(0, 2), (1, 2)}


def test_excluded_middle(m):
    assert valid_in(m, parse_pdl("p | ~p"))


def test_diamond_sugar():
    assert parse_pdl("<a>p") == Not(Box(Prim("a"), Not(Prop("p"))))
    f = parse_pdl("[a;(b+c)*]final & <p? ; a>q")
    assert parse_pdl(str(f)) == f


def test_json_round_trip(m):
    m2 = KripkeStructure.from_json(json.loads(json.dumps(m.to_json())))
    assert m2.states == m.states and m2.valuation == m.valuation and m2.sigma == m.sigma


def test_string_state_names():
    m = KripkeStructure.from_json({"states": ["s", "t"], "props": {"s": {"p": True}}, "relations": {"a": [["s", "t"]]}})
    assert extension(m, parse_pdl("<a>~p")) == {"s"}


@given(kripkes(), pdl_formulas(), programs(3))
def test_diamond_is_dual_box(m, f, prog):
    for s in m.states:
        assert pdl_satisfies(m, s, diamond(prog, f)) == pdl_satisfies(m, s, Not(Box(prog, Not(f))))
        succ = [t for u, t in program_relation(m, prog) if u == s]
        assert pdl_satisfies(m, s, diamond(prog, f)) == any(pdl_satisfies(m, t, f) for t in succ)


@given(kripkes(), programs(4))
def test_program_relation_extends_eval_relation(m, prog):
    assert program_relation(m, prog) == eval_relation(m.sigma, prog)


@given(kripkes(), st.data())
def test_box_is_antitone(m, data):
    rel = m.sigma.relation("a")
    keep = data.draw(st.sets(st.sampled_from(sorted(rel)))) if rel else set()
    smaller = KripkeStructure(m.states, m.valuation, Interpretation(m.sigma.states, {**m.sigma.relations, "a": keep}))
    f = parse_pdl("[a]p")
    assert extension(m, f) <= extension(smaller, f)


@given(kripkes(), pdl_formulas(), pdl_formulas())
def test_modus_ponens(m, f, g):
    if valid_in(m, f) and valid_in(m, implies(f, g)):
        assert valid_in(m, g)


@given(programs(4), programs(4), kripkes(), pdl_formulas(1))
def test_equal_programs_have_equal_diamonds(alpha, beta, m, f):
    if equivalent(alpha, beta).equal:
        assert valid_in(m, iff(diamond(alpha, f), diamond(beta, f)))


def test_identity_test(m):
    assert program_relation(m, parse_test_program("true?")) == identity(m.states)
