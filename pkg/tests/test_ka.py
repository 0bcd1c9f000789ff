import dataclasses
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import programs
from eqlogic.corpus import axiom_instances
from eqlogic.errors import ParseError
from eqlogic.ka import (
    AXIOMS,
    Axiom,
    Equation,
    Refl,
    ProofScript,
    Sym,
    Trans,
    check_proof,
    check_soundness_against_language,
    format_justification,
    format_script,
    instantiate,
    leq,
    parse_equation,
    parse_justification,
    parse_script,
)
from eqlogic.regprog import Choice, Prim, Seq, parse_program

PROOFS = Path(__file__).resolve().parent.parent / "proofs"


def script(name):
    return parse_script((PROOFS / name).read_text())


def expectation(path):
    head = path.read_text().splitlines()[0]
    _, rest = head.split("expect-reject:")
    step, reason = rest.split()
    return int(step), reason


# a rewriter of its own on nested tuples, sharing nothing with the checker


def term(text):
    def conv(p):
        match p:
            case Prim(n):
                return n
            case Seq(l, r):
                return (";", conv(l), conv(r))
            case Choice(l, r):
                return ("+", conv(l), conv(r))
        return str(p)

    return conv(parse_program(text, ka=True))


def simplify(t):
    if isinstance(t, str):
        return t
    op, l, r = t[0], simplify(t[1]), simplify(t[2])
    if op == ";":
        if "0" in (l, r):
            return "0"
        if l == "1":
            return r
        if r == "1":
            return l
    if op == "+":
        if l == "0":
            return r
        if r == "0":
            return l
    return (op, l, r)


def test_rewrite_trace_oracle():
    assert simplify(term("1;a + a;0")) == term("a")
    assert simplify(term("1;a + a;0")) != term("a;0")


def test_example_proofs_are_accepted():
    for name in ["plus_zero.ka", "plus_idem.ka", "one_zero.ka", "star_ind.ka"]:
        res = check_proof(script(name))
        assert res.accepted, (name, res)


def test_five_step_proof():
    s = script("one_zero.ka")
    assert len(s.steps) == 5
    assert s.goal == parse_equation("1;a + a;0 = a")
    assert simplify(term("1;a + a;0")) == term("a")


@pytest.mark.parametrize("path", sorted((PROOFS / "corrupted").glob("*.ka")), ids=lambda p: p.stem)
def test_corrupted_proofs_are_rejected_where_expected(path):
    step, reason = expectation(path)
    res = check_proof(parse_script(path.read_text()))
    assert not res.accepted
    assert (res.step, res.reason) == (step, reason)


def test_wrong_variable_substitution():
    s = parse_script("goal: a + 0 = a\na + 0 = a by axiom(plus-zero, y := a)\n")
    assert check_proof(s).to_json()["reason"] == "malformed-substitution"


def test_seq_comm_is_not_derivable_in_one_step():
    s = parse_script("goal: a;b = b;a\na;b = b;a by axiom(plus-comm, x := a, y := b)\n")
    res = check_proof(s)
    assert (res.step, res.reason) == (1, "schema-mismatch")


def test_horn_rule_cannot_be_cited_as_axiom():
    s = parse_script("goal: a = a\na = a by axiom(star-ind-l, a := a, b := a, x := a)\n")
    assert check_proof(s).reason == "horn-as-axiom"


def test_goal_and_emptiness():
    assert check_proof(ProofScript(parse_equation("a = a"), ())).reason == "empty-proof"
    s = parse_script("goal: a = b\na = a by refl\n")
    assert check_proof(s).reason == "goal-mismatch"


def test_hypotheses():
    s = parse_script("goal: b = a\nhyp h: a = b\na = b by hyp(h)\nb = a by sym(1)\n")
    assert check_proof(s).accepted
    s = parse_script("goal: a = b\na = b by hyp(h)\n")
    assert check_proof(s).reason == "unknown-hypothesis"


def test_leq_is_expanded():
    assert parse_equation("a <= b") == Equation(parse_program("a+b"), parse_program("b"))
    assert leq(Prim("a"), Prim("b")) == parse_equation("a + b = b")


def test_chained_schemas_give_every_ordered_pair():
    eqs = instantiate("seq-one", {"x": Prim("a")})
    assert {str(e) for e in eqs} == {"1;a = a;1", "1;a = a", "a;1 = a"}


def test_parse_errors_carry_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_script("goal: a = a\na = a\n")
    with pytest.raises(ParseError):
        parse_script("a = a by refl\n")
    with pytest.raises(ParseError):
        parse_justification("trans(1,")


def test_json_script_format():
    s = script("one_zero.ka")
    data = {
        "goal": str(s.goal),
        "steps": [{"eq": str(eq), "by": format_justification(j)} for eq, j in s.steps],
    }
    assert parse_script(json.dumps(data)) == s


def test_format_script_round_trips():
    for name in ["plus_zero.ka", "plus_idem.ka", "one_zero.ka", "star_ind.ka"]:
        s = script(name)
        assert parse_script(format_script(s)) == s


def test_soundness_examples():
    assert check_soundness_against_language(parse_equation("(1 + a;a*) + a* = a*")).consistent
    res = check_soundness_against_language(parse_equation("a = a;a"))
    assert not res.consistent and res.word == ("a",)
    assert check_soundness_against_language(parse_equation("0;a = 0")).consistent


def test_axiom_instances_are_language_sound():
    for name, eq in axiom_instances(seed=3, per_axiom=8):
        if not AXIOMS[name].horn:
            assert check_soundness_against_language(eq, 5).consistent, (name, str(eq))


def test_accepted_goals_are_language_sound():
    for name in ["plus_zero.ka", "plus_idem.ka", "one_zero.ka", "star_ind.ka"]:
        assert check_soundness_against_language(script(name).goal).consistent


# ---------------------------------------------------------------- properties


def _shift(just, at):
    # renumber references after inserting a step at position ``at``
    def bump(k):
        return k + 1 if k >= at else k

    if isinstance(just, Trans):
        return Trans(tuple(map(bump, just.steps)))
    if hasattr(just, "step"):
        return dataclasses.replace(just, step=bump(just.step))
    return just


def _all_scripts():
    return [script(n) for n in ["plus_zero.ka", "plus_idem.ka", "one_zero.ka", "star_ind.ka"]]


@given(st.sampled_from(_all_scripts()), st.data(), programs(3, ka=True))
def test_extra_steps_do_not_change_acceptance(s, data, junk):
    at = data.draw(st.integers(1, len(s.steps)))
    steps = list(s.steps)
    extra = (Equation(junk, junk), Refl())
    new = steps[: at - 1] + [extra] + [(eq, _shift(j, at)) for eq, j in steps[at - 1 :]]
    assert check_proof(ProofScript(s.goal, tuple(new), s.hypotheses)).accepted


@given(st.sampled_from(_all_scripts()), st.data())
def test_rejection_points_at_the_first_bad_step(s, data):
    k = data.draw(st.integers(1, len(s.steps)))
    steps = list(s.steps)
    eq, j = steps[k - 1]
    steps[k - 1] = (Equation(eq.lhs, Choice(eq.rhs, Prim("zz"))), j)
    res = check_proof(ProofScript(s.goal, tuple(steps), s.hypotheses))
    assert not res.accepted and res.step == k


@given(st.sampled_from(sorted(n for n, a in AXIOMS.items() if not a.horn)), st.data())
def test_every_instance_checks_both_ways(name, data):
    schema = AXIOMS[name]
    subst = {v: data.draw(programs(3, ka=True)) for v in schema.variables}
    eq = data.draw(st.sampled_from(instantiate(name, subst)))
    flipped = Equation(eq.rhs, eq.lhs)
    s = ProofScript(flipped, ((eq, Axiom(name, subst)), (flipped, Sym(1))))
    assert check_proof(s).accepted
    s = ProofScript(eq, ((eq, Axiom(name, subst)), (flipped, Sym(1)), (eq, Sym(2)), (eq, Trans((1, 3)))))
    # trans(1, 3) needs eq.rhs == eq.lhs, which only holds for trivial instances
    assert check_proof(s).accepted == (eq.lhs == eq.rhs)
