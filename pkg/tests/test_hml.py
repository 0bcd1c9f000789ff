from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ACTIONS, processes
from eqlogic.ccs import NIL, TAU, parse_process, receive, transitions
from eqlogic.errors import ParseError
from eqlogic.hml import (
    FALSE,
    TRUE,
    And,
    Box,
    Not,
    core_text,
    diamond,
    enumerate_formulas,
    modal_depth,
    parse_hml,
    satisfies,
    size,
)


def formulas(max_leaves=5):
    return st.recursive(
        st.just(TRUE),
        lambda kids: st.one_of(
            kids.map(Not),
            st.tuples(kids, kids).map(lambda lr: And(*lr)),
            st.tuples(st.sampled_from(ACTIONS), kids).map(lambda af: Box(*af)),
        ),
        max_leaves=max_leaves,
    )


def test_parse_core_and_sugar():
    assert parse_hml("true") == TRUE
    assert parse_hml("<tau>true") == Not(Box(TAU, Not(TRUE)))
    assert parse_hml("[x?](true & ~true)") == Box(receive("x"), And(TRUE, Not(TRUE)))
    assert parse_hml("false") == Not(TRUE)
    assert parse_hml("true | false") == Not(And(Not(TRUE), Not(FALSE)))
    assert parse_hml("true => false") == parse_hml("~true | false")


def test_implication_is_right_associative():
    a, b, c = "[x?]true", "[x!]true", "[tau]true"
    assert parse_hml(f"{a} => {b} => {c}") == parse_hml(f"{a} => ({b} => {c})")


@pytest.mark.parametrize("text", ["", "[x?", "<tau>", "true &", "[q]true"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_hml(text)


def test_satisfaction_examples():
    assert satisfies(NIL, parse_hml("[x?]false"))
    f = parse_hml("[tau]<tau>true")
    assert satisfies(parse_process("tau.tau.0"), f)
    assert not satisfies(parse_process("tau.0"), f)


def test_enumeration_small_cases():
    assert list(enumerate_formulas([TAU], 0, 1)) == [TRUE]
    small = list(enumerate_formulas([TAU], 1, 3))
    assert Box(TAU, TRUE) in small and Not(Box(TAU, TRUE)) in small
    assert len(small) == len(set(small))


@lru_cache(maxsize=None)
def count(n, depth, k):
    # formulas of size exactly n and modal depth <= depth over k actions
    if n == 1:
        return 1
    total = count(n - 1, depth, k)
    if depth > 0:
        total += k * count(n - 1, depth - 1, k)
    total += sum(count(i, depth, k) * count(n - 1 - i, depth, k) for i in range(1, n - 1))
    return total


@pytest.mark.parametrize("depth,max_size,k", [(1, 4, 1), (2, 5, 2), (0, 5, 3), (3, 6, 3)])
def test_enumeration_count_matches_grammar_count(depth, max_size, k):
    got = list(enumerate_formulas(ACTIONS[:k], depth, max_size))
    assert len(got) == len(set(got)) == sum(count(n, depth, k) for n in range(1, max_size + 1))
    assert all(modal_depth(f) <= depth and size(f) <= max_size for f in got)
    keys = [(size(f), core_text(f)) for f in got]
    assert keys == sorted(keys)


def test_modal_depth():
    assert modal_depth(parse_hml("[tau](<x?>true & true)")) == 2


@given(formulas())
def test_printing_round_trips(f):
    assert parse_hml(str(f)) == f
    assert parse_hml(core_text(f)) == f


@given(processes(), formulas(), formulas())
def test_boolean_clauses(p, f, g):
    assert satisfies(p, Not(f)) == (not satisfies(p, f))
    assert satisfies(p, And(f, g)) == (satisfies(p, f) and satisfies(p, g))
    assert satisfies(p, TRUE)


@given(processes(), st.sampled_from(ACTIONS), formulas())
def test_diamond_duality(p, a, f):
    want = any(b == a and satisfies(q, f) for b, q in transitions(p))
    assert satisfies(p, diamond(a, f)) == want


def truncated(p, f, k):
    # evaluate on the unfolding cut off below depth k
    match f:
        case Not(body):
            return not truncated(p, body, k)
        case And(left, right):
            return truncated(p, left, k) and truncated(p, right, k)
        case Box(a, body):
            moves = transitions(p) if k > 0 else ()
            return all(truncated(q, body, k - 1) for b, q in moves if b == a)
    return True


@given(processes(), formulas())
def test_only_the_unfolding_to_modal_depth_matters(p, f):
    assert truncated(p, f, modal_depth(f)) == satisfies(p, f)
