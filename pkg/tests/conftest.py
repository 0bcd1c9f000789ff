import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from eqlogic.ccs import NIL, TAU, Nu, Par, Sum, receive, send
from eqlogic.regprog import ONE, ZERO, Choice, Interpretation, Prim, Seq, Star

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACTIONS = [TAU, receive("x"), send("x"), receive("y"), send("y")]


def processes(max_leaves=4, channels=("x", "y")):
    acts = st.sampled_from([TAU] + [f(c) for c in channels for f in (receive, send)])
    return st.recursive(
        st.just(NIL),
        lambda kids: st.one_of(
            st.lists(st.tuples(acts, kids), min_size=1, max_size=2).map(lambda xs: Sum(tuple(xs))),
            st.tuples(kids, kids).map(lambda lr: Par(*lr)),
            st.tuples(st.sampled_from(channels), kids).map(lambda cb: Nu(*cb)),
        ),
        max_leaves=max_leaves,
    )


def programs(max_leaves=4, prims=("a", "b"), ka=False):
    leaves = [Prim(p) for p in prims] + ([ZERO, ONE] if ka else [])
    return st.recursive(
        st.sampled_from(leaves),
        lambda kids: st.one_of(
            st.tuples(kids, kids).map(lambda lr: Seq(*lr)),
            st.tuples(kids, kids).map(lambda lr: Choice(*lr)),
            kids.map(Star),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def interpretations(draw, prims=("a", "b"), max_states=4):
    n = draw(st.integers(1, max_states))
    pairs = st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * n)
    return Interpretation(frozenset(range(n)), {a: draw(pairs) for a in prims})


# ---------------------------------------------------------------- acceptance summary

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` records one acceptance line for the summary."""
    results = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(n: int, ok: bool, detail: str) -> None:
        results[n] = (ok, detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
