"""Proof checking for equational reasoning in Kleene algebra.

A proof script is a goal equation and a list of steps; each step is an
equation plus the rule that justifies it. Matching is purely syntactic, so
associativity and commutativity must be cited explicitly.

Text format, one item per line (``#`` starts a comment)::

    goal: 1;a + a;0 = a
    hyp h1: a;b = b;a
    a;0 = 0                      by axiom(seq-zero, x := a)
    1;a + a;0 = 1;a + 0          by cong(1, 1)
    ...

Rules: ``axiom(name, var := term, ...)``, ``refl``, ``sym(i)``,
``trans(i, j, ...)``, ``cong(i, path)`` with a dotted child path (``0`` = left or
star body, ``1`` = right; empty for the root), ``star-ind-l(i)``,
``star-ind-r(i)`` and ``hyp(name)``. ``s <= t`` abbreviates ``s + t = t``.
Steps are numbered from 1.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ._lexer import TokenStream
from .automata import build_eps_nfa, collapse, equivalent_automata
from .errors import ParseError
from .regprog import Choice, Prim, Program, ProgramParser, Seq, Star, parse_program


@dataclass(frozen=True)
class Equation:
    lhs: Program
    rhs: Program

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


def leq(x: Program, y: Program) -> Equation:
    """``x <= y`` stored in its expanded form ``x + y = y``."""
    return Equation(Choice(x, y), y)


def parse_equation(text: str) -> Equation:
    ts = TokenStream(text)
    parser = ProgramParser(ts, ka=True)
    lhs = parser.program()
    if ts.accept("="):
        eq = Equation(lhs, parser.program())
    elif ts.accept("<="):
        eq = leq(lhs, parser.program())
    else:
        ts.error("expected '=' or '<='")
    ts.expect_eof()
    return eq


# ---------------------------------------------------------------- axioms


def _p(text: str) -> Program:
    return parse_program(text, ka=True)


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    variables: tuple[str, ...]
    instances: tuple[Equation, ...]  # every orientation the table states
    horn: bool = False


def _chain(*terms: str) -> tuple[Equation, ...]:
    ts = [_p(t) for t in terms]
    return tuple(Equation(ts[i], ts[j]) for i in range(len(ts)) for j in range(i + 1, len(ts)))


AXIOMS: dict[str, AxiomSchema] = {
    s.name: s
    for s in [
        AxiomSchema("plus-assoc", ("x", "y", "z"), _chain("x+(y+z)", "(x+y)+z")),
        AxiomSchema("plus-comm", ("x", "y"), _chain("x+y", "y+x")),
        AxiomSchema("plus-zero", ("x",), _chain("x+0", "x")),
        AxiomSchema("plus-idem", ("x",), _chain("x+x", "x")),
        AxiomSchema("seq-assoc", ("x", "y", "z"), _chain("x;(y;z)", "(x;y);z")),
        AxiomSchema("seq-one", ("x",), _chain("1;x", "x;1", "x")),
        AxiomSchema("seq-dist-l", ("x", "y", "z"), _chain("x;(y+z)", "x;y+x;z")),
        AxiomSchema("seq-dist-r", ("x", "y", "z"), _chain("(x+y);z", "x;z+y;z")),
        AxiomSchema("seq-zero", ("x",), _chain("0;x", "x;0", "0")),
        AxiomSchema("star-unfold-l", ("x",), (leq(_p("1+x;x*"), _p("x*")),)),
        AxiomSchema("star-unfold-r", ("x",), (leq(_p("1+x*;x"), _p("x*")),)),
        # premise => conclusion, both in expanded <= form
        AxiomSchema("star-ind-l", ("a", "b", "x"), (leq(_p("b+a;x"), _p("x")), leq(_p("a*;b"), _p("x"))), True),
        AxiomSchema("star-ind-r", ("a", "b", "x"), (leq(_p("b+x;a"), _p("x")), leq(_p("b;a*"), _p("x"))), True),
    ]
}


def substitute(term: Program, subst: Mapping[str, Program]) -> Program:
    """Simultaneous replacement of primitive names by terms."""
    match term:
        case Prim(name):
            return subst.get(name, term)
        case Seq(left, right):
            return Seq(substitute(left, subst), substitute(right, subst))
        case Choice(left, right):
            return Choice(substitute(left, subst), substitute(right, subst))
        case Star(body):
            return Star(substitute(body, subst))
    return term


def instantiate(name: str, subst: Mapping[str, Program]) -> list[Equation]:
    """All equations the named equational axiom yields under ``subst``."""
    schema = AXIOMS[name]
    if schema.horn:
        raise ValueError(f"{name} is a Horn rule, not an equation")
    return [Equation(substitute(e.lhs, subst), substitute(e.rhs, subst)) for e in schema.instances]


# ---------------------------------------------------------------- scripts


@dataclass(frozen=True)
class Axiom:
    name: str
    subst: Mapping[str, Program] = field(default_factory=dict)


@dataclass(frozen=True)
class Refl:
    pass


@dataclass(frozen=True)
class Sym:
    step: int


@dataclass(frozen=True)
class Trans:
    """Chains ``s1 = s2``, ``s2 = s3``, ... into ``s1 = sn``; two or more steps."""

    steps: tuple[int, ...]


@dataclass(frozen=True)
class Cong:
    step: int
    path: tuple[int, ...] = ()


@dataclass(frozen=True)
class StarIndL:
    step: int


@dataclass(frozen=True)
class StarIndR:
    step: int


@dataclass(frozen=True)
class Hyp:
    name: str


Justification = Axiom | Refl | Sym | Trans | Cong | StarIndL | StarIndR | Hyp


@dataclass(frozen=True)
class ProofScript:
    goal: Equation
    steps: tuple[tuple[Equation, Justification], ...]
    hypotheses: Mapping[str, Equation] = field(default_factory=dict)


@dataclass(frozen=True)
class ProofResult:
    accepted: bool
    step: int | None = None
    reason: str | None = None
    detail: str = ""

    def to_json(self) -> dict:
        if self.accepted:
            return {"accepted": True}
        return {"accepted": False, "step": self.step, "reason": self.reason, "detail": self.detail}


class _Reject(Exception):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail


def subterm(term: Program, path: Sequence[int]) -> Program:
    for i in path:
        match term:
            case Seq(left, right) | Choice(left, right) if i in (0, 1):
                term = (left, right)[i]
            case Star(body) if i == 0:
                term = body
            case _:
                raise _Reject("bad-path", f"no child {i} in {term}")
    return term


def replace_at(term: Program, path: Sequence[int], new: Program) -> Program:
    if not path:
        return new
    i, rest = path[0], path[1:]
    match term:
        case Seq(left, right) if i in (0, 1):
            return Seq(replace_at(left, rest, new), right) if i == 0 else Seq(left, replace_at(right, rest, new))
        case Choice(left, right) if i in (0, 1):
            return Choice(replace_at(left, rest, new), right) if i == 0 else Choice(left, replace_at(right, rest, new))
        case Star(body) if i == 0:
            return Star(replace_at(body, rest, new))
    raise _Reject("bad-path", f"no child {i} in {term}")


def _horn_parts(eq: Equation, left: bool) -> tuple[Program, Program, Program]:
    """Read ``(a, b, x)`` off a premise ``(b + a;x) + x = x`` (or ``b + x;a`` for the right rule)."""
    match eq:
        case Equation(Choice(Choice(b, Seq(u, v)), x1), x2) if x1 == x2:
            if left and v == x1:
                return u, b, x1
            if not left and u == x1:
                return v, b, x1
    side = "b+a;x <= x" if left else "b+x;a <= x"
    raise _Reject("premise-shape", f"{eq} is not of the form {side}")


def check_proof(script: ProofScript) -> ProofResult:
    """Verify each step on its own; report the first bad one (1-based)."""
    proved: list[Equation] = []

    def earlier(k: int, here: int) -> Equation:
        if not isinstance(k, int) or k < 1 or k >= here:
            raise _Reject("dangling-index", f"step {k} is not an earlier step")
        return proved[k - 1]

    for n, (eq, just) in enumerate(script.steps, start=1):
        try:
            _check_step(script, eq, just, n, earlier)
        except _Reject as r:
            return ProofResult(False, n, r.reason, r.detail)
        proved.append(eq)
    if not proved:
        return ProofResult(False, 0, "empty-proof", "no steps")
    if proved[-1] != script.goal:
        return ProofResult(False, len(proved), "goal-mismatch", f"last step {proved[-1]} is not the goal {script.goal}")
    return ProofResult(True)


def _check_step(script: ProofScript, eq: Equation, just, n: int, earlier) -> None:
    match just:
        case Axiom(name, subst):
            schema = AXIOMS.get(name)
            if schema is None:
                raise _Reject("unknown-axiom", name)
            if schema.horn:
                raise _Reject("horn-as-axiom", f"{name} is a rule; cite it as {name}(i)")
            if set(subst) != set(schema.variables):
                raise _Reject(
                    "malformed-substitution",
                    f"{name} binds {', '.join(schema.variables)}; got {', '.join(sorted(subst)) or 'nothing'}",
                )
            if eq not in instantiate(name, subst):
                raise _Reject("schema-mismatch", f"{eq} is not an instance of {name}")
        case Refl():
            if eq.lhs != eq.rhs:
                raise _Reject("reflexivity-mismatch", str(eq))
        case Sym(k):
            prem = earlier(k, n)
            if eq != Equation(prem.rhs, prem.lhs):
                raise _Reject("symmetry-mismatch", f"{eq} is not {prem} reversed")
        case Trans(ks):
            if len(ks) < 2:
                raise _Reject("transitivity-mismatch", "trans needs at least two steps")
            chain = [earlier(k, n) for k in ks]
            for a, b in zip(chain, chain[1:]):
                if a.rhs != b.lhs:
                    raise _Reject("transitivity-mismatch", f"{a.rhs} differs from {b.lhs}")
            if eq != Equation(chain[0].lhs, chain[-1].rhs):
                raise _Reject("transitivity-mismatch", f"expected {chain[0].lhs} = {chain[-1].rhs}")
        case Cong(k, path):
            prem = earlier(k, n)
            if subterm(eq.lhs, path) != prem.lhs:
                raise _Reject("congruence-mismatch", f"subterm at {_path_text(path)} is not {prem.lhs}")
            if replace_at(eq.lhs, path, prem.rhs) != eq.rhs:
                raise _Reject("congruence-mismatch", f"rewriting with {prem} does not give {eq.rhs}")
        case StarIndL(k) | StarIndR(k):
            left = isinstance(just, StarIndL)
            a, b, x = _horn_parts(earlier(k, n), left)
            want = leq(Seq(Star(a), b), x) if left else leq(Seq(b, Star(a)), x)
            if eq != want:
                raise _Reject("conclusion-mismatch", f"rule yields {want}")
        case Hyp(name):
            if name not in script.hypotheses:
                raise _Reject("unknown-hypothesis", name)
            if script.hypotheses[name] != eq:
                raise _Reject("hypothesis-mismatch", f"{name} states {script.hypotheses[name]}")
        case _:
            raise _Reject("unknown-rule", repr(just))


def _path_text(path: Sequence[int]) -> str:
    return ".".join(map(str, path)) or "root"


# ---------------------------------------------------------------- text format

_JUST_RE = re.compile(r"^\s*([A-Za-z][\w-]*)\s*(?:\((.*)\))?\s*$")


def _split_args(text: str) -> list[str]:
    args, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            args.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        args.append(cur.strip())
    return args


def parse_justification(text: str) -> Justification:
    m = _JUST_RE.match(text)
    if m is None:
        raise ParseError(f"unreadable justification {text.strip()!r}", text, 0)
    rule, args = m.group(1).lower(), _split_args(m.group(2) or "")

    def ints(count: int | None) -> list[int]:
        if count is None and len(args) < 2 or count is not None and len(args) != count:
            raise ParseError(f"{rule} takes {count or 'two or more'} step numbers", text, 0)
        try:
            return [int(a) for a in args]
        except ValueError:
            raise ParseError(f"{rule} expects step numbers", text, 0) from None

    if rule == "axiom":
        if not args:
            raise ParseError("axiom needs a name", text, 0)
        subst = {}
        for binding in args[1:]:
            var, sep, term = binding.partition(":=")
            if not sep:
                raise ParseError(f"expected 'var := term', got {binding!r}", text, 0)
            subst[var.strip()] = parse_program(term, ka=True)
        return Axiom(args[0], subst)
    if rule == "refl":
        return Refl()
    if rule == "sym":
        return Sym(*ints(1))
    if rule == "trans":
        return Trans(tuple(ints(None)))
    if rule == "cong":
        if not 1 <= len(args) <= 2:
            raise ParseError("cong takes a step number and a path", text, 0)
        path_text = args[1] if len(args) == 2 else ""
        if path_text in ("", "root"):
            path = ()
        elif re.fullmatch(r"[01](\.[01])*", path_text):
            path = tuple(int(c) for c in path_text.split("."))
        else:
            raise ParseError(f"bad path {path_text!r}", text, 0)
        return Cong(int(args[0]), path)
    if rule == "star-ind-l":
        return StarIndL(*ints(1))
    if rule == "star-ind-r":
        return StarIndR(*ints(1))
    if rule == "hyp":
        if len(args) != 1:
            raise ParseError("hyp takes a name", text, 0)
        return Hyp(args[0])
    raise ParseError(f"unknown rule {rule!r}", text, 0)


_BY_RE = re.compile(r"\s+by\s+", re.IGNORECASE)


def parse_script(text: str) -> ProofScript:
    """Read a proof script in the line format or as JSON."""
    if text.lstrip().startswith("{"):
        return _script_from_json(json.loads(text))
    goal = None
    hyps: dict[str, Equation] = {}
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.lower().startswith("goal:"):
                goal = parse_equation(line[5:])
            elif line.lower().startswith("hyp ") and ":" in line:
                name, eq = line[4:].split(":", 1)
                hyps[name.strip()] = parse_equation(eq)
            else:
                parts = _BY_RE.split(line)
                if len(parts) != 2:
                    raise ParseError("expected '<equation> by <rule>'", line, 0)
                steps.append((parse_equation(parts[0]), parse_justification(parts[1])))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e.msg}", raw, e.position) from None
    if goal is None:
        raise ParseError("script has no 'goal:' line", text, 0)
    return ProofScript(goal, tuple(steps), hyps)


def _script_from_json(data: Mapping) -> ProofScript:
    return ProofScript(
        parse_equation(data["goal"]),
        tuple((parse_equation(s["eq"]), parse_justification(s["by"])) for s in data["steps"]),
        {k: parse_equation(v) for k, v in data.get("hypotheses", {}).items()},
    )


def format_justification(just: Justification) -> str:
    match just:
        case Axiom(name, subst):
            binds = "".join(f", {v} := {t}" for v, t in sorted(subst.items()))
            return f"axiom({name}{binds})"
        case Refl():
            return "refl"
        case Sym(k):
            return f"sym({k})"
        case Trans(ks):
            return f"trans({', '.join(map(str, ks))})"
        case Cong(k, path):
            return f"cong({k}, {_path_text(path)})"
        case StarIndL(k):
            return f"star-ind-l({k})"
        case StarIndR(k):
            return f"star-ind-r({k})"
        case Hyp(name):
            return f"hyp({name})"
    raise TypeError(just)


def format_script(script: ProofScript) -> str:
    lines = [f"goal: {script.goal}"]
    lines += [f"hyp {k}: {v}" for k, v in script.hypotheses.items()]
    lines += [f"{eq}    by {format_justification(j)}" for eq, j in script.steps]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- semantics


@dataclass(frozen=True)
class SoundnessResult:
    consistent: bool
    word: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"consistent": self.consistent}
        if self.word is not None:
            out["refuted"] = list(self.word)
        return out


def check_soundness_against_language(eq: Equation, max_word_length: int = 6) -> SoundnessResult:
    """Compare the word sets of both sides up to ``max_word_length``."""
    a = collapse(build_eps_nfa(eq.lhs))
    b = collapse(build_eps_nfa(eq.rhs))
    res = equivalent_automata(a, b, max_length=max_word_length)
    return SoundnessResult(True) if res.equal else SoundnessResult(False, res.counterexample)
