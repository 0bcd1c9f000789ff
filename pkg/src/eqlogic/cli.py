"""Command-line front end.

Exit status: 0 for a positive verdict or plain success, 1 for a negative
verdict (not bisimilar, not valid, refuted, rejected), 2 for usage or input
errors. Any literal argument may be given as ``@path`` to read it from a file.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from . import automata, bisim, correspondence, corpus, hml, ka, pdl
from .ccs import build_lts, format_trace, parse_action, parse_process, traces
from .errors import EqlogicError, ParseError
from .regprog import Interpretation, eval_relation, parse_program, primitives

OK, NEGATIVE, USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _literal(text: str) -> str:
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as e:
            raise InputError(f"cannot read {text[1:]}: {e.strerror}") from None
    return text


def _json_arg(text: str):
    try:
        return json.loads(_literal(text))
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None


def _emit(args, payload: dict, text: str | None = None, dot: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "dot":
        if dot is None:
            raise InputError(f"{args.command} has no DOT output")
        print(dot, end="" if dot.endswith("\n") else "\n")
    elif fmt == "text" and text is not None:
        print(text)
    else:
        print(json.dumps(payload, sort_keys=True))


# ---------------------------------------------------------------- commands


def cmd_ccs_trace(args) -> int:
    p = parse_process(_literal(args.process))
    word = [parse_action(a.strip()) for a in args.actions.split(",")] if args.actions else None
    found = list(traces(p, word, limit=args.limit))
    payload = {"traces": [[str(x) for x in tr] for tr in found]}
    _emit(args, payload, "\n".join(format_trace(tr) for tr in found) or "no trace")
    return OK if found else NEGATIVE


def cmd_ccs_lts(args) -> int:
    lts = build_lts(parse_process(_literal(args.process)), args.state_budget)
    text = "\n".join(f"{s} --{a}--> {t}" for s, a, t in lts.edges)
    _emit(args, lts.to_json(), text, lts.to_dot())
    return OK


def cmd_hml_check(args) -> int:
    p = parse_process(_literal(args.process))
    f = hml.parse_hml(_literal(args.formula))
    ok = hml.satisfies(p, f)
    _emit(args, {"satisfies": ok}, "satisfied" if ok else "not satisfied")
    return OK if ok else NEGATIVE


def cmd_bisim(args) -> int:
    p, q = parse_process(_literal(args.p)), parse_process(_literal(args.q))
    decide = bisim.bisimilar_naive if args.method == "naive" else bisim.bisimilar
    v = decide(p, q, args.state_budget)
    text = "bisimilar" if v.bisimilar else f"not bisimilar: {v.formula}"
    _emit(args, v.to_json(), text)
    return OK if v.bisimilar else NEGATIVE


def cmd_distinguish(args) -> int:
    """Exit 0 when a formula is printed, 1 when the processes are bisimilar."""
    p, q = parse_process(_literal(args.p)), parse_process(_literal(args.q))
    f = bisim.distinguishing_formula(p, q, args.state_budget)
    _emit(args, {"formula": None if f is None else str(f)}, "bisimilar" if f is None else str(f))
    return NEGATIVE if f is None else OK


def cmd_prog_nfa(args) -> int:
    prog = parse_program(_literal(args.program), ka=True)
    a = automata.build_eps_nfa(prog)
    if not args.eps:
        a = automata.collapse(a)
    text = "\n".join(f"{s} --{'eps' if x is None else x}--> {t}" for s, x, t in automata.sorted_edges(a))
    _emit(args, a.to_json(), text, a.to_dot())
    return OK


def cmd_prog_equiv(args) -> int:
    alpha = parse_program(_literal(args.alpha), ka=True)
    beta = parse_program(_literal(args.beta), ka=True)
    res = automata.equivalent(alpha, beta)
    text = "equal" if res.equal else f"different on {' '.join(res.counterexample) or 'the empty word'}"
    _emit(args, res.to_json(), text)
    return OK if res.equal else NEGATIVE


def cmd_prog_eval(args) -> int:
    prog = parse_program(_literal(args.program), ka=True)
    sigma = Interpretation.from_json(_json_arg(args.interp))
    rel = eval_relation(sigma, prog)
    pairs = sorted([u, v] for u, v in rel)
    _emit(args, {"relation": pairs}, "\n".join(f"{u} -> {v}" for u, v in pairs))
    return OK


def _kripke(args, f: pdl.Formula) -> pdl.KripkeStructure:
    if args.kripke is not None:
        return pdl.KripkeStructure.from_json(_json_arg(args.kripke))
    if args.program is not None:
        prog = parse_program(_literal(args.program))
        # letters the program never reads are still interpreted, as empty relations
        return automata.program_kripke(prog, primitives(prog) | pdl.formula_primitives(f))
    raise InputError("give --kripke or --program")


def cmd_pdl_check(args) -> int:
    f = pdl.parse_pdl(_literal(args.formula))
    m = _kripke(args, f)
    by_name = {str(s): s for s in m.states}
    if args.state not in by_name:
        raise InputError(f"unknown state {args.state!r}")
    ok = pdl.pdl_satisfies(m, by_name[args.state], f)
    _emit(args, {"satisfies": ok}, "satisfied" if ok else "not satisfied")
    return OK if ok else NEGATIVE


def cmd_pdl_valid(args) -> int:
    f = pdl.parse_pdl(_literal(args.formula))
    m = _kripke(args, f)
    ext = pdl.extension(m, f)
    ok = ext == frozenset(m.states)
    failing = sorted(str(s) for s in m.states if s not in ext)
    payload = {"valid": ok} if ok else {"valid": False, "failing": failing}
    _emit(args, payload, "valid" if ok else f"fails at {', '.join(failing)}")
    return OK if ok else NEGATIVE


def cmd_ka_check(args) -> int:
    script = ka.parse_script(_literal(args.script))
    res = ka.check_proof(script)
    payload = res.to_json()
    ok = res.accepted
    if ok and args.soundness is not None:
        snd = ka.check_soundness_against_language(script.goal, args.soundness)
        payload["soundness"] = snd.to_json()
        ok = snd.consistent
    if res.accepted:
        text = "accepted" if ok else f"accepted, but refuted on {payload['soundness']['refuted']}"
    else:
        text = f"rejected at step {res.step}: {res.reason} ({res.detail})"
    _emit(args, payload, text)
    return OK if ok else NEGATIVE


def cmd_correspond(args) -> int:
    prop = args.proposition
    processes = prop in (1, 2)
    if args.corpus:
        if processes:
            pairs = corpus.random_process_pairs(args.seed, args.count)
        else:
            pairs = corpus.ka_rewrite_pairs(args.seed, args.count) if args.equal else corpus.random_program_pairs(
                args.seed, args.count
            )
    else:
        if args.left is None or args.right is None:
            raise InputError("give two terms or --corpus")
        parse = parse_process if processes else parse_program
        pairs = [(parse(_literal(args.left)), parse(_literal(args.right)))]

    mismatches = 0
    rows = []
    for i, (x, y) in enumerate(pairs):
        if prop == 1:
            r = correspondence.check_prop1(x, y, args.depth)
            expected = bisim.bisimilar(x, y).bisimilar
        elif prop == 2:
            r = correspondence.check_prop2_intension(x, y, args.depth)
            expected = bisim.bisimilar(x, y).bisimilar
        elif prop == 3:
            r = correspondence.check_prop3(x, y, seed=args.seed + i)
            expected = automata.equivalent(x, y).equal
        else:
            r = correspondence.check_prop4(x, y, 2 if args.depth is None else args.depth)
            expected = automata.equivalent(x, y).equal
        agrees = r.consistent == expected
        mismatches += not agrees
        rows.append((r, agrees))
        if args.format == "json":
            print(json.dumps(r.to_json() | {"agrees": agrees}, sort_keys=True))
    if args.format == "text":
        for r, agrees in rows:
            print(f"{'ok ' if agrees else 'BAD'} {r.verdict:<10} {r.instance}")
        consistent = sum(r.consistent for r, _ in rows)
        print(f"proposition {prop}: {len(rows)} instances, {consistent} consistent, "
              f"{len(rows) - consistent} witnesses, {mismatches} disagreements")
    if args.corpus:
        return OK if mismatches == 0 else NEGATIVE
    return OK if rows[0][0].consistent else NEGATIVE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqlogic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, fn: Callable, help: str, formats=("json", "text")) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        sp.add_argument("--format", choices=formats, default="json")
        return sp

    def budget(sp):
        sp.add_argument("--state-budget", type=int, default=None, help="LTS state limit (env EQLOGIC_STATE_BUDGET)")

    sp = command("ccs-trace", cmd_ccs_trace, "transition sequences of a process")
    sp.add_argument("process")
    sp.add_argument("--actions", help="comma-separated label word, e.g. tau,tau")
    sp.add_argument("--limit", type=int, default=None)

    sp = command("ccs-lts", cmd_ccs_lts, "reachable labelled transition system", ("json", "text", "dot"))
    sp.add_argument("process")
    budget(sp)

    sp = command("hml-check", cmd_hml_check, "does a process satisfy an HML formula")
    sp.add_argument("process")
    sp.add_argument("formula")

    sp = command("bisim", cmd_bisim, "strong bisimilarity")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("--method", choices=("refinement", "naive"), default="refinement")
    budget(sp)

    sp = command("distinguish", cmd_distinguish, "HML formula true of P and false of Q")
    sp.add_argument("p")
    sp.add_argument("q")
    budget(sp)

    sp = command("prog-nfa", cmd_prog_nfa, "automaton of a program", ("json", "text", "dot"))
    sp.add_argument("program")
    sp.add_argument("--eps", action="store_true", help="stop before collapsing epsilon moves")

    sp = command("prog-equiv", cmd_prog_equiv, "language equality of two programs")
    sp.add_argument("alpha")
    sp.add_argument("beta")

    sp = command("prog-eval", cmd_prog_eval, "input-output relation of a program")
    sp.add_argument("program")
    sp.add_argument("--interp", required=True, help="interpretation JSON or @file")

    for name, fn, help in (
        ("pdl-check", cmd_pdl_check, "PDL formula at one state"),
        ("pdl-valid", cmd_pdl_valid, "PDL formula at every state"),
    ):
        sp = command(name, fn, help)
        sp.add_argument("formula")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--kripke", help="Kripke structure JSON or @file")
        src.add_argument("--program", help="use the structure of this program's automaton")
        if name == "pdl-check":
            sp.add_argument("--state", required=True)

    sp = command("ka-check", cmd_ka_check, "check a Kleene-algebra proof script")
    sp.add_argument("script", help="script text or @file")
    sp.add_argument("--soundness", type=int, metavar="N", help="also compare languages up to length N")

    sp = command("correspond", cmd_correspond, "bounded checks of the logic/equation correspondences")
    sp.add_argument("proposition", type=int, choices=(1, 2, 3, 4))
    sp.add_argument("left", nargs="?")
    sp.add_argument("right", nargs="?")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--corpus", action="store_true", help="run over a seeded random corpus")
    sp.add_argument("--equal", action="store_true", help="program corpus of KA-rewritten (equal) pairs")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"eqlogic {args.command}: {e.msg} (at offset {e.position})", file=sys.stderr)
        return USAGE
    except (EqlogicError, InputError, KeyError, ValueError) as e:
        print(f"eqlogic {args.command}: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
