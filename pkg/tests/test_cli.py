import json
from pathlib import Path

import pytest

from eqlogic import automata, bisim, hml, ka
from eqlogic.automata import Nfa
from eqlogic.ccs import build_lts, parse_process
from eqlogic.cli import run
from eqlogic.pdl import KripkeStructure
from eqlogic.regprog import parse_program

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = Path(__file__).resolve().parent / "golden"


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("case", sorted(p.stem for p in GOLDEN.glob("*.args")))
def test_golden(case, capsys, monkeypatch):
    monkeypatch.chdir(ROOT)
    argv = (GOLDEN / f"{case}.args").read_text().splitlines()
    first, *expected = (GOLDEN / f"{case}.out").read_text().splitlines(keepends=True)
    code, out, _ = cli(capsys, *argv)
    assert f"exit {code}\n" == first
    assert out == "".join(expected)


def test_spec_examples(capsys):
    code, out, _ = cli(capsys, "bisim", "tau.tau.0", "tau.0")
    assert code == 1
    f = hml.parse_hml(json.loads(out)["formula"])
    assert hml.satisfies(parse_process("tau.tau.0"), f) and not hml.satisfies(parse_process("tau.0"), f)
    code, out, _ = cli(capsys, "prog-equiv", "a", "a+a")
    assert code == 0 and json.loads(out) == {"equal": True}
    assert cli(capsys, "hml-check", "0", "true")[0] == 0


PROCESS_PAIRS = [("a!.0 | a?.0", "tau.0"), ("a?.(b!.0 + c!.0)", "a?.b!.0 + a?.c!.0"), ("x!.0 + x!.0", "x!.0")]


@pytest.mark.parametrize("p,q", PROCESS_PAIRS)
def test_verdicts_match_library(p, q, capsys):
    lib = bisim.bisimilar(parse_process(p), parse_process(q)).bisimilar
    for method in ("refinement", "naive"):
        code, out, _ = cli(capsys, "bisim", p, q, "--method", method)
        assert json.loads(out)["bisimilar"] == lib
        assert code == (0 if lib else 1)
    code, _, _ = cli(capsys, "distinguish", p, q)
    assert code == (1 if lib else 0)


@pytest.mark.parametrize("alpha,beta", [("a*", "1 + a;a*"), ("(a+b)*", "a*;(b;a*)*"), ("a;(b+c)", "a;b + c")])
def test_equivalence_matches_library(alpha, beta, capsys):
    res = automata.equivalent(parse_program(alpha, ka=True), parse_program(beta, ka=True))
    code, out, _ = cli(capsys, "prog-equiv", alpha, beta)
    assert json.loads(out) == res.to_json()
    assert code == (0 if res.equal else 1)


def test_lts_json_parses_back(capsys):
    code, out, _ = cli(capsys, "ccs-lts", "nu x.(x!.0 | x?.a!.0)")
    data = json.loads(out)
    lts = build_lts(parse_process("nu x.(x!.0 | x?.a!.0)"))
    assert code == 0 and data == lts.to_json()
    # every printed state is itself a process with the same moves
    for s in lts.states:
        again = parse_process(str(s))
        assert bisim.bisimilar(s, again).bisimilar


def test_nfa_json_round_trips(capsys):
    _, out, _ = cli(capsys, "prog-nfa", "(a+b)*;a")
    nfa = Nfa.from_json(json.loads(out))
    assert nfa.to_json() == json.loads(out)
    assert automata.accepts(nfa, ("b", "a")) and not automata.accepts(nfa, ("a", "b"))


def test_ka_result_json_round_trips(capsys):
    path = ROOT / "proofs" / "corrupted" / "one_zero_broken_chain.ka"
    code, out, _ = cli(capsys, "ka-check", f"@{path}")
    lib = ka.check_proof(ka.parse_script(path.read_text()))
    assert code == 1 and json.loads(out) == lib.to_json()


def test_dot_is_stable(capsys):
    for argv in (["ccs-lts", "a!.b?.0 | a?.0 + tau.0", "--format", "dot"], ["prog-nfa", "(a;b)*+c", "--format", "dot"]):
        outs = {cli(capsys, *argv)[1] for _ in range(3)}
        assert len(outs) == 1


def test_file_arguments(tmp_path, capsys):
    (tmp_path / "p.ccs").write_text("tau.tau.0\n")
    (tmp_path / "k.json").write_text(json.dumps({"states": [0, 1], "props": {"1": {"p": True}}, "relations": {"a": [[0, 1]]}}))
    assert cli(capsys, "bisim", f"@{tmp_path / 'p.ccs'}", "tau.tau.0")[0] == 0
    code, out, _ = cli(capsys, "pdl-check", "<a>p", "--kripke", f"@{tmp_path / 'k.json'}", "--state", "0")
    assert code == 0 and json.loads(out) == {"satisfies": True}
    code, out, _ = cli(capsys, "pdl-valid", "<a>p", "--kripke", f"@{tmp_path / 'k.json'}")
    assert code == 1 and json.loads(out)["failing"] == ["1"]


def test_kripke_json_round_trips():
    data = {"states": [0, 1], "props": {"1": {"p": True}}, "relations": {"a": [[0, 1]]}}
    m = KripkeStructure.from_json(data)
    assert KripkeStructure.from_json(m.to_json()).to_json() == m.to_json()


def test_prog_eval(capsys):
    interp = json.dumps({"states": [0, 1, 2], "relations": {"a": [[0, 1]], "b": [[1, 2]]}})
    code, out, _ = cli(capsys, "prog-eval", "a;b + b*", "--interp", interp)
    assert code == 0
    assert json.loads(out) == {"relation": [[0, 0], [0, 2], [1, 1], [1, 2], [2, 2]]}


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["no-such-command"],
        ["bisim", "tau.0"],
        ["bisim", "tau.", "0"],
        ["hml-check", "0", "<tau"],
        ["prog-equiv", "a;", "a"],
        ["pdl-check", "p", "--kripke", "{not json", "--state", "0"],
        ["pdl-check", "q", "--kripke", '{"states":[0],"relations":{}}', "--state", "0"],
        ["pdl-check", "true", "--kripke", '{"states":[0],"relations":{}}', "--state", "9"],
        ["pdl-valid", "[([a]p)?]p", "--program", "a"],
        ["ka-check", "@/nonexistent/proof.ka"],
        ["correspond", "3"],
        ["ccs-lts", "a!.0 | a?.0", "--format", "svg"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, out, err = cli(capsys, *argv)
    assert code == 2
    assert err and not out


def test_parse_error_reports_offset(capsys):
    _, _, err = cli(capsys, "bisim", "a!.0 +", "0")
    assert "offset" in err


def test_state_budget(capsys, monkeypatch):
    code, _, err = cli(capsys, "ccs-lts", "a!.0 | b!.0 | c!.0", "--state-budget", "3")
    assert code == 2 and "more than 3 states" in err
    monkeypatch.setenv("EQLOGIC_STATE_BUDGET", "3")
    assert cli(capsys, "ccs-lts", "a!.0 | b!.0 | c!.0")[0] == 2


def test_correspond_corpus_text(capsys):
    code, out, _ = cli(capsys, "correspond", "3", "--corpus", "--count", "5", "--format", "text")
    assert code == 0
    assert out.splitlines()[-1].startswith("proposition 3: 5 instances")
