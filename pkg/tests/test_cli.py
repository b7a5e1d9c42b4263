import json
import subprocess
import sys
from pathlib import Path

import pytest

from mcsp.cli import main

CORPUS = Path(__file__).parent / "corpus" / "golden"


def run_cli(args, stdin=""):
    proc = subprocess.run(
        [sys.executable, "-m", "mcsp.cli", *args],
        capture_output=True, text=True, input=stdin, timeout=120,
    )
    return proc


@pytest.fixture
def pair_file(tmp_path):
    f = tmp_path / "pair.csp"
    f.write_text(
        "PE : {u} + {w} = (a -> SKIP u) [] (b -> SKIP w)\n"
        "PI : {u} + {w} = (a -> SKIP u) |~| (b -> SKIP w)\n"
    )
    return str(f)


@pytest.fixture
def div_file(tmp_path):
    f = tmp_path / "div.csp"
    f.write_text("X : Empty = X |~| X\nIDLE : Empty = STOP\n")
    return str(f)


def test_check_ok(capsys):
    assert main(["check", str(CORPUS / "pair_both.csp")]) == 0


def test_check_unguarded(tmp_path, capsys):
    f = tmp_path / "bad.csp"
    f.write_text("X : Unit = X\n")
    assert main(["check", str(f)]) == 1
    err = capsys.readouterr().err
    assert "unguarded" in err


def test_check_type_error(tmp_path, capsys):
    f = tmp_path / "bad.csp"
    f.write_text("P : {u} = SKIP w\n")
    assert main(["check", str(f)]) == 1
    assert "type-mismatch" in capsys.readouterr().err


def test_traces_stop(tmp_path, capsys):
    f = tmp_path / "stop.csp"
    f.write_text("P : Unit = STOP\n")
    assert main(["traces", str(f), "P", "--depth", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["traces"] == [{"labels": [], "outcome": None}]


def test_traces_two_terminated_style(tmp_path, capsys):
    f = tmp_path / "t.csp"
    f.write_text("P : {u} + {w} = SKIP u [] SKIP w\n")
    assert main(["traces", str(f), "P", "--depth", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["traces"] == [
        {"labels": [], "outcome": None},
        {"labels": [], "outcome": "inl u"},
        {"labels": [], "outcome": "inr w"},
    ]


def test_traces_match_library_byte_for_byte(pair_file, capsys):
    from mcsp.lang import parse, elaborate
    from mcsp.traces import sorted_traces, trace_set
    assert main(["traces", pair_file, "PE", "--depth", "4"]) == 0
    out = capsys.readouterr().out
    env = parse(Path(pair_file).read_text())
    p = elaborate(env, "PE")
    expected = json.dumps({
        "process": "PE",
        "depth": 4,
        "traces": [t.to_json() for t in
                   sorted_traces(trace_set(p, 4), p.ret_choice)],
    }, indent=2, ensure_ascii=False) + "\n"
    assert out == expected


def test_failures_of_internal_choice(pair_file, capsys):
    assert main(["failures", pair_file, "PI", "--depth", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    at_empty = [f for f in payload["failures"] if f["labels"] == []]
    assert {tuple(f["initials"]) for f in at_empty} == {("a",), ("b",)}
    assert payload["partial"] is False


def test_divergences_definitive(div_file, capsys):
    assert main(["divergences", div_file, "X", "--depth", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["divergences"] == [{"labels": [], "mode": "definitive"}]


def test_divergences_empty_for_stop(div_file, capsys):
    assert main(["divergences", div_file, "IDLE", "--depth", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["divergences"] == []


def test_refine_reflexive_exit_zero(pair_file, capsys):
    assert main(["refine", pair_file, "PE", "PE", "--model", "sf"]) == 0


def test_refine_traces_both_directions_hold(pair_file, capsys):
    assert main(["refine", pair_file, "PE", "PI", "--model", "traces",
                 "--depth", "3"]) == 0
    capsys.readouterr()
    assert main(["refine", pair_file, "PI", "PE", "--model", "traces",
                 "--depth", "3"]) == 0


def test_refine_sf_fails_one_direction(pair_file, capsys):
    assert main(["refine", pair_file, "PI", "PE", "--model", "sf",
                 "--depth", "3"]) == 0
    capsys.readouterr()
    assert main(["refine", pair_file, "PE", "PI", "--model", "sf",
                 "--depth", "3"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"]["holds"] is False
    assert payload["verdict"]["failedComponent"] == "failures"
    witness = payload["verdict"]["components"]["failures"]["witness"]
    assert witness["labels"] == []
    assert witness["initials"] in (["a"], ["b"])


def test_laws_small_run(capsys):
    code = main(["laws", "--comm", "5", "--refl", "3", "--chains", "2",
                 "--equiv", "3", "--closure", "5", "--addtick", "5",
                 "--oracle", "5", "--sf", "2", "--json"])
    assert code == 0
    reports = json.loads(capsys.readouterr().out)
    assert all(r["passed"] for r in reports)
    assert {r["law"] for r in reports} >= {
        "ext-choice-commutativity", "fdi-partial-order", "prefix-closure",
        "addtick-trace-effect",
    }


def test_unknown_name_exits_one(pair_file, capsys):
    assert main(["traces", pair_file, "NOPE"]) == 1


def test_check_json_output(tmp_path, capsys):
    f = tmp_path / "bad.csp"
    f.write_text("P : {u} = SKIP w\n")
    assert main(["check", str(f), "--json"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False
    assert payload["diagnostics"][0]["kind"] == "type-mismatch"


def test_refine_mismatched_choices_is_a_clean_error(tmp_path, capsys):
    f = tmp_path / "mixed.csp"
    f.write_text("P : {u} = STOP\nQ : Bool = STOP\n")
    assert main(["refine", str(f), "P", "Q"]) == 1
    assert "shared return choice" in capsys.readouterr().err


def test_simulate_scripted_session():
    # step a, step b, tick, inspect trace, quit — driven over a subprocess
    proc = run_cli(
        ["simulate", str(CORPUS / "prefix_chain.csp"), "P"],
        stdin="0\n0\ntrace\n0\nrefusals\nquit\n",
    )
    assert proc.returncode == 0
    assert "event a" in proc.stdout
    assert "event b" in proc.stdout
    assert "trace: ['a', 'b']" in proc.stdout
    assert "terminated with tt" in proc.stdout


def test_simulate_undo():
    proc = run_cli(
        ["simulate", str(CORPUS / "prefix_chain.csp"), "P"],
        stdin="0\nundo\ntrace\nquit\n",
    )
    assert proc.returncode == 0
    assert "trace: []" in proc.stdout


def test_simulate_refusals_at_stable_state():
    proc = run_cli(
        ["simulate", str(CORPUS / "pair_both.csp"), "PE"],
        stdin="refusals\nquit\n",
    )
    assert "initials ['a', 'b']" in proc.stdout


def test_simulate_invalid_selection_reprompts():
    proc = run_cli(
        ["simulate", str(CORPUS / "prefix_chain.csp"), "P"],
        stdin="9\n0\nquit\n",
    )
    assert proc.returncode == 0
    assert "no such choice" in proc.stdout


def test_cli_json_outputs_are_stable(pair_file):
    one = run_cli(["traces", pair_file, "PE", "--depth", "4"])
    two = run_cli(["traces", pair_file, "PE", "--depth", "4"])
    assert one.stdout == two.stdout
    assert one.returncode == 0
