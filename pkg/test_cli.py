"""
Command line: output formats, exit codes and configuration errors
"""
import importlib
import json

import pytest

from minidafny.cli.main import build_parser, main
from minidafny.config import settings_loader
from minidafny.config.settings_loader import ENVIRONMENT
from minidafny.prover import Proved

verify_module = importlib.import_module("minidafny.cli.verify")


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch, tmp_path):
    """No ambient settings: fresh global loader, no MINIDAFNY_* variables, no .env in the cwd"""
    for variable in ENVIRONMENT:
        monkeypatch.delenv(variable, raising=False)
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(settings_loader, "_settings_loader", None)


def _corpus(corpus_dir, name):
    return str(corpus_dir / name)


@pytest.mark.parametrize("name, expected", [
    ("edinburgh_castle.mdfy", 0),
    ("fee_int_children.mdfy", 1),
    ("audio_guides_guessed_decreases.mdfy", 0),
    ("verify_adults_no_forall.mdfy", 1),
    ("child_present_unguarded.mdfy", 2),
    ("ghost_in_method.mdfy", 2),
    ("return_statement.mdfy", 2),
])
def test_exit_codes(corpus_dir, capsys, name, expected):
    assert main(["verify", "-q", _corpus(corpus_dir, name)]) == expected


def test_missing_file_is_a_static_error(capsys, tmp_path):
    assert main(["verify", "-q", str(tmp_path / "absent.mdfy")]) == 2
    assert "error[IO_ERROR]: cannot read file" in capsys.readouterr().out


def test_human_output(corpus_dir, capsys):
    path = _corpus(corpus_dir, "fee_int_children.mdfy")
    main(["verify", "-q", "--replay", path])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith(f"{path}:6:")
    assert lines[0].endswith("error[POSTCONDITION]: a postcondition might not hold on this return path")
    assert "note[COUNTEREXAMPLE]: " in lines[1]
    assert "numAdults = " in lines[1]
    assert lines[2].endswith("note[REPLAY]: confirmed")
    assert lines[-1] == "1 file(s): 0 proved, 1 failed, 0 unknown, 0 error(s)"


def test_syntax_error_output(corpus_dir, capsys):
    path = _corpus(corpus_dir, "return_statement.mdfy")
    main(["verify", "-q", path])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == (f"{path}:3:2: error[SYNTAX_ERROR]: "
                        "'return' is not supported; assign the out-parameters instead")
    assert lines[-1].startswith("1 file(s): 0 proved, 0 failed, 0 unknown, ")


def test_json_report_is_deterministic(corpus_dir, capsys):
    args = ["verify", "-q", "--json", "--replay",
            _corpus(corpus_dir, "edinburgh_castle.mdfy"), _corpus(corpus_dir, "fee_int_children.mdfy")]
    main(args)
    first = capsys.readouterr().out
    main(args)
    second = capsys.readouterr().out
    assert first == second
    report = json.loads(first)
    assert report["version"] == 1
    assert [len(f["methods"]) for f in report["files"]] == [6, 1]
    assert report["summary"]["failed"] == 1
    failed = report["files"][1]["methods"][0]["vcs"][0]
    assert failed["kind"] == "Postcondition"
    assert failed["verdict"] == "counterexample"
    assert failed["replay"]["outcome"] == "confirmed"


def test_json_mode_sends_dumps_to_stderr(corpus_dir, capsys):
    main(["verify", "-q", "--json", "--emit-vc", _corpus(corpus_dir, "fee_int_children.mdfy")])
    captured = capsys.readouterr()
    json.loads(captured.out)
    assert captured.err.startswith("vc 0 FeeCalculator.CalculateEdiCastleVisitFee Postcondition")


def test_emit_smt_writes_files(corpus_dir, capsys, tmp_path):
    out = tmp_path / "smt"
    main(["verify", "-q", "--emit-smt", str(out), _corpus(corpus_dir, "fee_int_children.mdfy")])
    written = sorted(p.name for p in out.iterdir())
    assert written == ["FeeCalculator.CalculateEdiCastleVisitFee.0.smt2"]
    assert "(check-sat)" in (out / written[0]).read_text()


@pytest.mark.parametrize("extra", [
    ["--timeout", "0"],
    ["--fuel", "-1"],
    ["--backend", "smtlib"],
    ["--settings", "missing-settings.json"],
])
def test_configuration_errors(corpus_dir, capsys, extra):
    assert main(["verify", "-q", *extra, _corpus(corpus_dir, "edinburgh_castle.mdfy")]) == 2


def _fake_solver(tmp_path, output: str) -> str:
    script = tmp_path / "solver.sh"
    script.write_text(f"#!/bin/sh\ncat <<'EOF'\n{output}\nEOF\n")
    return f"sh {script}"


@pytest.fixture
def solver_timeouts(monkeypatch):
    """Timeouts handed to the external solver driver; every condition answers unsat"""
    seen = []

    def record(vc, solver_command, timeout_ms, emit_dir):
        seen.append(timeout_ms)
        return Proved()

    monkeypatch.setattr(verify_module, "run_external", record)
    return seen


@pytest.mark.parametrize("extra, expected", [
    ([], 30000),
    (["--timeout", "500"], 500),
])
def test_external_solver_timeout(corpus_dir, capsys, solver_timeouts, extra, expected):
    args = ["verify", "-q", "--backend", "smtlib", "--solver-cmd", "z3", *extra]
    assert main(args + [_corpus(corpus_dir, "fee_int_children.mdfy")]) == 0
    assert solver_timeouts and set(solver_timeouts) == {expected}


def test_external_timeout_from_environment(corpus_dir, capsys, monkeypatch, solver_timeouts):
    monkeypatch.setenv("MINIDAFNY_TIMEOUT_MS", "1200")
    main(["verify", "-q", "--backend", "smtlib", "--solver-cmd", "z3", _corpus(corpus_dir, "fee_int_children.mdfy")])
    assert set(solver_timeouts) == {1200}


def test_unparseable_external_model_shows_no_values(corpus_dir, capsys, tmp_path):
    solver = _fake_solver(tmp_path, "sat\ngarbage(((")
    assert main(["verify", "-q", "--backend", "smtlib", "--solver-cmd", solver,
                 _corpus(corpus_dir, "fee_int_children.mdfy")]) == 1
    out = capsys.readouterr().out
    assert "note[COUNTEREXAMPLE]: (no variables)" in out
    assert "numAdults = " not in out


def test_parser_rejects_unknown_backend():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "--backend", "z3", "a.mdfy"])


def test_corpus_command(corpus_dir, capsys):
    assert main(["corpus", "-q", _corpus(corpus_dir, "manifest.csv")]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "corpus: 13/13 entries match"
