"""
Counterexample replay against the concrete interpreter
"""
import pytest

from minidafny.ir import ObligationKind
from minidafny.prover import Model, prove
from minidafny.replay import Confirmed, NotReproduced, replay

FEE = "FeeCalculator.CalculateEdiCastleVisitFee"


def _first(vcs, kind):
    found = [vc for vc in vcs if vc.kind is kind]
    return min(found, key=lambda vc: (vc.span.start_line, vc.span.start_col))


def test_negative_children_fee_is_confirmed(conditions, corpus_dir):
    tp, decl, graph, vcs = conditions((corpus_dir / "fee_int_children.mdfy").read_text(), FEE)
    vc = _first(vcs, ObligationKind.POSTCONDITION)
    verdict = prove(vc)
    assert verdict.label == "counterexample"
    adults = verdict.model.scalars["numAdults"]
    children = verdict.model.scalars["numChildren"]
    assert adults >= 1
    assert 10 * adults + 6 * children <= 0
    outcome = replay(decl, verdict.model, vc, tp, graph)
    assert outcome == Confirmed(ObligationKind.POSTCONDITION, vc.span)
    assert outcome.to_dict()["outcome"] == "confirmed"


def test_unsatisfiable_postcondition_is_confirmed(conditions):
    tp, decl, graph, vcs = conditions("method M(n: int) returns (r: int) ensures false { r := n; }", "M")
    vc = _first(vcs, ObligationKind.POSTCONDITION)
    verdict = prove(vc)
    assert verdict.label == "counterexample"
    assert replay(decl, verdict.model, vc, tp, graph).confirmed


def test_empty_model_is_incomplete(conditions, corpus_dir):
    tp, decl, graph, vcs = conditions((corpus_dir / "fee_int_children.mdfy").read_text(), FEE)
    vc = _first(vcs, ObligationKind.POSTCONDITION)
    assert replay(decl, Model(), vc, tp, graph) == NotReproduced("incomplete model")


def test_passing_state_is_not_reproduced(conditions, corpus_dir):
    tp, decl, graph, vcs = conditions((corpus_dir / "fee_int_children.mdfy").read_text(), FEE)
    vc = _first(vcs, ObligationKind.POSTCONDITION)
    model = Model(scalars={"numAdults": 1, "numChildren": 0})
    outcome = replay(decl, model, vc, tp, graph)
    assert outcome == NotReproduced("execution finished without a failure")
    assert outcome.to_dict() == {"outcome": "not-reproduced", "detail": "execution finished without a failure"}


def test_state_outside_precondition_is_not_reproduced(conditions, corpus_dir):
    tp, decl, graph, vcs = conditions((corpus_dir / "fee_int_children.mdfy").read_text(), FEE)
    vc = _first(vcs, ObligationKind.POSTCONDITION)
    model = Model(scalars={"numAdults": 0, "numChildren": -5})
    assert replay(decl, model, vc, tp, graph) == NotReproduced("precondition does not hold in the model")


def test_null_array_is_confirmed(conditions, corpus_dir):
    source = (corpus_dir / "child_present_no_requires.mdfy").read_text()
    tp, decl, graph, vcs = conditions(source, "ChildPresent")
    vc = _first(vcs, ObligationKind.NULL_DEREF)
    verdict = prove(vc)
    assert verdict.label == "counterexample"
    assert verdict.model.scalars.get("visitorsAges", 0) == 0
    assert replay(decl, verdict.model, vc, tp, graph) == Confirmed(ObligationKind.NULL_DEREF, vc.span)


def test_loop_state_from_model_is_confirmed(conditions, corpus_dir):
    source = (corpus_dir / "audio_guides_no_invariant.mdfy").read_text()
    tp, decl, graph, vcs = conditions(source, "AssignAudioGuides")
    vc = _first(vcs, ObligationKind.ASSERT_STMT)
    verdict = prove(vc)
    assert verdict.label == "counterexample"
    assert replay(decl, verdict.model, vc, tp, graph).confirmed


def test_replay_outcome_in_report(verify_text, corpus_dir):
    report = verify_text((corpus_dir / "fee_int_children.mdfy").read_text(), "fee_int_children.mdfy")
    failed = [result for result in report.results if not result.proved]
    assert [result.kind for result in failed] == [ObligationKind.POSTCONDITION]
    assert failed[0].replay["outcome"] == "confirmed"
    assert failed[0].counterexample["numAdults"] >= 1


@pytest.mark.parametrize("body, holds", [
    ("var x := 7; var y := x / 2; assert y == 3;", True),
    ("var x := 7; assert x % 3 == 1;", True),
    ("var x := -7; assert x / 2 == -4;", True),
    ("var x := -7; assert x % 2 == 1;", True),
    ("var x := 7; assert x / 2 * 2 == x;", False),
    ("var x := 5; var y: int := 0; if (x > 3) { y := x * 2; } else { y := x; } assert y == 10;", True),
    ("var x := 5; var y: int := 0; if (x > 3) { y := x * 2; } else { y := x; } assert y == 5;", False),
    ("var a := 3; var b := a * a - 2 * a; assert b == 4;", False),
    ("var t := true; var u := !t || 1 < 2; assert u && t;", True),
    ("var x := 10; assert 0 <= x - 10 < 1;", True),
    ("var x := 10; assert x - 11 >= 0;", False),
    ("var z := 0; var q := 5 / z;", False),
])
def test_prover_and_interpreter_agree_on_ground_programs(conditions, body, holds):
    tp, decl, graph, vcs = conditions(f"method M() {{ {body} }}", "M")
    assert vcs
    for vc in vcs:
        verdict = prove(vc)
        model = verdict.model if verdict.model is not None else Model()
        outcome = replay(decl, model, vc, tp, graph)
        assert verdict.proved != outcome.confirmed, vc.kind
    assert all(prove(vc).proved for vc in vcs) == holds
