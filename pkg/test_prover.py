"""
Ground decision procedure, quantifier instantiation, SMT-LIB output and the
external solver driver
"""
import pytest

from minidafny import formula as F
from minidafny.diagnostics import ExternalSolverError, Span
from minidafny.ir import ObligationKind
from minidafny.ir.commands import SymbolInfo
from minidafny.prover import (
    GroundClauseSet, Incomplete, Model, ProverOptions, Sat, Unknown, Unsat, decide_ground, emit_smtlib,
    encode_ground, holds, instantiate_quantifiers, integer_model, minimize_model, parse_model,
    prove, run_external,
)
from minidafny.prover.instantiate import Instantiator
from minidafny.prover.smtlib import smt_symbol
from minidafny.vcgen.wp import VerificationCondition

x, y, c = F.mk_var("x"), F.mk_var("y"), F.mk_var("c")
SPAN = Span("t.mdfy", 1, 1, 1, 5)


def _vc(formula, symbols=None):
    blank = VerificationCondition(0, "M", ObligationKind.ASSERT_STMT, formula, SPAN, "assertion might not hold")
    return blank.refresh(formula, symbols or {})


def _fee_violation():
    return F.and_(F.ge(x, F.ONE), F.le(y, F.mk_int(-1)),
                  F.le(F.add(F.mul(F.mk_int(10), x), F.mul(F.mk_int(6), y)), F.ZERO))


def test_decide_ground_finds_a_model():
    formula = _fee_violation()
    result = decide_ground(encode_ground(formula))
    assert isinstance(result, Sat)
    assert holds(formula, result.model) is True


@pytest.mark.parametrize("formula", [
    F.and_(F.lt(x, y), F.lt(y, x)),
    F.eq(F.mul(F.mk_int(3), x), F.mk_int(2)),
    F.and_(F.le(F.mk_int(1), F.sub(x, y)), F.le(F.sub(x, y), F.ZERO)),
    F.and_(F.or_(F.lt(x, F.ZERO), F.lt(F.mk_int(5), x)), F.le(F.ZERO, x), F.le(x, F.mk_int(5))),
])
def test_decide_ground_refutes(formula):
    assert isinstance(decide_ground(encode_ground(formula)), Unsat)


def test_encode_ground_shares_atoms():
    clauses = encode_ground(F.and_(F.le(x, y), F.or_(F.le(x, y), F.lt(y, c))))
    assert isinstance(clauses, GroundClauseSet)
    assert len(clauses.atoms) == 2


def test_prove_valid_universal():
    body = F.implies(F.ge(x, F.ZERO), F.lt(F.ZERO, F.add(x, F.ONE)))
    assert prove(_vc(F.forall("x", body))).proved


def test_prove_reports_minimized_counterexample():
    goal = F.not_(_fee_violation())
    verdict = prove(_vc(goal))
    assert verdict.label == "counterexample"
    assert holds(_fee_violation(), verdict.model) is True


def test_prove_with_literal_division():
    goal = F.le(F.mul(F.div(x, F.mk_int(2)), F.mk_int(2)), x)
    assert prove(_vc(goal)).proved


@pytest.mark.parametrize("goal", [
    F.le(F.ZERO, F.mul(x, y)),
    F.le(F.div(x, y), x),
])
def test_outside_linear_arithmetic_is_unknown(goal):
    verdict = prove(_vc(goal))
    assert verdict.label == "unknown"
    assert verdict.reason == "unsupported-fragment"


def test_nat_symbols_carry_their_typing_fact():
    goal = F.le(F.ZERO, x)
    assert not prove(_vc(goal)).proved
    assert prove(_vc(goal, {"x": SymbolInfo(F.INT, nat=True)})).proved


def test_instantiation_limit():
    universal = F.forall("k", F.le(F.ZERO, F.app("G", (F.mk_var("k"),), F.INT)))
    goal = F.and_(*(F.le(F.app("G", (F.mk_var(f"v{i}"),), F.INT), F.mk_int(-1)) for i in range(5)))
    verdict = prove(_vc(F.implies(universal, F.not_(goal))), ProverOptions(instantiation_cap=2))
    assert (verdict.label, verdict.reason) == ("unknown", "instantiation-limit")


def test_instantiation_cap_counts_every_expansion():
    universal = F.forall("k", F.le(F.ZERO, F.app("G", (F.mk_var("k"),), F.INT)))
    formula = F.and_(universal, F.lt(F.app("G", (c,), F.INT), F.ZERO))
    unbounded = Instantiator(formula, rounds=1)
    unbounded.expand()
    once = unbounded.count
    assert once >= 1
    unbounded.expand()
    assert unbounded.count == 2 * once
    capped = Instantiator(formula, rounds=1, cap=2 * once - 1)
    capped.expand()
    with pytest.raises(Incomplete):
        capped.expand()


def test_instantiate_quantifiers_at_ground_terms():
    g = F.app("G", (F.mk_var("k"),), F.INT)
    hypothesis = F.forall("k", F.le(F.ZERO, g))
    goal_neg = F.lt(F.app("G", (c,), F.INT), F.ZERO)
    clauses = instantiate_quantifiers([hypothesis], goal_neg)
    assert isinstance(clauses, GroundClauseSet)
    assert isinstance(decide_ground(clauses), Unsat)


def test_instantiate_quantifiers_rejects_nested_existential():
    inner = F.forall("k", F.exists("j", F.lt(F.mk_var("k"), F.mk_var("j"))))
    verdict = instantiate_quantifiers([inner], F.TRUE)
    assert verdict.label == "unknown"
    assert verdict.reason == "unsupported-fragment"


def test_minimize_model_halves_toward_zero():
    model = minimize_model(_fee_violation(), Model(scalars={"x": 40, "y": -100}))
    assert model.scalars == {"x": 1, "y": -3}


@pytest.mark.parametrize("sign", [1, -1])
def test_minimize_model_halves_large_values_exactly(sign):
    bound = sign * (2 ** 60 + 3)
    target = F.le(F.mk_int(bound), x) if sign > 0 else F.le(x, F.mk_int(bound))
    model = minimize_model(target, Model(scalars={"x": sign * (2 ** 61 + 7)}))
    assert model.scalars == {"x": bound}


def test_integer_model():
    model = integer_model([({"x": 2}, 4)], [({"x": 1, "y": -1}, 0)])
    assert model["x"] == 2
    assert model["x"] - model["y"] <= 0
    assert integer_model([({"x": 2}, 3)], []) is None


def test_holds_leaves_unbounded_quantifier_open():
    assert holds(F.forall("k", F.le(F.mk_var("k"), x)), Model()) is None


def test_unknown_reason_must_be_known():
    with pytest.raises(ValueError):
        Unknown("gave-up")


def test_emit_smtlib():
    vc = _vc(F.lt(x, F.add(x, F.ONE)), {"x": SymbolInfo(F.INT, nat=True)})
    assert emit_smtlib(vc).splitlines() == [
        "; M vc 0: AssertStmt at 1:1",
        "(set-option :produce-models true)",
        "(set-logic AUFLIA)",
        "(declare-const x Int)",
        "(assert (<= 0 x))",
        "(assert (not (< x (+ x 1))))",
        "(check-sat)",
        "(get-model)",
    ]


def test_emit_smtlib_declares_arrays_and_functions():
    a = F.mk_var("a", F.INT)
    heap = F.mk_var(F.HEAP_VAR, F.HEAP)
    goal = F.le(F.app("F", (F.select(heap, a, F.ZERO),), F.INT), F.length(a))
    text = emit_smtlib(_vc(goal, {"a": SymbolInfo(F.INT, array_elem=F.INT)}))
    assert "(declare-const $heap (Array Int (Array Int Int)))" in text
    assert "(declare-const $len (Array Int Int))" in text
    assert "(declare-fun F (Int) Int)" in text


def test_emit_smtlib_nonlinear_logic():
    assert "(set-logic ALL)" in emit_smtlib(_vc(F.le(F.ZERO, F.mul(x, y))))


def test_smt_symbol_quoting():
    assert smt_symbol("numAdults") == "numAdults"
    assert smt_symbol("i$loop1") == "i$loop1"
    assert smt_symbol("and") == "|and|"
    assert smt_symbol("k#1") == "|k#1|"


def test_parse_model():
    output = (
        "sat\n(\n"
        "  (define-fun numAdults () Int\n    1)\n"
        "  (define-fun numChildren () Int\n    (- 2))\n"
        "  (define-fun |i#1| () Int 7)\n"
        "  (define-fun flag () Bool true)\n"
        ")\n"
    )
    model = parse_model(output)
    assert model.scalars == {"numAdults": 1, "numChildren": -2, "i#1": 7, "flag": True}
    assert parse_model("unsat\n") is None


def _fake_solver(tmp_path, output: str, status: int = 0) -> str:
    script = tmp_path / "solver.sh"
    script.write_text(f"#!/bin/sh\ncat <<'EOF'\n{output}\nEOF\nexit {status}\n")
    return f"sh {script}"


def test_run_external_unsat_is_proved(tmp_path):
    verdict = run_external(_vc(F.le(x, F.add(x, F.ONE))), _fake_solver(tmp_path, "unsat"))
    assert verdict.proved


def test_run_external_sat_gives_model(tmp_path):
    solver = _fake_solver(tmp_path, "sat\n(model (define-fun x () Int (- 4)))")
    verdict = run_external(_vc(F.le(F.ZERO, x)), solver, emit_dir=tmp_path / "smt")
    assert verdict.label == "counterexample"
    assert verdict.model.scalars == {"x": -4}
    assert (tmp_path / "smt" / "M.0.smt2").exists()


def test_run_external_shows_only_assigned_symbols(tmp_path):
    symbols = {"x": SymbolInfo(F.INT), "y": SymbolInfo(F.INT)}
    solver = _fake_solver(tmp_path, "sat\n(model (define-fun x () Int 3))")
    verdict = run_external(_vc(F.le(y, x), symbols), solver)
    assert verdict.model.to_dict(symbols) == {"x": 3}


def test_run_external_unparseable_model_is_empty(tmp_path):
    symbols = {"x": SymbolInfo(F.INT), "b": SymbolInfo(F.BOOL)}
    verdict = run_external(_vc(F.le(F.ZERO, x), symbols), _fake_solver(tmp_path, "sat\ngarbage((("))
    assert verdict.label == "counterexample"
    assert verdict.model.scalars == {}
    assert verdict.model.to_dict(symbols) == {}


def test_builtin_model_reports_every_symbol():
    symbols = {"x": SymbolInfo(F.INT), "y": SymbolInfo(F.INT)}
    assert Model(scalars={"x": 2}).to_dict(symbols) == {"x": 2, "y": 0}


def test_run_external_unknown(tmp_path):
    verdict = run_external(_vc(F.le(F.ZERO, x)), _fake_solver(tmp_path, "unknown"))
    assert (verdict.label, verdict.reason) == ("unknown", "external-solver-unknown")


def test_run_external_without_answer(tmp_path):
    with pytest.raises(ExternalSolverError):
        run_external(_vc(F.le(F.ZERO, x)), _fake_solver(tmp_path, "", status=1))


def test_run_external_missing_binary():
    with pytest.raises(ExternalSolverError):
        run_external(_vc(F.le(F.ZERO, x)), "definitely-not-a-solver-binary")
