"""
Name resolution, typing, ghost usage and frame checks
"""
import pytest

from minidafny.diagnostics import DiagnosticError, Severity
from minidafny.frontend import ast, parse_source
from minidafny.typecheck import check_frames, check_ghost_usage, resolve_and_check
from minidafny.typecheck.types import BOOL, INT, NAT, needs_nat_check


def _locals(tp, name):
    return {s.name: s.type for s in tp.decls[name].symbols}


def test_castle_types(typed, castle_source):
    tp = typed(castle_source)
    family = _locals(tp, "EdinburghCastleVisitorCenter.FamilyTicketVerification")
    assert family["numAdults"] == NAT
    assert family["numChildren"] == NAT
    assert family["totalFee"] == INT
    assert family["familyTicketWeekday"] == INT
    guides = _locals(tp, "EdinburghCastleVisitorCenter.AssignAudioGuides")
    assert guides["numAssignedGuides"] == NAT


def test_call_assignment_becomes_multi_assign(typed, castle_source):
    tp = typed(castle_source)
    body = tp.decls["EdinburghCastleVisitorCenter.FamilyTicketVerification"].decl.body
    calls = [s for s in body.stmts if isinstance(s, ast.MultiAssignCall)]
    assert [c.method for c in calls] == ["CalculateEdiCastleVisitFee"]
    assert calls[0].lhs == ["totalFee"]
    declared = body.stmts[body.stmts.index(calls[0]) - 1]
    assert isinstance(declared, ast.VarDecl) and declared.name == "totalFee"


def test_input_program_is_not_modified(castle_source):
    program = parse_source(castle_source)
    resolve_and_check(program)
    body = program.declarations()[2].body
    assert not any(isinstance(s, ast.MultiAssignCall) for s in body.stmts)


def test_inferred_type_of_non_literal_is_int(typed):
    tp = typed("method M(n: nat) { var k := n + 1; var j := 3; }")
    found = _locals(tp, "M")
    assert found["k"] == INT
    assert found["j"] == NAT


def test_needs_nat_check():
    assert needs_nat_check(INT, NAT)
    assert not needs_nat_check(NAT, NAT)
    assert not needs_nat_check(NAT, INT)
    assert not needs_nat_check(BOOL, BOOL)


@pytest.mark.parametrize("source, code", [
    ("method M() { x := 1; }", "UNKNOWN_IDENTIFIER"),
    ("method M(a: int) { a := 1; }", "ASSIGN_TO_INPUT"),
    ("method M(b: bool) { var x: int := b; }", "TYPE_MISMATCH"),
    ("method M() { var a := 1; var a := 2; }", "DUPLICATE_NAME"),
    ("method M(a: int) { var x := a[0]; }", "NOT_AN_ARRAY"),
    ("function F(x: int): int { x }\nmethod M() { var y := F(1, 2); }", "ARITY_MISMATCH"),
    ("method N() returns (r: int) { r := 1; }\nmethod M() { var y := N() + 1; }", "METHOD_IN_EXPRESSION"),
    ("method M(s: seq) { }", "UNSUPPORTED"),
    ("method M(s: money) { }", "UNKNOWN_IDENTIFIER"),
    ("method M() { assert 1; }", "TYPE_MISMATCH"),
    ("method M() { var n := null; }", "TYPE_MISMATCH"),
])
def test_static_errors(source, code):
    with pytest.raises(DiagnosticError) as caught:
        resolve_and_check(parse_source(source, "bad.mdfy"))
    assert code in [d.code for d in caught.value.diagnostics]


def test_reads_on_method_is_a_warning(typed):
    tp = typed("method M(a: array<int>) reads a { }")
    assert [(w.code, w.severity) for w in tp.warnings] == [("READS_ON_METHOD", Severity.WARNING)]


def test_plain_function_in_compiled_code(typed, corpus_dir):
    tp = typed((corpus_dir / "ghost_in_method.mdfy").read_text())
    found = check_ghost_usage(tp)
    assert [d.code for d in found] == ["GHOST_IN_COMPILED"]
    assert "declare it as 'function method'" in found[0].message


def test_plain_function_allowed_in_specifications(typed):
    source = """
    predicate Adult(age: int) { age >= 18 }
    method Admit(age: int) returns (ok: bool)
      requires Adult(age)
      ensures ok
    {
      assert Adult(age);
      ok := true;
    }
    """
    assert check_ghost_usage(typed(source)) == []


def test_ghost_variable_only_in_ghost_assignments(typed):
    source = """
    method M(n: int) returns (r: int) {
      ghost var g := n;
      ghost var h := g + 1;
      r := g;
    }
    """
    found = check_ghost_usage(typed(source))
    assert [d.code for d in found] == ["GHOST_IN_COMPILED"]
    assert found[0].message == "ghost variable 'g' can only be used in specifications or ghost assignments"


def test_published_child_present_frames(typed, castle_source):
    assert check_frames(typed(castle_source)) == []


def test_missing_reads_clause(typed, corpus_dir):
    found = check_frames(typed((corpus_dir / "child_present_no_reads.mdfy").read_text()))
    assert {d.code for d in found} == {"READS_VIOLATION"}
    assert all(d.message == "insufficient reads clause to read array element" for d in found)


def test_modifies_clause(typed):
    source = """
    method Clear(a: array<int>)
      requires a != null && a.Length > 0
    {
      a[0] := 0;
    }
    method ClearDeclared(a: array<int>)
      requires a != null && a.Length > 0
      modifies a
    {
      a[0] := 0;
    }
    method Caller(b: array<int>)
      requires b != null && b.Length > 0
    {
      ClearDeclared(b);
    }
    """
    found = check_frames(typed(source))
    assert [d.code for d in found] == ["MODIFIES_VIOLATION", "CALL_FRAME_VIOLATION"]
