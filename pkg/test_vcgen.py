"""
Weakest preconditions, function inlining and termination conditions
"""
import pytest

from minidafny import formula as F
from minidafny.diagnostics import DiagnosticError, Span
from minidafny.ir import Assert, AssignVar, Assume, Havoc, HeapStore, ObligationKind, lower_method
from minidafny.prover import prove
from minidafny.vcgen import (
    build_callgraph, build_function_table, check_function_termination, compute_wp, format_vc,
    inline_functions,
)
from minidafny.vcgen.wp import wp_command, wp_commands

FAMILY = "EdinburghCastleVisitorCenter.FamilyTicketVerification"

RECURSIVE = """
function Sum(n: nat): nat
  decreases n
{
  if n == 0 then 0 else n + Sum(n - 1)
}

predicate Even(n: nat)
  decreases n
{
  if n == 0 then true else Odd(n - 1)
}

predicate Odd(n: nat)
  decreases n
{
  if n == 0 then false else Even(n - 1)
}

function Spin(n: int): int
{
  Spin(n)
}

function method Twice(n: int): int { n + n }
"""


def _asserts(vcs):
    return [vc for vc in vcs if vc.kind is ObligationKind.ASSERT_STMT]


def test_postcondition_through_assignment(conditions):
    _, _, _, vcs = conditions("method Inc(x: int) returns (y: int) ensures y > x { y := x + 1; }", "Inc")
    assert [vc.kind for vc in vcs] == [ObligationKind.POSTCONDITION]
    assert prove(vcs[0]).proved


def test_compute_wp_one_condition_per_assert(typed):
    tp = typed("method M(a: int) { assert a == a; assert a + 1 > a; assert a > 0; }")
    vcs = compute_wp(lower_method(tp.decls["M"].decl, tp))
    assert [vc.id for vc in vcs] == [0, 1, 2]
    assert [prove(vc).proved for vc in vcs] == [True, True, False]


def test_earlier_asserts_are_assumed(conditions):
    _, _, _, vcs = conditions("method M(a: int) { assert a > 5; assert a > 3; }", "M")
    assert [prove(vc).proved for vc in vcs] == [False, True]


def test_wp_of_assignment_substitutes_the_right_hand_side():
    x, c = F.mk_var("x"), F.mk_var("c")
    post = F.eq(x, F.add(c, F.ONE))
    assert wp_command(AssignVar("x", F.add(x, F.ONE)), post) is F.eq(F.add(x, F.ONE), F.add(c, F.ONE))
    twice = [AssignVar("x", F.add(x, F.ONE)), AssignVar("x", F.mul(F.mk_int(2), x))]
    assert wp_commands(twice, F.eq(x, c)) is F.eq(F.mul(F.mk_int(2), F.add(x, F.ONE)), c)


def test_wp_of_assume_assert_and_havoc():
    x, c = F.mk_var("x"), F.mk_var("c")
    post = F.eq(x, c)
    guard = F.le(F.ZERO, x)
    assert wp_command(Assume(guard), post) is F.implies(guard, post)
    checked = Assert(guard, ObligationKind.ASSERT_STMT, Span("t.mdfy", 1, 1, 1, 5))
    assert wp_command(checked, post) is F.implies(guard, post)
    havoc = Havoc([("x", "x$loop1", F.INT), ("$heap$loop1", "$heap$loop1", F.HEAP)])
    assert wp_command(havoc, post) is F.eq(F.mk_var("x$loop1"), c)
    heap_only = Havoc([("$heap$loop1", "$heap$loop1", F.HEAP)])
    assert wp_command(heap_only, post) is post


def test_wp_of_array_store_updates_the_heap():
    a, i = F.mk_var("a"), F.mk_var("i")
    heap = F.mk_var(F.HEAP_VAR, F.HEAP)
    post = F.eq(F.select(heap, a, i), F.ONE)
    stored = F.store(heap, a, i, F.ONE)
    assert wp_command(HeapStore(F.HEAP_VAR, a, i, F.ONE), post) is F.eq(F.select(stored, a, i), F.ONE)


def test_caller_sees_only_the_contract(conditions, castle_source, corpus_dir):
    _, _, _, vcs = conditions(castle_source, FAMILY)
    assert all(prove(vc).proved for vc in vcs)
    exact = (corpus_dir / "fee_assert_exact.mdfy").read_text()
    _, _, _, vcs = conditions(exact, "FeeCalculator.FamilyTicketVerification")
    asserts = _asserts(vcs)
    assert [prove(vc).label for vc in asserts] == ["proved", "counterexample", "proved", "proved"]


def test_function_method_results_need_unfolding(conditions, castle_source):
    _, _, _, vcs = conditions(castle_source, FAMILY, fuel=0)
    ticket_asserts = _asserts(vcs)[1:]
    assert len(ticket_asserts) == 2
    assert not any(prove(vc).proved for vc in ticket_asserts)
    _, _, _, vcs = conditions(castle_source, FAMILY, fuel=1)
    assert all(prove(vc).proved for vc in _asserts(vcs)[1:])


def test_inline_functions_unfolds_definition(typed):
    tp = typed(RECURSIVE)
    table = build_function_table(tp)
    n = F.mk_var("n")
    app = F.app("Twice", (n,), F.INT)
    goal = F.eq(app, F.mul(F.mk_int(2), n))
    assert inline_functions(goal, 0, table) is goal
    unfolded = inline_functions(goal, 1, table)
    assert "Twice" not in F.format_term(unfolded)


def test_inline_functions_adds_nat_result_fact(typed):
    tp = typed(RECURSIVE)
    table = build_function_table(tp)
    app = F.app("Sum", (F.mk_var("k"),), F.INT)
    goal = F.eq(app, F.mk_var("y"))
    rewritten = inline_functions(goal, 0, table)
    assert rewritten.op == "implies"
    assert rewritten.args[0] is F.ge(app, F.ZERO)
    assert rewritten.args[1] is goal


def test_callgraph_cycles(typed):
    callgraph = build_callgraph(typed(RECURSIVE))
    assert callgraph.is_recursive("Sum")
    assert callgraph.same_cycle("Even", "Odd")
    assert not callgraph.is_recursive("Twice")


def test_recursive_function_terminates(typed):
    tp = typed(RECURSIVE)
    callgraph = build_callgraph(tp)
    table = build_function_table(tp)
    for name in ("Sum", "Even", "Odd"):
        vcs = check_function_termination(tp.decls[name].decl, callgraph, tp, table)
        assert [vc.kind for vc in vcs] == [ObligationKind.TERMINATION_DECREASES]
        assert vcs[0].description == "cannot prove termination of this recursive call"
        assert prove(vcs[0]).proved


def test_non_recursive_function_has_no_termination_conditions(typed, castle_source):
    tp = typed(castle_source)
    decl = tp.decls["EdinburghCastleVisitorCenter.GetDiscountedFamilyTicket"].decl
    assert check_function_termination(decl, build_callgraph(tp), tp) == []


def test_recursion_without_decreases(typed):
    tp = typed(RECURSIVE)
    with pytest.raises(DiagnosticError) as caught:
        check_function_termination(tp.decls["Spin"].decl, build_callgraph(tp), tp)
    assert [d.code for d in caught.value.diagnostics] == ["MISSING_DECREASES"]


def test_non_decreasing_measure_fails(typed):
    tp = typed("""
    function Up(n: int): int
      decreases n
    {
      if n > 100 then 0 else Up(n + 1)
    }
    """)
    vcs = check_function_termination(tp.decls["Up"].decl, build_callgraph(tp), tp, build_function_table(tp))
    assert len(vcs) == 1
    assert not prove(vcs[0]).proved


def test_format_vc(conditions):
    _, _, _, vcs = conditions("method M(a: nat) { assert a >= 0; }", "M")
    lines = format_vc(vcs[0]).splitlines()
    assert lines[0] == "vc 0 M AssertStmt at 1:20: assertion might not hold"
    assert "a: nat" in lines[1]
    assert lines[-1].startswith("  prove ")
