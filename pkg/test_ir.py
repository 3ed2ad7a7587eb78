"""
Lowering to guarded commands and decreases guessing
"""
from collections import Counter

import pytest

from minidafny import formula as F
from minidafny.diagnostics import DiagnosticError
from minidafny.frontend import ast, format_expr, parse_source
from minidafny.ir import (
    Assert, AssignVar, Havoc, HeapStore, ObligationKind, format_graph, guess_decreases, lower_function,
    lower_method,
)
from minidafny.typecheck import resolve_and_check


def _loop(decl):
    return next(s for s in decl.body.stmts if isinstance(s, ast.While))


def _kinds(graph):
    return [command.kind for _, _, command in graph.asserts()]


def test_guessed_measure_matches_published_clause(typed, corpus_dir):
    tp = typed((corpus_dir / "audio_guides_guessed_decreases.mdfy").read_text())
    loop = _loop(tp.decls["AssignAudioGuides"].decl)
    assert loop.decreases is None
    assert format_expr(guess_decreases(loop)) == "numPeople - numAssignedGuides"


@pytest.mark.parametrize("guard, expected", [
    ("i < n", "n - i"),
    ("i <= n", "n - i"),
    ("n > i", "n - i"),
    ("n >= i + 1", "n - (i + 1)"),
    ("a.Length > i", "a.Length - i"),
    ("i != n", None),
    ("b", None),
])
def test_guess_decreases(typed, guard, expected):
    source = f"""
    method M(n: int, a: array<int>, b: bool)
      requires a != null
    {{
      var i := 0;
      while ({guard}) {{ i := i + 1; }}
    }}
    """
    loop = _loop(typed(source).decls["M"].decl)
    guessed = guess_decreases(loop)
    assert (format_expr(guessed) if guessed is not None else None) == expected


def test_loop_lowering_order(typed, castle_source):
    tp = typed(castle_source)
    decl = tp.decls["EdinburghCastleVisitorCenter.AssignAudioGuides"].decl
    graph = lower_method(decl, tp)
    assert Counter(_kinds(graph)) == Counter({
        ObligationKind.LOOP_INV_ENTRY: 1,
        ObligationKind.TERMINATION_BOUNDED: 1,
        ObligationKind.NAT_NON_NEGATIVE: 2,
        ObligationKind.LOOP_INV_MAINTAINED: 1,
        ObligationKind.TERMINATION_DECREASES: 1,
        ObligationKind.ASSERT_STMT: 1,
    })
    body = next(block for label, block in graph.blocks.items() if label.startswith("body"))
    assert [c.kind for c in body.commands if isinstance(c, Assert)] == [
        ObligationKind.TERMINATION_BOUNDED,
        ObligationKind.NAT_NON_NEGATIVE,
        ObligationKind.LOOP_INV_MAINTAINED,
        ObligationKind.TERMINATION_DECREASES,
    ]
    assert body.successors == []
    assert len(graph.loops) == 1
    cut = graph.loops[0]
    assert cut.havoc == {"numAssignedGuides": "numAssignedGuides$loop1"}
    assert graph.symbols["numAssignedGuides$loop1"].nat
    assert graph.diagnostics == []


def test_graph_is_acyclic_and_havocs_at_head(typed, castle_source):
    tp = typed(castle_source)
    graph = lower_method(tp.decls["EdinburghCastleVisitorCenter.AssignAudioGuides"].decl, tp)
    order = graph.topological_order()
    assert order[0] == "entry"
    head = next(label for label in order if label.startswith("head"))
    assert isinstance(graph.blocks[head].commands[0], Havoc)


def test_call_site_lowering(typed, castle_source):
    tp = typed(castle_source)
    graph = lower_method(tp.decls["EdinburghCastleVisitorCenter.FamilyTicketVerification"].decl, tp)
    assert [c.callee for c in graph.calls] == ["EdinburghCastleVisitorCenter.CalculateEdiCastleVisitFee"]
    assert list(graph.calls[0].outs) == ["totalFee"]
    kinds = _kinds(graph)
    assert kinds[0] is ObligationKind.PRECONDITION_AT_CALL
    assert kinds.count(ObligationKind.ASSERT_STMT) == 3


def test_array_access_obligations(typed, castle_source):
    tp = typed(castle_source)
    graph = lower_method(tp.decls["EdinburghCastleVisitorCenter.VerifyAdults"].decl, tp)
    kinds = set(_kinds(graph))
    assert ObligationKind.INDEX_IN_BOUNDS in kinds
    assert ObligationKind.NULL_DEREF in kinds


def test_missing_decreases_without_guess(typed):
    tp = typed("method M(n: int) { var i := 0; while (i != n) { i := i + 1; } }")
    graph = lower_method(tp.decls["M"].decl, tp)
    assert [(d.code, d.message) for d in graph.diagnostics] == [
        ("MISSING_DECREASES", "cannot prove termination; add a decreases clause")]
    assert ObligationKind.TERMINATION_DECREASES not in _kinds(graph)


def test_break_skips_exit_assumption(typed):
    tp = typed("""
    method M(n: nat) returns (r: int)
    {
      var i := 0;
      while (i < n) invariant i <= n { if (i == 3) { break; } i := i + 1; }
      r := i;
    }
    """)
    graph = lower_method(tp.decls["M"].decl, tp)
    after = next(label for label in graph.blocks if label.startswith("after"))
    entering = [label for label, block in graph.blocks.items() if after in block.successors]
    assert len(entering) == 2
    text = format_graph(graph)
    assert text.splitlines()[0] == "graph M"
    assert "havoc i->i$loop1" in text


def test_format_graph_lists_every_block(typed, castle_source):
    tp = typed(castle_source)
    graph = lower_method(tp.decls["EdinburghCastleVisitorCenter.VerifyAdults"].decl, tp)
    lines = format_graph(graph).splitlines()
    assert len(lines) == 1 + len(graph.topological_order())
    assert lines[1].startswith("  entry: ")


NESTED = """
method Bump(a: array<int>, k: int) returns (before: int)
  requires a != null && 0 <= k < a.Length
  modifies a
{
  before := a[k];
  a[k] := before + 1;
}

method Fill(a: array<int>, n: nat) returns (total: int)
  requires a != null && n <= a.Length
  modifies a
{
  var i := 0;
  total := 0;
  while (i < n)
    invariant 0 <= i <= n
  {
    var j := 0;
    while (j < i)
      invariant 0 <= j <= i
    {
      total := total + j;
      j := j + 1;
    }
    if (i % 2 == 0) {
      a[i] := total;
    } else {
      var prev := Bump(a, i);
      total := total - prev;
    }
    i := i + 1;
  }
}
"""

PARTIAL = """
method Split(total: int, parts: array<int>, k: nat) returns (share: int)
  requires parts != null && k < parts.Length
{
  share := total / parts[k];
  if (share % (k + 1) == 0) {
    share := share + total / (k + 1);
  }
  assert forall m :: 0 <= m < k ==> parts[m] / 2 <= parts[m];
}
"""

K = ObligationKind

CASTLE = "EdinburghCastleVisitorCenter."
FEE = "FeeCalculator."
AUDIO = {K.LOOP_INV_ENTRY: 1, K.TERMINATION_BOUNDED: 1, K.NAT_NON_NEGATIVE: 2,
         K.LOOP_INV_MAINTAINED: 1, K.TERMINATION_DECREASES: 1, K.ASSERT_STMT: 1}
CHILD_PRESENT = {K.NULL_DEREF: 2}
VERIFY_ADULTS_LOOP = {K.TERMINATION_BOUNDED: 1, K.TERMINATION_DECREASES: 1, K.NAT_NON_NEGATIVE: 1,
                      K.ASSERT_STMT: 1}

OBLIGATION_KINDS = {
    "audio_guides_guessed_decreases.mdfy": {"AssignAudioGuides": AUDIO},
    "audio_guides_no_invariant.mdfy": {"AssignAudioGuides": {
        K.TERMINATION_BOUNDED: 1, K.NAT_NON_NEGATIVE: 2, K.TERMINATION_DECREASES: 1, K.ASSERT_STMT: 1}},
    "child_present_no_reads.mdfy": {"ChildPresent": CHILD_PRESENT},
    "child_present_no_requires.mdfy": {"ChildPresent": CHILD_PRESENT},
    "child_present_unguarded.mdfy": {"ChildPresent": CHILD_PRESENT},
    "division_by_guests.mdfy": {"SharePerGuest": {K.DIV_BY_ZERO: 1}},
    "edinburgh_castle.mdfy": {
        CASTLE + "CalculateEdiCastleVisitFee": {K.POSTCONDITION: 1},
        CASTLE + "GetDiscountedFamilyTicket": {},
        CASTLE + "FamilyTicketVerification": {K.PRECONDITION_AT_CALL: 1, K.ASSERT_STMT: 3},
        CASTLE + "AssignAudioGuides": AUDIO,
        CASTLE + "VerifyAdults": {K.NULL_DEREF: 12, K.INDEX_IN_BOUNDS: 4, K.LOOP_INV_ENTRY: 2,
                                  K.LOOP_INV_MAINTAINED: 2, **VERIFY_ADULTS_LOOP},
        CASTLE + "ChildPresent": CHILD_PRESENT,
    },
    "fee_assert_exact.mdfy": {
        FEE + "CalculateEdiCastleVisitFee": {K.POSTCONDITION: 1},
        FEE + "GetDiscountedFamilyTicket": {},
        FEE + "FamilyTicketVerification": {K.PRECONDITION_AT_CALL: 1, K.ASSERT_STMT: 4},
    },
    "fee_int_children.mdfy": {FEE + "CalculateEdiCastleVisitFee": {K.POSTCONDITION: 1}},
    "ghost_in_method.mdfy": {"ChildPresent": CHILD_PRESENT, "NeedsSupervision": {K.PRECONDITION_AT_CALL: 1}},
    "verify_adults_no_forall.mdfy": {"VerifyAdults": {
        K.NULL_DEREF: 9, K.INDEX_IN_BOUNDS: 1, K.LOOP_INV_ENTRY: 1, K.LOOP_INV_MAINTAINED: 1,
        **VERIFY_ADULTS_LOOP}},
    "verify_adults_no_length_bound.mdfy": {"VerifyAdults": {
        K.NULL_DEREF: 9, K.INDEX_IN_BOUNDS: 4, K.LOOP_INV_ENTRY: 1, K.LOOP_INV_MAINTAINED: 1,
        **VERIFY_ADULTS_LOOP}},
}


def _corpus_programs(corpus_dir):
    """file name -> typed program, for every corpus file that resolves"""
    programs = {}
    for path in sorted(corpus_dir.glob("*.mdfy")):
        try:
            programs[path.name] = resolve_and_check(parse_source(path.read_text(), path.name))
        except DiagnosticError:
            continue
    return programs


def _lower(decl, tp):
    if isinstance(decl, ast.FunctionDecl):
        return lower_function(decl, tp)
    return lower_method(decl, tp)


def test_obligation_kinds_per_declaration(corpus_dir):
    programs = _corpus_programs(corpus_dir)
    assert sorted(programs) == sorted(OBLIGATION_KINDS)
    for name, tp in programs.items():
        found = {decl.qualified_name: Counter(_kinds(_lower(decl, tp)))
                 for decl in tp.program.declarations()}
        expected = {decl: Counter(kinds) for decl, kinds in OBLIGATION_KINDS[name].items()}
        assert found == expected, name


def _loops(stmts):
    for stmt in stmts:
        if isinstance(stmt, ast.While):
            yield stmt
            yield from _loops(stmt.body.stmts)
        elif isinstance(stmt, ast.If):
            yield from _loops(stmt.then.stmts)
            if stmt.else_ is not None:
                yield from _loops(stmt.else_.stmts)


def _assigned_in(stmts, names) -> bool:
    """Adds every source name the statements may write to names; True when an array may change"""
    writes_array = False
    for stmt in stmts:
        if isinstance(stmt, ast.VarDecl):
            names.add(stmt.name)
        elif isinstance(stmt, ast.Assign):
            if isinstance(stmt.lhs, ast.Var):
                names.add(stmt.lhs.name)
            else:
                writes_array = True
        elif isinstance(stmt, ast.MultiAssignCall):
            names.update(stmt.lhs)
            writes_array |= bool(stmt.decl.modifies)
        elif isinstance(stmt, ast.If):
            writes_array |= _assigned_in(stmt.then.stmts, names)
            if stmt.else_ is not None:
                writes_array |= _assigned_in(stmt.else_.stmts, names)
        elif isinstance(stmt, ast.While):
            writes_array |= _assigned_in(stmt.body.stmts, names)
    return writes_array


def test_loop_havocs_everything_its_body_writes(typed, corpus_dir):
    programs = list(_corpus_programs(corpus_dir).values()) + [typed(NESTED)]
    seen = 0
    for tp in programs:
        for decl in tp.program.declarations():
            if isinstance(decl, ast.FunctionDecl):
                continue
            graph = lower_method(decl, tp)
            loops = list(_loops(decl.body.stmts))
            heads = [block for label, block in graph.blocks.items() if label.startswith("head")]
            assert len(loops) == len(graph.loops) == len(heads)
            for loop, cut, head in zip(loops, graph.loops, heads):
                names = set()
                writes_array = _assigned_in(loop.body.stmts, names)
                variables = {unique.split("$")[0] for unique in cut.havoc if not unique.startswith("$")}
                assert variables == names, decl.qualified_name
                assert any(unique.startswith("$") for unique in cut.havoc) == writes_array
                havoc = head.commands[0]
                assert isinstance(havoc, Havoc)
                assert {fresh for _, fresh, _ in havoc.targets} == set(cut.havoc.values())
                seen += 1
    assert seen == 8


def test_nested_loop_havoc_sets(typed):
    tp = typed(NESTED)
    graph = lower_method(tp.decls["Fill"].decl, tp)
    outer, inner = graph.loops
    assert sorted(outer.havoc) == ["$heap", "i", "j", "prev", "total"]
    assert sorted(inner.havoc) == ["j", "total"]
    assert inner.havoc["j"] == "j$loop2"


def _partial_operations(term):
    """(kind, subject, guard) for every array read and non-literal division in term"""
    for node in F.subterms(term):
        if node.op == "select":
            ref, index = node.args[1], node.args[2]
            yield ObligationKind.NULL_DEREF, ref, F.ne(ref, F.NULL)
            yield ObligationKind.INDEX_IN_BOUNDS, index, F.lt(index, F.length(ref))
        elif node.op in ("div", "mod") and node.args[1].op != "int":
            yield ObligationKind.DIV_BY_ZERO, node.args[1], F.ne(node.args[1], F.ZERO)


def _operations_of(command):
    """Partial operations a command evaluates, and the formula whose own guards may settle them"""
    if isinstance(command, AssignVar):
        return list(_partial_operations(command.term)), command.term
    if isinstance(command, HeapStore):
        found = [(ObligationKind.NULL_DEREF, command.ref, F.ne(command.ref, F.NULL)),
                 (ObligationKind.INDEX_IN_BOUNDS, command.index, F.lt(command.index, F.length(command.ref)))]
        for part in (command.ref, command.index, command.value):
            found += _partial_operations(part)
        return found, F.TRUE
    # callee clauses are checked in the callee
    if isinstance(command, Assert) and command.kind is not ObligationKind.PRECONDITION_AT_CALL:
        return list(_partial_operations(command.formula)), command.formula
    return [], F.TRUE


def _mentions(formula, subject) -> bool:
    return any(node is subject for node in F.subterms(formula))


def _unchecked_operations(graph):
    """Partial operations with no safety assert of their kind on every path before them"""
    preds = {label: [] for label in graph.blocks}
    for label, block in graph.blocks.items():
        for successor in block.successors:
            preds[successor].append(label)
    asserts = {}
    leaving = {}
    unchecked = []
    for label in graph.topological_order():
        incoming = [leaving[pred] for pred in preds[label] if pred in leaving]
        held = set.intersection(*incoming) if incoming else set()
        for command in graph.blocks[label].commands:
            operations, context = _operations_of(command)
            for kind, subject, guard in operations:
                checked = any(asserts[key].kind is kind and _mentions(asserts[key].formula, subject)
                              for key in held)
                if not checked and not _mentions(context, guard):
                    unchecked.append((label, kind, F.format_term(subject)))
            if isinstance(command, Assert):
                asserts[id(command)] = command
                held = held | {id(command)}
        leaving[label] = held
    return unchecked


def test_partial_operations_follow_their_safety_asserts(typed, corpus_dir):
    programs = list(_corpus_programs(corpus_dir).values()) + [typed(NESTED), typed(PARTIAL)]
    for tp in programs:
        for decl in tp.program.declarations():
            assert _unchecked_operations(_lower(decl, tp)) == [], decl.qualified_name


def test_dropping_safety_asserts_leaves_operations_unchecked(typed):
    tp = typed(PARTIAL)
    graph = lower_method(tp.decls["Split"].decl, tp)
    safety = {ObligationKind.NULL_DEREF, ObligationKind.INDEX_IN_BOUNDS, ObligationKind.DIV_BY_ZERO}
    for block in graph.blocks.values():
        block.commands = [c for c in block.commands if not (isinstance(c, Assert) and c.kind in safety)]
    kinds = {kind for _, kind, _ in _unchecked_operations(graph)}
    assert kinds == safety
