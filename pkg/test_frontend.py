"""
Tokenizer, parser and pretty printer
"""
import pytest

from minidafny.diagnostics import DiagnosticError
from minidafny.frontend import TokenKind, format_expr, format_program, parse_source, tokenize
from minidafny.frontend import ast


def test_tokenize_keywords_operators_and_spans():
    tokens = tokenize("while (i <= n) { i := i + 1; }", "t.mdfy")
    lexemes = [t.lexeme for t in tokens[:-1]]
    assert lexemes == ["while", "(", "i", "<=", "n", ")", "{", "i", ":=", "i", "+", "1", ";", "}"]
    assert tokens[0].kind is TokenKind.KEYWORD
    assert tokens[2].kind is TokenKind.IDENTIFIER
    assert tokens[3].kind is TokenKind.OPERATOR
    assert tokens[11].kind is TokenKind.INTEGER
    assert tokens[-1].kind is TokenKind.EOF
    assert (tokens[3].span.start_line, tokens[3].span.start_col) == (1, 10)


def test_tokenize_maximal_munch():
    lexemes = [t.lexeme for t in tokenize("a <==> b ==> c :: d")[:-1]]
    assert lexemes == ["a", "<==>", "b", "==>", "c", "::", "d"]


def test_tokenize_skips_comments():
    tokens = tokenize("x // trailing\n/* block\n comment */ y")
    assert [t.lexeme for t in tokens[:-1]] == ["x", "y"]
    assert tokens[1].span.start_line == 3


def test_tokenize_reports_every_bad_character():
    with pytest.raises(DiagnosticError) as caught:
        tokenize("x := 1 # 2 @", "bad.mdfy")
    codes = [d.code for d in caught.value.diagnostics]
    assert codes == ["LEX_ERROR", "LEX_ERROR"]
    assert caught.value.diagnostics[0].message == "unexpected character '#'"


def test_tokenize_unterminated_comment():
    with pytest.raises(DiagnosticError) as caught:
        tokenize("x /* never closed")
    assert caught.value.diagnostics[0].message == "unterminated comment"


def test_parse_castle_declarations(castle_source):
    program = parse_source(castle_source, "edinburgh_castle.mdfy")
    assert [c.name for c in program.classes] == ["EdinburghCastleVisitorCenter"]
    names = [d.name for d in program.declarations()]
    assert names == [
        "CalculateEdiCastleVisitFee", "GetDiscountedFamilyTicket", "FamilyTicketVerification",
        "AssignAudioGuides", "VerifyAdults", "ChildPresent",
    ]
    ticket = program.declarations()[1]
    assert isinstance(ticket, ast.FunctionDecl) and ticket.is_function_method
    present = program.declarations()[5]
    assert not present.is_function_method
    assert [r.name for r in present.reads] == ["visitorsAges"]


def test_parse_loop_clauses_in_any_order(castle_source):
    program = parse_source(castle_source)
    adults = program.declarations()[4]
    loop = next(s for s in adults.body.stmts if isinstance(s, ast.While))
    assert len(loop.invariants) == 2
    assert format_expr(loop.decreases) == "adultAges.Length - index"
    assert format_expr(loop.invariants[1]) == "forall i :: 0 <= i < index ==> adultAges[i] >= 18"


def test_chained_comparison_is_kept_as_chain():
    program = parse_source("method M(a: int, b: int, c: int) { assert a <= b < c; }")
    expr = program.members[0].body.stmts[0].expr
    assert isinstance(expr, ast.ChainedCmp)
    assert expr.ops == ["<=", "<"]


def _assertion(text: str) -> ast.Expr:
    program = parse_source(f"method M(a: int, b: int, c: int, d: int) {{ assert {text}; }}")
    return program.members[0].body.stmts[0].expr


@pytest.mark.parametrize("chain, conjunction", [
    ("a <= b < c", "a <= b && b < c"),
    ("a < b <= c < d", "a < b && b <= c && c < d"),
    ("d >= c > b", "d >= c && c > b"),
    ("a == 0 ==> b < c <= d", "a == 0 ==> b < c && c <= d"),
    ("forall k :: 0 <= k < a ==> k < b", "forall k :: 0 <= k && k < a ==> k < b"),
])
def test_chain_desugars_to_conjunction(chain, conjunction):
    assert ast.desugar_chains(_assertion(chain)) == ast.desugar_chains(_assertion(conjunction))
    assert ast.desugar_chains(_assertion(chain)) != _assertion(chain)


def test_tuple_decreases_is_a_single_error():
    source = ("method M(n: int) {\n  var i := 0;\n  while i < n decreases n - i, 0 {\n"
              "    i := i + 1;\n  }\n}\n")
    with pytest.raises(DiagnosticError) as caught:
        parse_source(source, "tuple.mdfy")
    assert [d.message for d in caught.value.diagnostics] == [
        "decreases accepts exactly one integer expression; tuple measures are not supported"]
    assert caught.value.diagnostics[0].span.start_line == 3


@pytest.mark.parametrize("source, message", [
    ("method M() { return; }", "'return' is not supported; assign the out-parameters instead"),
    ("method M() { var a := new int[3]; }", "'new' is not supported"),
    ("method M(a: int) { assert a == 1 == 1; }", "'==' and '!=' cannot appear in a comparison chain"),
    ("method M(a: int) { assert 0 < a > 1; }", "comparison chain mixes '<' and '>' directions"),
    ("function F(x: int): int modifies x { x }",
     "functions cannot have a modifies clause; functions cannot write to memory"),
    ("method M() { break; }", "break statement outside of a loop"),
])
def test_syntax_errors(source, message):
    with pytest.raises(DiagnosticError) as caught:
        parse_source(source, "bad.mdfy")
    assert caught.value.diagnostics[0].code == "SYNTAX_ERROR"
    assert caught.value.diagnostics[0].message == message


def test_parser_recovers_and_reports_several_errors():
    source = "method A() { return; }\nmethod B() { var x := new int; }\nmethod C() { }\n"
    with pytest.raises(DiagnosticError) as caught:
        parse_source(source, "bad.mdfy")
    lines = [d.span.start_line for d in caught.value.diagnostics]
    assert lines == [1, 2]


def test_syntax_error_location():
    with pytest.raises(DiagnosticError) as caught:
        parse_source("method Fee(n: nat) returns (t: int)\n{\n\treturn n;\n}\n", "fee.mdfy")
    first = caught.value.diagnostics[0]
    assert first.format() == (
        "fee.mdfy:3:2: error[SYNTAX_ERROR]: 'return' is not supported; assign the out-parameters instead")


def test_predicate_is_a_bool_function():
    program = parse_source("predicate Adult(age: int) { age >= 18 }")
    decl = program.members[0]
    assert decl.is_predicate
    assert decl.return_type.name == "bool"


def test_format_program_round_trips(castle_source):
    first = parse_source(castle_source)
    printed = format_program(first)
    second = parse_source(printed)
    assert first == second
    assert format_program(second) == printed


def test_format_expr_parenthesizes_by_precedence():
    program = parse_source("method M(a: int, b: int) { assert (a + b) * 2 == a - (b - 1); }")
    assert format_expr(program.members[0].body.stmts[0].expr) == "(a + b) * 2 == a - (b - 1)"
