"""
Recursive descent parser for .mdfy programs
Syntax errors are collected with recovery at statement and declaration
boundaries; no AST is returned if any error was found
"""
import logging
from typing import List, Optional, Tuple

from minidafny.diagnostics import Diagnostic, DiagnosticError, Span, error
from minidafny.frontend import ast
from minidafny.frontend.lexer import Token, TokenKind, tokenize

logger = logging.getLogger(__name__)

RELATIONS = ("<", "<=", ">", ">=", "==", "!=")
ASCENDING = ("<", "<=")
DESCENDING = (">", ">=")

STATEMENT_STARTS = ("var", "ghost", "if", "while", "assert", "break", "return")
MEMBER_STARTS = ("method", "function", "predicate", "ghost", "class")


class ParseException(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class Parser:
    """Parser over a token list produced by tokenize()"""

    def __init__(self, tokens: List[Token]):
        if not tokens or tokens[-1].kind is not TokenKind.EOF:
            raise ValueError("token list must end with an EOF token")
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: List[Diagnostic] = []
        self.loop_depth = 0
        self.file = tokens[-1].span.file

    # -- token helpers ---------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    @property
    def previous(self) -> Token:
        return self.tokens[self.pos - 1] if self.pos > 0 else self.tokens[0]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def check(self, *lexemes: str) -> bool:
        token = self.current
        return token.kind is not TokenKind.EOF and token.lexeme in lexemes and token.kind in (
            TokenKind.OPERATOR, TokenKind.PUNCTUATION, TokenKind.KEYWORD)

    def accept(self, *lexemes: str) -> Optional[Token]:
        if self.check(*lexemes):
            return self.advance()
        return None

    def expect(self, lexeme: str, context: str = "") -> Token:
        if self.check(lexeme):
            return self.advance()
        where = f" {context}" if context else ""
        self.fail(self.current.span, f"expected '{lexeme}'{where}, found {self.current}")

    def expect_identifier(self, what: str = "identifier") -> Token:
        token = self.current
        if token.kind is TokenKind.IDENTIFIER:
            return self.advance()
        self.fail(token.span, f"expected {what}, found {token}")

    def fail(self, span: Span, message: str):
        raise ParseException(error(span, "SYNTAX_ERROR", message))

    def report(self, span: Span, message: str):
        self.diagnostics.append(error(span, "SYNTAX_ERROR", message))

    def span_from(self, start: Token) -> Span:
        return start.span.to(self.previous.span)

    # -- recovery --------------------------------------------------------------

    def sync_statement(self):
        """Skip to just after the next ';', or to a '}' / statement keyword"""
        while self.current.kind is not TokenKind.EOF:
            if self.accept(";"):
                return
            if self.check("}") or self.current.is_keyword(*STATEMENT_STARTS):
                return
            self.advance()

    def sync_member(self):
        while self.current.kind is not TokenKind.EOF:
            if self.current.is_keyword(*MEMBER_STARTS) or self.check("}"):
                return
            self.advance()

    # -- declarations ----------------------------------------------------------

    def parse_program(self) -> ast.Program:
        start = self.current
        classes: List[ast.ClassDecl] = []
        members: List[ast.Decl] = []
        while self.current.kind is not TokenKind.EOF:
            try:
                if self.current.is_keyword("class"):
                    classes.append(self.parse_class())
                elif self.current.is_keyword("method", "function", "predicate", "ghost"):
                    members.append(self.parse_member(None))
                else:
                    self.fail(self.current.span, f"expected a class, method or function declaration, found {self.current}")
            except ParseException as exc:
                self.diagnostics.append(exc.diagnostic)
                self.advance()
                self.sync_member()
                if self.check("}"):
                    self.advance()
        return ast.Program(classes, members, file=self.file, span=start.span.to(self.current.span))

    def parse_class(self) -> ast.ClassDecl:
        start = self.expect("class")
        name = self.expect_identifier("class name")
        self.expect("{", "after class name")
        members: List[ast.Decl] = []
        while not self.check("}") and self.current.kind is not TokenKind.EOF:
            try:
                members.append(self.parse_member(name.lexeme))
            except ParseException as exc:
                self.diagnostics.append(exc.diagnostic)
                self.advance()
                self.sync_member()
        self.expect("}", "to close class body")
        return ast.ClassDecl(name.lexeme, members, span=self.span_from(start))

    def parse_member(self, class_name: Optional[str]) -> ast.Decl:
        start = self.current
        ghost = bool(self.accept("ghost"))
        if self.accept("method"):
            if ghost:
                self.fail(start.span, "ghost methods are not supported")
            return self.parse_method(start, class_name)
        if self.accept("function"):
            is_method = bool(self.accept("method"))
            return self.parse_function(start, class_name, is_method, predicate=False)
        if self.accept("predicate"):
            is_method = bool(self.accept("method"))
            return self.parse_function(start, class_name, is_method, predicate=True)
        self.fail(self.current.span, f"expected 'method', 'function' or 'predicate', found {self.current}")

    def parse_params(self) -> List[ast.Param]:
        self.expect("(")
        params: List[ast.Param] = []
        if not self.check(")"):
            while True:
                start = self.current
                ghost = bool(self.accept("ghost"))
                name = self.expect_identifier("parameter name")
                self.expect(":", "after parameter name")
                type_expr = self.parse_type()
                params.append(ast.Param(name.lexeme, type_expr, ghost, span=self.span_from(start)))
                if not self.accept(","):
                    break
        self.expect(")", "to close parameter list")
        return params

    def parse_type(self) -> ast.TypeExpr:
        name = self.expect_identifier("type name")
        if name.lexeme == "array" and self.accept("<"):
            elem = self.parse_type()
            self.expect(">", "to close array type")
            return ast.TypeExpr("array", elem, span=self.span_from(name))
        return ast.TypeExpr(name.lexeme, span=name.span)

    def parse_frame_list(self) -> List[ast.FrameRef]:
        refs: List[ast.FrameRef] = []
        while True:
            name = self.expect_identifier("frame expression")
            refs.append(ast.FrameRef(name.lexeme, span=name.span))
            if not self.accept(","):
                return refs

    def parse_decreases(self) -> ast.Expr:
        expr = self.parse_expression()
        if self.check(","):
            self.report(self.current.span,
                        "decreases accepts exactly one integer expression; tuple measures are not supported")
            while self.accept(","):
                self.parse_expression()
        return expr

    def parse_specs(self, kind: str):
        """Clauses in any order; each optionally followed by ';'"""
        requires: List[ast.Expr] = []
        ensures: List[ast.Expr] = []
        modifies: List[ast.FrameRef] = []
        reads: List[ast.FrameRef] = []
        decreases: Optional[ast.Expr] = None
        while True:
            token = self.current
            if self.accept("requires"):
                requires.append(self.parse_expression())
            elif self.accept("ensures"):
                ensures.append(self.parse_expression())
            elif self.accept("modifies"):
                if kind == "function":
                    self.fail(token.span, "functions cannot have a modifies clause; functions cannot write to memory")
                modifies.extend(self.parse_frame_list())
            elif self.accept("reads"):
                reads.extend(self.parse_frame_list())
            elif self.accept("decreases"):
                if decreases is not None:
                    self.fail(token.span, "only one decreases clause is allowed")
                decreases = self.parse_decreases()
            else:
                return requires, ensures, modifies, reads, decreases
            self.accept(";")

    def parse_method(self, start: Token, class_name: Optional[str]) -> ast.MethodDecl:
        name = self.expect_identifier("method name")
        ins = self.parse_params()
        outs: List[ast.Param] = []
        if self.accept("returns"):
            outs = self.parse_params()
        requires, ensures, modifies, reads, decreases = self.parse_specs("method")
        body = self.parse_block()
        return ast.MethodDecl(name.lexeme, ins, outs, requires, modifies, ensures, decreases, body,
                              reads=reads, class_name=class_name, span=self.span_from(start))

    def parse_function(self, start: Token, class_name: Optional[str], is_method: bool,
                       predicate: bool) -> ast.FunctionDecl:
        name = self.expect_identifier("function name")
        ins = self.parse_params()
        if predicate:
            return_type = ast.TypeExpr("bool", span=name.span)
            if self.check(":"):
                self.fail(self.current.span, "a predicate has no return type")
        else:
            self.expect(":", "before function return type")
            return_type = self.parse_type()
        requires, ensures, _, reads, decreases = self.parse_specs("function")
        self.expect("{", "to open function body")
        body = self.parse_expression()
        if not self.check("}"):
            self.fail(self.current.span, "a function body must be exactly one expression")
        self.expect("}")
        return ast.FunctionDecl(name.lexeme, ins, return_type, requires, reads, ensures, decreases, body,
                                is_function_method=is_method, is_predicate=predicate,
                                class_name=class_name, span=self.span_from(start))

    # -- statements ------------------------------------------------------------

    def parse_block(self) -> ast.Block:
        start = self.expect("{", "to open block")
        stmts: List[ast.Stmt] = []
        while not self.check("}") and self.current.kind is not TokenKind.EOF:
            if self.current.is_keyword(*MEMBER_STARTS) and not self.current.is_keyword("ghost"):
                break
            before = self.pos
            try:
                stmts.append(self.parse_statement())
            except ParseException as exc:
                self.diagnostics.append(exc.diagnostic)
                if self.pos == before:
                    self.advance()
                self.sync_statement()
        self.expect("}", "to close block")
        return ast.Block(stmts, span=self.span_from(start))

    def parse_statement(self) -> ast.Stmt:
        token = self.current
        if token.is_keyword("var") or (token.is_keyword("ghost") and self.peek().is_keyword("var")):
            return self.parse_var_decl()
        if token.is_keyword("if"):
            return self.parse_if()
        if token.is_keyword("while"):
            return self.parse_while()
        if self.accept("assert"):
            expr = self.parse_expression()
            self.expect(";", "after assert")
            return ast.Assert(expr, span=self.span_from(token))
        if self.accept("break"):
            if self.loop_depth == 0:
                self.report(token.span, "break statement outside of a loop")
            self.expect(";", "after break")
            return ast.Break(span=self.span_from(token))
        if token.is_keyword("return"):
            self.fail(token.span, "'return' is not supported; assign the out-parameters instead")
        if token.kind is TokenKind.IDENTIFIER:
            return self.parse_assignment_or_call()
        self.fail(token.span, f"expected a statement, found {token}")

    def parse_var_decl(self) -> ast.Stmt:
        start = self.current
        ghost = bool(self.accept("ghost"))
        self.expect("var")
        names: List[Tuple[Token, Optional[ast.TypeExpr]]] = []
        while True:
            name = self.expect_identifier("variable name")
            type_expr = self.parse_type() if self.accept(":") else None
            names.append((name, type_expr))
            if not self.accept(","):
                break
        init: Optional[ast.Expr] = None
        if self.accept(":="):
            init = self.parse_expression()
        self.expect(";", "after variable declaration")
        span = self.span_from(start)
        if len(names) == 1:
            name, type_expr = names[0]
            return ast.VarDecl(name.lexeme, type_expr, init, ghost, span=span)
        if not isinstance(init, ast.Call):
            self.fail(span, "declaring several variables requires a method call on the right-hand side")
        if any(type_expr is not None for _, type_expr in names):
            self.fail(span, "type annotations are not allowed when declaring call results")
        return ast.MultiAssignCall([n.lexeme for n, _ in names], init.name, init.args, init.qualifier,
                                   declares=True, ghost=ghost, lhs_spans=[n.span for n, _ in names],
                                   span=span)

    def parse_if(self) -> ast.If:
        start = self.expect("if")
        cond = self.parse_expression()
        then = self.parse_block()
        else_: Optional[ast.Block] = None
        if self.accept("else"):
            if self.current.is_keyword("if"):
                nested = self.parse_if()
                else_ = ast.Block([nested], span=nested.span)
            else:
                else_ = self.parse_block()
        return ast.If(cond, then, else_, span=self.span_from(start))

    def parse_while(self) -> ast.While:
        start = self.expect("while")
        guard = self.parse_expression()
        invariants: List[ast.Expr] = []
        decreases: Optional[ast.Expr] = None
        while True:
            token = self.current
            if self.accept("invariant"):
                invariants.append(self.parse_expression())
            elif self.accept("decreases"):
                if decreases is not None:
                    self.fail(token.span, "only one decreases clause is allowed")
                decreases = self.parse_decreases()
            elif token.is_keyword("modifies", "reads", "requires", "ensures"):
                self.fail(token.span, f"'{token.lexeme}' is not allowed on a loop")
            else:
                break
            self.accept(";")
        self.loop_depth += 1
        try:
            body = self.parse_block()
        finally:
            self.loop_depth -= 1
        return ast.While(guard, invariants, decreases, body, span=self.span_from(start))

    def parse_assignment_or_call(self) -> ast.Stmt:
        start = self.current
        target = self.parse_postfix()
        if self.check(","):
            names = [self._lhs_name(target)]
            spans = [target.span]
            while self.accept(","):
                name = self.expect_identifier("variable name")
                names.append(name.lexeme)
                spans.append(name.span)
            self.expect(":=", "in multiple assignment")
            rhs = self.parse_expression()
            if not isinstance(rhs, ast.Call):
                self.fail(rhs.span, "multiple assignment requires a method call on the right-hand side")
            self.expect(";", "after assignment")
            return ast.MultiAssignCall(names, rhs.name, rhs.args, rhs.qualifier, lhs_spans=spans,
                                       span=self.span_from(start))
        if self.accept(":="):
            if not isinstance(target, (ast.Var, ast.ArraySelect)):
                self.fail(target.span, "left-hand side must be a variable or an array element")
            rhs = self.parse_expression()
            self.expect(";", "after assignment")
            return ast.Assign(target, rhs, span=self.span_from(start))
        if isinstance(target, ast.Call):
            self.expect(";", "after call")
            return ast.MultiAssignCall([], target.name, target.args, target.qualifier,
                                       span=self.span_from(start))
        self.fail(self.current.span, f"expected ':=' or '(' after expression, found {self.current}")

    def _lhs_name(self, target: ast.Expr) -> str:
        if not isinstance(target, ast.Var):
            self.fail(target.span, "multiple assignment targets must be variables")
        return target.name

    # -- expressions -----------------------------------------------------------

    def parse_expression(self) -> ast.Expr:
        return self.parse_iff()

    def parse_iff(self) -> ast.Expr:
        left = self.parse_implies()
        while self.accept("<==>"):
            right = self.parse_implies()
            left = ast.Binary("<==>", left, right, span=left.span.to(right.span))
        return left

    def parse_implies(self) -> ast.Expr:
        left = self.parse_or()
        if self.accept("==>"):
            right = self.parse_implies()
            return ast.Binary("==>", left, right, span=left.span.to(right.span))
        return left

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.accept("||"):
            right = self.parse_and()
            left = ast.Binary("||", left, right, span=left.span.to(right.span))
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_comparison()
        while self.accept("&&"):
            right = self.parse_comparison()
            left = ast.Binary("&&", left, right, span=left.span.to(right.span))
        return left

    def parse_comparison(self) -> ast.Expr:
        first = self.parse_additive()
        operands = [first]
        ops: List[str] = []
        op_tokens: List[Token] = []
        while self.current.kind is TokenKind.OPERATOR and self.current.lexeme in RELATIONS:
            op_tokens.append(self.advance())
            ops.append(op_tokens[-1].lexeme)
            operands.append(self.parse_additive())
        if not ops:
            return first
        span = first.span.to(operands[-1].span)
        if len(ops) == 1:
            return ast.Binary(ops[0], first, operands[1], span=span)
        if any(op in ("==", "!=") for op in ops):
            self.fail(op_tokens[0].span.to(op_tokens[-1].span),
                      "'==' and '!=' cannot appear in a comparison chain")
        if not (all(op in ASCENDING for op in ops) or all(op in DESCENDING for op in ops)):
            self.fail(op_tokens[0].span.to(op_tokens[-1].span),
                      "comparison chain mixes '<' and '>' directions")
        return ast.ChainedCmp(operands, ops, span=span)

    def parse_additive(self) -> ast.Expr:
        left = self.parse_multiplicative()
        while self.current.kind is TokenKind.OPERATOR and self.current.lexeme in ("+", "-"):
            op = self.advance().lexeme
            right = self.parse_multiplicative()
            left = ast.Binary(op, left, right, span=left.span.to(right.span))
        return left

    def parse_multiplicative(self) -> ast.Expr:
        left = self.parse_unary()
        while self.current.kind is TokenKind.OPERATOR and self.current.lexeme in ("*", "/", "%"):
            op = self.advance().lexeme
            right = self.parse_unary()
            left = ast.Binary(op, left, right, span=left.span.to(right.span))
        return left

    def parse_unary(self) -> ast.Expr:
        start = self.current
        if self.accept("!", "-"):
            operand = self.parse_unary()
            return ast.Unary(start.lexeme, operand, span=start.span.to(operand.span))
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.accept("["):
                index = self.parse_expression()
                self.expect("]", "to close array index")
                expr = ast.ArraySelect(expr, index, span=expr.span.to(self.previous.span))
            elif self.check(".") and self.peek().kind is TokenKind.IDENTIFIER:
                self.advance()
                member = self.advance()
                if self.check("("):
                    if not isinstance(expr, ast.Var):
                        self.fail(member.span, "only class names may qualify a call")
                    args = self.parse_arguments()
                    expr = ast.Call(member.lexeme, args, expr.name, span=expr.span.to(self.previous.span))
                elif member.lexeme == "Length":
                    expr = ast.Length(expr, span=expr.span.to(member.span))
                else:
                    self.fail(member.span, f"unknown member '{member.lexeme}'; only '.Length' is supported")
            else:
                return expr

    def parse_arguments(self) -> List[ast.Expr]:
        self.expect("(")
        args: List[ast.Expr] = []
        if not self.check(")"):
            while True:
                args.append(self.parse_expression())
                if not self.accept(","):
                    break
        self.expect(")", "to close argument list")
        return args

    def parse_primary(self) -> ast.Expr:
        token = self.current
        if token.kind is TokenKind.INTEGER:
            self.advance()
            return ast.IntLit(int(token.lexeme), span=token.span)
        if self.accept("true", "false"):
            return ast.BoolLit(token.lexeme == "true", span=token.span)
        if self.accept("null"):
            return ast.NullLit(span=token.span)
        if token.kind is TokenKind.IDENTIFIER:
            self.advance()
            if self.check("("):
                args = self.parse_arguments()
                return ast.Call(token.lexeme, args, span=self.span_from(token))
            return ast.Var(token.lexeme, span=token.span)
        if self.accept("("):
            inner = self.parse_expression()
            self.expect(")", "to close parenthesis")
            # parentheses only group; keep the inner node with the wider span
            inner.span = self.span_from(token)
            return inner
        if self.accept("if"):
            cond = self.parse_expression()
            self.expect("then", "in conditional expression")
            then = self.parse_expression()
            self.expect("else", "in conditional expression")
            else_ = self.parse_expression()
            return ast.IfThenElse(cond, then, else_, span=token.span.to(else_.span))
        if self.accept("forall", "exists"):
            var = self.expect_identifier("bound variable")
            if self.accept(":"):
                bound_type = self.parse_type()
                if bound_type.name != "int":
                    self.fail(bound_type.span, "quantified variables must have type int")
            self.expect("::", "after bound variable")
            body = self.parse_expression()
            return ast.Quantifier(token.lexeme, var.lexeme, body, span=token.span.to(body.span))
        if token.is_keyword("new"):
            self.fail(token.span, "'new' is not supported")
        self.fail(token.span, f"expected an expression, found {token}")


def parse(tokens: List[Token]) -> ast.Program:
    """
    Parse a token list into a Program

    Raises:
        DiagnosticError: with every syntax error found
    """
    parser = Parser(tokens)
    program = parser.parse_program()
    if parser.diagnostics:
        logger.debug(f"{parser.file}: {len(parser.diagnostics)} syntax error(s)")
        raise DiagnosticError(parser.diagnostics)
    return program


def parse_source(source: str, path: str = "<input>") -> ast.Program:
    """tokenize + parse"""
    return parse(tokenize(source, path))
