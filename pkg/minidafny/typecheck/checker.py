"""
Name resolution and type checking
"""
import copy
import logging
from typing import Dict, List, Optional

from minidafny.diagnostics import Diagnostic, DiagnosticError, Span, error, warning
from minidafny.frontend import ast
from minidafny.typecheck.types import (
    BOOL, INT, NAT, NULL, DeclInfo, Symbol, SymbolKind, Type, TypedProgram,
    array_of, assignable, comparable, join,
)

logger = logging.getLogger(__name__)

ARITHMETIC = ("+", "-", "*", "/", "%")
ORDERING = ("<", "<=", ">", ">=")


class _Scope:
    def __init__(self, parent: Optional["_Scope"] = None):
        self.parent = parent
        self.names: Dict[str, Symbol] = {}

    def lookup(self, name: str) -> Optional[Symbol]:
        scope = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None


class TypeChecker:
    """Resolves names, assigns types and rewrites method-call assignments"""

    def __init__(self, program: ast.Program):
        self.program = program
        self.diagnostics: List[Diagnostic] = []
        self.warnings: List[Diagnostic] = []
        self.namespaces: Dict[Optional[str], Dict[str, ast.Decl]] = {None: {}}
        self.decls: Dict[str, DeclInfo] = {}
        # per-declaration state
        self.info: Optional[DeclInfo] = None
        self.class_name: Optional[str] = None
        self.used: Dict[str, int] = {}
        self.param_names: set = set()

    def report(self, span: Span, code: str, message: str):
        self.diagnostics.append(error(span, code, message))

    # -- program ---------------------------------------------------------------

    def run(self) -> TypedProgram:
        self.collect_declarations()
        for decl in self.program.declarations():
            if decl.qualified_name in self.decls and self.decls[decl.qualified_name].decl is decl:
                self.check_declaration(decl)
        if self.diagnostics:
            raise DiagnosticError(self.diagnostics)
        return TypedProgram(self.program, self.decls, self.warnings)

    def collect_declarations(self):
        for cls in self.program.classes:
            if cls.name in self.namespaces:
                self.report(cls.span, "DUPLICATE_NAME", f"duplicate class '{cls.name}'")
                continue
            self.namespaces[cls.name] = {}
            for member in cls.members:
                self.add_declaration(cls.name, member)
        for member in self.program.members:
            self.add_declaration(None, member)

    def add_declaration(self, namespace: Optional[str], decl: ast.Decl):
        table = self.namespaces[namespace]
        if decl.name in table:
            self.report(decl.span, "DUPLICATE_NAME", f"duplicate declaration of '{decl.name}'")
            return
        table[decl.name] = decl
        self.decls[decl.qualified_name] = DeclInfo(decl)

    def resolve_callee(self, name: str, qualifier: Optional[str], span: Span) -> Optional[ast.Decl]:
        if qualifier is not None:
            table = self.namespaces.get(qualifier)
            if table is None:
                self.report(span, "UNKNOWN_IDENTIFIER", f"unknown class '{qualifier}'")
                return None
            decl = table.get(name)
        else:
            decl = self.namespaces.get(self.class_name, {}).get(name) or self.namespaces[None].get(name)
        if decl is None:
            self.report(span, "UNKNOWN_IDENTIFIER", f"unknown function or method '{name}'")
        return decl

    # -- types and symbols -------------------------------------------------------

    def resolve_type(self, type_expr: ast.TypeExpr) -> Optional[Type]:
        name = type_expr.name
        if name == "int":
            return INT
        if name == "nat":
            return NAT
        if name == "bool":
            return BOOL
        if name == "array":
            if type_expr.elem is None:
                self.report(type_expr.span, "TYPE_MISMATCH", "array type needs an element type")
                return None
            elem = self.resolve_type(type_expr.elem)
            if elem is None:
                return None
            if elem not in (INT, BOOL):
                self.report(type_expr.span, "UNSUPPORTED", "array element type must be int or bool")
                return None
            return array_of(elem)
        if name in ("object", "set", "seq", "char", "string", "real"):
            self.report(type_expr.span, "UNSUPPORTED", f"type '{name}' is not supported")
            return None
        self.report(type_expr.span, "UNKNOWN_IDENTIFIER", f"unknown type '{name}'")
        return None

    def unique_name(self, name: str) -> str:
        if name not in self.used:
            self.used[name] = 0
            return name
        self.used[name] += 1
        return f"{name}${self.used[name]}"

    def declare(self, scope: _Scope, name: str, kind: SymbolKind, type_: Type, span: Span,
                ghost: bool = False) -> Symbol:
        if name in scope.names or (kind is SymbolKind.LOCAL and name in self.param_names):
            self.report(span, "DUPLICATE_NAME", f"duplicate variable name '{name}'")
        symbol = Symbol(name, self.unique_name(name), kind, type_, ghost, span)
        scope.names[name] = symbol
        self.info.symbols.append(symbol)
        return symbol

    # -- declarations ------------------------------------------------------------

    def check_declaration(self, decl: ast.Decl):
        self.info = self.decls[decl.qualified_name]
        self.class_name = decl.class_name
        self.used = {}
        self.param_names = set()
        params_scope = _Scope()
        for param in decl.ins:
            type_ = self.resolve_type(param.type) or INT
            self.info.params.append(self.declare(params_scope, param.name, SymbolKind.IN_PARAM, type_,
                                                 param.span, param.ghost))
            self.param_names.add(param.name)
        if isinstance(decl, ast.MethodDecl):
            self.check_method(decl, params_scope)
        else:
            self.check_function(decl, params_scope)

    def check_frame_names(self, refs: List[ast.FrameRef], clause: str):
        for ref in refs:
            symbol = next((s for s in self.info.params if s.name == ref.name), None)
            if symbol is None:
                self.report(ref.span, "UNKNOWN_IDENTIFIER",
                            f"unknown identifier '{ref.name}' in {clause} clause")
            elif not symbol.type.is_array:
                self.report(ref.span, "TYPE_MISMATCH", f"{clause} clause must name an array parameter")

    def check_method(self, decl: ast.MethodDecl, params_scope: _Scope):
        outs_scope = _Scope(params_scope)
        for param in decl.outs:
            if param.name in self.param_names:
                self.report(param.span, "DUPLICATE_NAME",
                            f"out-parameter '{param.name}' has the same name as an in-parameter")
            type_ = self.resolve_type(param.type) or INT
            self.info.outs.append(self.declare(outs_scope, param.name, SymbolKind.OUT_PARAM, type_,
                                               param.span, param.ghost))
        self.param_names |= {p.name for p in decl.outs}
        for clause in decl.requires:
            self.expect_type(clause, params_scope, BOOL, "precondition")
        for clause in decl.ensures:
            self.expect_type(clause, outs_scope, BOOL, "postcondition")
        if decl.decreases is not None:
            self.expect_int(decl.decreases, params_scope, "decreases expression")
        self.check_frame_names(decl.modifies, "modifies")
        if decl.reads:
            self.warnings.append(warning(decl.reads[0].span, "READS_ON_METHOD",
                                         "reads clauses on methods are ignored; methods may read any memory location"))
        self.check_block(decl.body, _Scope(outs_scope))

    def check_function(self, decl: ast.FunctionDecl, params_scope: _Scope):
        return_type = self.resolve_type(decl.return_type) or INT
        for clause in decl.requires:
            self.expect_type(clause, params_scope, BOOL, "precondition")
        for clause in decl.ensures:
            self.expect_type(clause, params_scope, BOOL, "postcondition")
        if decl.decreases is not None:
            self.expect_int(decl.decreases, params_scope, "decreases expression")
        self.check_frame_names(decl.reads, "reads")
        body_type = self.expr(decl.body, params_scope)
        if body_type is not None and not assignable(body_type, return_type):
            self.report(decl.body.span, "TYPE_MISMATCH",
                        f"function body has type {body_type}, expected {return_type}")

    # -- statements --------------------------------------------------------------

    def check_block(self, block: ast.Block, scope: _Scope):
        rewritten: List[ast.Stmt] = []
        for stmt in block.stmts:
            rewritten.extend(self.check_stmt(stmt, scope))
        block.stmts = rewritten

    def check_stmt(self, stmt: ast.Stmt, scope: _Scope) -> List[ast.Stmt]:
        if isinstance(stmt, ast.VarDecl):
            return self.check_var_decl(stmt, scope)
        if isinstance(stmt, ast.Assign):
            return self.check_assign(stmt, scope)
        if isinstance(stmt, ast.MultiAssignCall):
            return self.check_call_stmt(stmt, scope)
        if isinstance(stmt, ast.If):
            self.expect_type(stmt.cond, scope, BOOL, "condition")
            self.check_block(stmt.then, _Scope(scope))
            if stmt.else_ is not None:
                self.check_block(stmt.else_, _Scope(scope))
        elif isinstance(stmt, ast.While):
            self.expect_type(stmt.guard, scope, BOOL, "loop guard")
            for inv in stmt.invariants:
                self.expect_type(inv, scope, BOOL, "loop invariant")
            if stmt.decreases is not None:
                self.expect_int(stmt.decreases, scope, "decreases expression")
            self.check_block(stmt.body, _Scope(scope))
        elif isinstance(stmt, ast.Assert):
            self.expect_type(stmt.expr, scope, BOOL, "assertion")
        return [stmt]

    def method_callee(self, expr: Optional[ast.Expr]) -> Optional[ast.MethodDecl]:
        if not isinstance(expr, ast.Call):
            return None
        table = (self.namespaces.get(expr.qualifier) if expr.qualifier is not None
                 else {**self.namespaces[None], **self.namespaces.get(self.class_name, {})})
        decl = (table or {}).get(expr.name)
        return decl if isinstance(decl, ast.MethodDecl) else None

    def check_var_decl(self, stmt: ast.VarDecl, scope: _Scope) -> List[ast.Stmt]:
        if self.method_callee(stmt.init) is not None:
            call = stmt.init
            converted = ast.MultiAssignCall([stmt.name], call.name, call.args, call.qualifier,
                                            declares=True, ghost=stmt.ghost, lhs_spans=[stmt.span],
                                            span=stmt.span)
            return self.check_call_stmt(converted, scope, annotations=[stmt.type])

        declared = self.resolve_type(stmt.type) if stmt.type is not None else None
        init_type = self.expr(stmt.init, scope) if stmt.init is not None else None
        if declared is not None:
            var_type = declared
            if init_type is not None and not assignable(init_type, declared):
                self.report(stmt.init.span, "TYPE_MISMATCH",
                            f"cannot initialize '{stmt.name}' of type {declared} with {init_type}")
        elif stmt.init is not None:
            var_type = self.infer_type(stmt, init_type)
        else:
            if stmt.type is None:
                self.report(stmt.span, "TYPE_MISMATCH",
                            f"variable '{stmt.name}' needs a type or an initializer")
            var_type = INT
        stmt.binding = self.declare(scope, stmt.name, SymbolKind.LOCAL, var_type, stmt.span, stmt.ghost)
        return [stmt]

    def infer_type(self, stmt: ast.VarDecl, init_type: Optional[Type]) -> Type:
        if init_type is None:
            return INT
        if init_type == NULL:
            self.report(stmt.span, "TYPE_MISMATCH", f"cannot infer the type of '{stmt.name}' from null")
            return INT
        if init_type == NAT:
            # only a non-negative literal makes an inferred nat
            return NAT if isinstance(stmt.init, ast.IntLit) else INT
        return init_type

    def check_assign(self, stmt: ast.Assign, scope: _Scope) -> List[ast.Stmt]:
        if self.method_callee(stmt.rhs) is not None:
            if not isinstance(stmt.lhs, ast.Var):
                self.report(stmt.rhs.span, "METHOD_IN_EXPRESSION",
                            "a method call result must be assigned to variables")
                return [stmt]
            call = stmt.rhs
            converted = ast.MultiAssignCall([stmt.lhs.name], call.name, call.args, call.qualifier,
                                            lhs_spans=[stmt.lhs.span], span=stmt.span)
            return self.check_call_stmt(converted, scope)

        target_type: Optional[Type] = None
        if isinstance(stmt.lhs, ast.Var):
            symbol = self.assignable_symbol(stmt.lhs.name, stmt.lhs.span, scope)
            if symbol is not None:
                stmt.lhs.binding = symbol
                stmt.lhs.ty = symbol.type
                target_type = symbol.type
        else:
            if not isinstance(stmt.lhs.array, ast.Var):
                self.report(stmt.lhs.span, "TYPE_MISMATCH", "array assignment target must be an array variable")
            target_type = self.expr(stmt.lhs, scope)
        rhs_type = self.expr(stmt.rhs, scope)
        if target_type is not None and rhs_type is not None and not assignable(rhs_type, target_type):
            self.report(stmt.rhs.span, "TYPE_MISMATCH", f"cannot assign {rhs_type} to {target_type}")
        return [stmt]

    def assignable_symbol(self, name: str, span: Span, scope: _Scope) -> Optional[Symbol]:
        symbol = scope.lookup(name)
        if symbol is None:
            self.report(span, "UNKNOWN_IDENTIFIER", f"unknown identifier '{name}'")
            return None
        if symbol.kind is SymbolKind.IN_PARAM:
            self.report(span, "ASSIGN_TO_INPUT", "cannot assign to input parameter")
            return None
        return symbol

    def check_call_stmt(self, stmt: ast.MultiAssignCall, scope: _Scope,
                        annotations: Optional[List[Optional[ast.TypeExpr]]] = None) -> List[ast.Stmt]:
        decl = self.resolve_callee(stmt.method, stmt.qualifier, stmt.span)
        for arg in stmt.args:
            self.expr(arg, scope)
        if decl is None:
            return [stmt]
        if not isinstance(decl, ast.MethodDecl):
            self.report(stmt.span, "TYPE_MISMATCH",
                        f"function '{decl.name}' cannot be called as a statement")
            return [stmt]
        stmt.decl = decl
        self.check_arguments(decl, stmt.args, stmt.span)
        out_types = [self.resolve_type_quiet(p.type) for p in decl.outs]
        if len(stmt.lhs) != len(decl.outs) and (stmt.lhs or stmt.declares):
            self.report(stmt.span, "ARITY_MISMATCH",
                        f"method '{decl.name}' returns {len(decl.outs)} value(s), "
                        f"but {len(stmt.lhs)} target(s) given")
            return [stmt]
        if len(set(stmt.lhs)) != len(stmt.lhs):
            self.report(stmt.span, "DUPLICATE_NAME", "the same variable is assigned twice by one call")

        result: List[ast.Stmt] = []
        spans = stmt.lhs_spans or [stmt.span] * len(stmt.lhs)
        if stmt.declares:
            annotations = annotations or [None] * len(stmt.lhs)
            for name, out_type, annotation, span in zip(stmt.lhs, out_types, annotations, spans):
                var_type = self.resolve_type(annotation) if annotation is not None else out_type
                var_type = var_type or INT
                if out_type is not None and not assignable(out_type, var_type):
                    self.report(span, "TYPE_MISMATCH", f"cannot assign {out_type} to {var_type}")
                local = ast.VarDecl(name, annotation, None, stmt.ghost, span=span)
                local.binding = self.declare(scope, name, SymbolKind.LOCAL, var_type, span, stmt.ghost)
                result.append(local)
            stmt.declares = False

        bindings: List[Symbol] = []
        for name, out_type, span in zip(stmt.lhs, out_types, spans):
            symbol = self.assignable_symbol(name, span, scope)
            if symbol is None:
                continue
            if out_type is not None and not assignable(out_type, symbol.type):
                self.report(span, "TYPE_MISMATCH", f"cannot assign {out_type} to {symbol.type}")
            bindings.append(symbol)
        stmt.bindings = bindings
        result.append(stmt)
        return result

    def resolve_type_quiet(self, type_expr: ast.TypeExpr) -> Optional[Type]:
        # errors in the callee's signature are reported when the callee is checked
        saved = len(self.diagnostics)
        resolved = self.resolve_type(type_expr)
        del self.diagnostics[saved:]
        return resolved

    def check_arguments(self, decl: ast.Decl, args: List[ast.Expr], span: Span):
        kind = "method" if isinstance(decl, ast.MethodDecl) else "function"
        if len(args) != len(decl.ins):
            self.report(span, "ARITY_MISMATCH",
                        f"{kind} '{decl.name}' expects {len(decl.ins)} argument(s), got {len(args)}")
            return
        for arg, param in zip(args, decl.ins):
            param_type = self.resolve_type_quiet(param.type)
            if arg.ty is not None and param_type is not None and not assignable(arg.ty, param_type):
                self.report(arg.span, "TYPE_MISMATCH",
                            f"argument for '{param.name}' has type {arg.ty}, expected {param_type}")

    # -- expressions -------------------------------------------------------------

    def expect_type(self, expr: ast.Expr, scope: _Scope, expected: Type, what: str):
        actual = self.expr(expr, scope)
        if actual is not None and not assignable(actual, expected):
            self.report(expr.span, "TYPE_MISMATCH", f"{what} must be {expected}, got {actual}")

    def expect_int(self, expr: ast.Expr, scope: _Scope, what: str):
        actual = self.expr(expr, scope)
        if actual is not None and not actual.is_int:
            self.report(expr.span, "TYPE_MISMATCH", f"{what} must be an integer, got {actual}")

    def expr(self, expr: ast.Expr, scope: _Scope) -> Optional[Type]:
        result = self._expr(expr, scope)
        expr.ty = result
        return result

    def _expr(self, expr: ast.Expr, scope: _Scope) -> Optional[Type]:
        if isinstance(expr, ast.IntLit):
            return NAT
        if isinstance(expr, ast.BoolLit):
            return BOOL
        if isinstance(expr, ast.NullLit):
            return NULL
        if isinstance(expr, ast.Var):
            symbol = scope.lookup(expr.name)
            if symbol is None:
                self.report(expr.span, "UNKNOWN_IDENTIFIER", f"unknown identifier '{expr.name}'")
                return None
            expr.binding = symbol
            return symbol.type
        if isinstance(expr, ast.Unary):
            operand = self.expr(expr.operand, scope)
            if operand is None:
                return None
            if expr.op == "!":
                if operand != BOOL:
                    self.report(expr.span, "TYPE_MISMATCH", f"operator '!' expects bool, got {operand}")
                return BOOL
            if not operand.is_int:
                self.report(expr.span, "TYPE_MISMATCH", f"operator '-' expects int, got {operand}")
            return INT
        if isinstance(expr, ast.Binary):
            return self.binary(expr, scope)
        if isinstance(expr, ast.ChainedCmp):
            types = [self.expr(operand, scope) for operand in expr.operands]
            for operand, type_ in zip(expr.operands, types):
                if type_ is not None and not type_.is_int:
                    self.report(operand.span, "TYPE_MISMATCH", f"comparison expects int operands, got {type_}")
            return BOOL
        if isinstance(expr, ast.ArraySelect):
            array = self.expr(expr.array, scope)
            index = self.expr(expr.index, scope)
            if index is not None and not index.is_int:
                self.report(expr.index.span, "TYPE_MISMATCH", f"array index must be int, got {index}")
            if array is None:
                return None
            if not array.is_array:
                self.report(expr.span, "NOT_AN_ARRAY", f"indexing requires an array, got {array}")
                return None
            return array.elem
        if isinstance(expr, ast.Length):
            array = self.expr(expr.array, scope)
            if array is not None and not array.is_array:
                self.report(expr.span, "NOT_AN_ARRAY", f"'.Length' requires an array, got {array}")
            return NAT
        if isinstance(expr, ast.IfThenElse):
            self.expect_type(expr.cond, scope, BOOL, "condition")
            then = self.expr(expr.then, scope)
            else_ = self.expr(expr.else_, scope)
            if then is None or else_ is None:
                return None
            joined = join(then, else_)
            if joined is None:
                self.report(expr.span, "TYPE_MISMATCH", f"branches have different types: {then} and {else_}")
            return joined
        if isinstance(expr, ast.Call):
            return self.call(expr, scope)
        if isinstance(expr, ast.Quantifier):
            inner = _Scope(scope)
            expr.binding = self.declare(inner, expr.var, SymbolKind.BOUND, INT, expr.span)
            self.expect_type(expr.body, inner, BOOL, "quantifier body")
            return BOOL
        raise TypeError(f"unexpected expression {type(expr).__name__}")

    def binary(self, expr: ast.Binary, scope: _Scope) -> Optional[Type]:
        left = self.expr(expr.left, scope)
        right = self.expr(expr.right, scope)
        if left is None or right is None:
            return BOOL if expr.op not in ARITHMETIC else INT
        op = expr.op
        if op in ARITHMETIC:
            if not (left.is_int and right.is_int):
                self.report(expr.span, "TYPE_MISMATCH",
                            f"operator '{op}' expects int operands, got {left} and {right}")
            return INT
        if op in ORDERING:
            if not (left.is_int and right.is_int):
                self.report(expr.span, "TYPE_MISMATCH",
                            f"operator '{op}' expects int operands, got {left} and {right}")
            return BOOL
        if op in ("==", "!="):
            if not comparable(left, right):
                self.report(expr.span, "TYPE_MISMATCH", f"cannot compare {left} with {right}")
            return BOOL
        if left != BOOL or right != BOOL:
            self.report(expr.span, "TYPE_MISMATCH",
                        f"operator '{op}' expects bool operands, got {left} and {right}")
        return BOOL

    def call(self, expr: ast.Call, scope: _Scope) -> Optional[Type]:
        for arg in expr.args:
            self.expr(arg, scope)
        decl = self.resolve_callee(expr.name, expr.qualifier, expr.span)
        if decl is None:
            return None
        if isinstance(decl, ast.MethodDecl):
            self.report(expr.span, "METHOD_IN_EXPRESSION",
                        f"method '{decl.name}' cannot be called in an expression")
            return None
        expr.decl = decl
        self.check_arguments(decl, expr.args, expr.span)
        return self.resolve_type_quiet(decl.return_type)


def resolve_and_check(program: ast.Program) -> TypedProgram:
    """
    Resolve names and check types

    The input program is left untouched; the returned TypedProgram holds an
    annotated copy in which `x := M(...)` and `var x := M(...)` have become
    MultiAssignCall statements.

    Raises:
        DiagnosticError: on any resolution or typing error
    """
    checker = TypeChecker(copy.deepcopy(program))
    typed = checker.run()
    logger.debug(f"{program.file}: resolved {len(typed.decls)} declaration(s)")
    return typed
