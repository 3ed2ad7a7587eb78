"""
Ghost usage: specification-only entities must stay out of compiled code
"""
import logging
from typing import List

from minidafny.diagnostics import Diagnostic, error, sort_diagnostics
from minidafny.frontend import ast
from minidafny.typecheck.types import TypedProgram

logger = logging.getLogger(__name__)


class _GhostChecker:
    def __init__(self):
        self.diagnostics: List[Diagnostic] = []

    def compiled(self, expr: ast.Expr):
        """Report ghost entities in an expression evaluated by compiled code"""
        stack = [expr]
        while stack:
            node = stack.pop()
            if isinstance(node, ast.Quantifier):
                continue
            if isinstance(node, ast.Call) and isinstance(node.decl, ast.FunctionDecl):
                if not node.decl.is_function_method:
                    self.diagnostics.append(error(
                        node.span, "GHOST_IN_COMPILED",
                        f"ghost function '{node.name}' can only be used in specifications; "
                        f"declare it as 'function method' to call it here"))
            if isinstance(node, ast.Var) and node.binding is not None and node.binding.ghost:
                self.diagnostics.append(error(
                    node.span, "GHOST_IN_COMPILED",
                    f"ghost variable '{node.name}' can only be used in specifications or ghost assignments"))
            stack.extend(ast.children(node))

    def block(self, block: ast.Block):
        for stmt in block.stmts:
            self.stmt(stmt)

    def stmt(self, stmt: ast.Stmt):
        if isinstance(stmt, ast.VarDecl):
            if stmt.init is not None and not stmt.ghost:
                self.compiled(stmt.init)
        elif isinstance(stmt, ast.Assign):
            target = stmt.lhs.binding if isinstance(stmt.lhs, ast.Var) else None
            if target is not None and target.ghost:
                return
            if isinstance(stmt.lhs, ast.ArraySelect):
                self.compiled(stmt.lhs)
            self.compiled(stmt.rhs)
        elif isinstance(stmt, ast.MultiAssignCall):
            if stmt.bindings and all(symbol.ghost for symbol in stmt.bindings):
                return
            decl = stmt.decl
            for k, arg in enumerate(stmt.args):
                if decl is not None and k < len(decl.ins) and decl.ins[k].ghost:
                    continue
                self.compiled(arg)
        elif isinstance(stmt, ast.If):
            self.compiled(stmt.cond)
            self.block(stmt.then)
            if stmt.else_ is not None:
                self.block(stmt.else_)
        elif isinstance(stmt, ast.While):
            self.compiled(stmt.guard)
            self.block(stmt.body)


def check_ghost_usage(tp: TypedProgram) -> List[Diagnostic]:
    """
    Check that plain functions and ghost variables appear only in
    specification positions (requires/ensures/invariant/decreases/assert,
    quantifier bodies), ghost assignments, or function bodies

    Returns:
        GHOST_IN_COMPILED diagnostics, empty when the rules hold
    """
    checker = _GhostChecker()
    for info in tp.decls.values():
        if isinstance(info.decl, ast.MethodDecl):
            checker.block(info.decl.body)
    if checker.diagnostics:
        logger.debug(f"{len(checker.diagnostics)} ghost usage violation(s)")
    return sort_diagnostics(checker.diagnostics)
