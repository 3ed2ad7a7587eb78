"""
Static frame checks: reads clauses of functions, modifies clauses of methods
Purely syntactic membership over parameter names
"""
import logging
from typing import Dict, List, Optional, Set

from minidafny.diagnostics import Diagnostic, error, sort_diagnostics
from minidafny.frontend import ast
from minidafny.typecheck.types import TypedProgram

logger = logging.getLogger(__name__)

READS_MESSAGE = "insufficient reads clause to read array element"
MODIFIES_MESSAGE = "assignment may update an array element not in the enclosing context's modifies clause"
CALL_MODIFIES_MESSAGE = "call may violate context's modifies clause"
CALL_READS_MESSAGE = "insufficient reads clause to call function"


def _array_name(expr: ast.Expr) -> Optional[str]:
    return expr.name if isinstance(expr, ast.Var) else None


def callee_frame(callee_frame_names: List[str], params: List[ast.Param],
                 args: List[ast.Expr]) -> List[Optional[str]]:
    """Callee frame names substituted through the call's arguments

    None stands for an argument that is not a plain variable (for example null)
    """
    mapping: Dict[str, ast.Expr] = {p.name: a for p, a in zip(params, args)}
    result: List[Optional[str]] = []
    for name in callee_frame_names:
        arg = mapping.get(name)
        if isinstance(arg, ast.NullLit):
            continue
        result.append(_array_name(arg) if arg is not None else None)
    return result


def _check_function(decl: ast.FunctionDecl, diagnostics: List[Diagnostic]):
    reads: Set[str] = {ref.name for ref in decl.reads}
    for node in ast.walk(decl.body):
        if isinstance(node, (ast.ArraySelect, ast.Length)):
            name = _array_name(node.array)
            if name is None or name not in reads:
                diagnostics.append(error(node.span, "READS_VIOLATION", READS_MESSAGE))
        elif isinstance(node, ast.Call) and isinstance(node.decl, ast.FunctionDecl):
            needed = callee_frame([r.name for r in node.decl.reads], node.decl.ins, node.args)
            if any(name is None or name not in reads for name in needed):
                diagnostics.append(error(node.span, "CALL_FRAME_VIOLATION",
                                         f"{CALL_READS_MESSAGE} '{node.name}'"))


def _check_method(decl: ast.MethodDecl, diagnostics: List[Diagnostic]):
    modifies: Set[str] = {ref.name for ref in decl.modifies}
    for stmt in ast.walk_statements(decl.body):
        if isinstance(stmt, ast.Assign) and isinstance(stmt.lhs, ast.ArraySelect):
            name = _array_name(stmt.lhs.array)
            if name is None or name not in modifies:
                diagnostics.append(error(stmt.lhs.span, "MODIFIES_VIOLATION", MODIFIES_MESSAGE))
        elif isinstance(stmt, ast.MultiAssignCall) and stmt.decl is not None:
            callee = stmt.decl
            needed = callee_frame([r.name for r in callee.modifies], callee.ins, stmt.args)
            if any(name is None or name not in modifies for name in needed):
                diagnostics.append(error(stmt.span, "CALL_FRAME_VIOLATION", CALL_MODIFIES_MESSAGE))


def check_frames(tp: TypedProgram) -> List[Diagnostic]:
    """
    Check reads clauses of functions and modifies clauses of methods

    Returns:
        READS_VIOLATION, MODIFIES_VIOLATION and CALL_FRAME_VIOLATION diagnostics
    """
    diagnostics: List[Diagnostic] = []
    for info in tp.decls.values():
        if isinstance(info.decl, ast.FunctionDecl):
            _check_function(info.decl, diagnostics)
        else:
            _check_method(info.decl, diagnostics)
    if diagnostics:
        logger.debug(f"{len(diagnostics)} frame violation(s)")
    return sort_diagnostics(diagnostics)
