"""
Termination of recursive methods and functions
"""
import logging
from typing import Dict, List, Optional

from minidafny.diagnostics import DiagnosticError, error
from minidafny.frontend import ast
from minidafny.ir.lower import RECURSIVE_CALL_DESCRIPTION, lower_function, lower_method
from minidafny.typecheck.types import TypedProgram
from minidafny.vcgen.callgraph import CallGraph
from minidafny.vcgen.inline import FunctionDef
from minidafny.vcgen.wp import VerificationCondition, generate_vcs

logger = logging.getLogger(__name__)


def check_function_termination(decl: ast.Decl, callgraph: CallGraph, tp: TypedProgram,
                               table: Optional[Dict[str, FunctionDef]] = None,
                               fuel: int = 2) -> List[VerificationCondition]:
    """
    Termination VCs for the recursive call sites of decl

    Each call to a member of decl's call cycle must satisfy
    `D >= 0 && D_callee[args] < D`, D being decl's decreases expression.

    Returns:
        Empty list for non-recursive declarations

    Raises:
        DiagnosticError: MISSING_DECREASES when decl is recursive without a decreases clause
    """
    name = decl.qualified_name
    if not callgraph.is_recursive(name):
        return []
    if decl.decreases is None:
        kind = "function" if isinstance(decl, ast.FunctionDecl) else "method"
        raise DiagnosticError([error(decl.span, "MISSING_DECREASES",
                                     f"cannot prove termination of recursive {kind} '{decl.name}'; "
                                     f"add a decreases clause")])
    lower = lower_function if isinstance(decl, ast.FunctionDecl) else lower_method
    graph = lower(decl, tp, callgraph, termination=True)
    vcs = [vc for vc in generate_vcs(graph, table, fuel)
           if vc.description == RECURSIVE_CALL_DESCRIPTION]
    logger.debug(f"{name}: {len(vcs)} recursive call site(s)")
    return vcs
