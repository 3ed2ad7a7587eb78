"""
Termination measures guessed from loop guards
"""
from typing import Optional

from minidafny.frontend import ast
from minidafny.typecheck.types import INT


def _difference(minuend: ast.Expr, subtrahend: ast.Expr, span) -> ast.Expr:
    return ast.Binary("-", minuend, subtrahend, span=span, ty=INT)


def guess_decreases(loop: ast.While) -> Optional[ast.Expr]:
    """
    Guess a decreases expression from a comparison guard

    Args:
        loop: while statement without an explicit decreases clause

    Returns:
        B - A for `A < B` / `A <= B`, A - B for `A > B` / `A >= B`, otherwise None
    """
    guard = loop.guard
    if not isinstance(guard, ast.Binary):
        return None
    if guard.left.ty is not None and not guard.left.ty.is_int:
        return None
    if guard.op in ("<", "<="):
        return _difference(guard.right, guard.left, guard.span)
    if guard.op in (">", ">="):
        return _difference(guard.left, guard.right, guard.span)
    return None
