"""
Translation of typed expressions into terms, and their well-formedness obligations
"""
from dataclasses import dataclass
from typing import Callable, List, Optional

from minidafny import formula as F
from minidafny.diagnostics import Span
from minidafny.formula import Term
from minidafny.frontend import ast
from minidafny.ir.commands import ObligationKind
from minidafny.typecheck.types import BOOL, INT, Type, TypedProgram


@dataclass
class Obligation:
    formula: Term
    kind: ObligationKind
    span: Span
    description: str = ""


def sort_of(type_: Optional[Type]) -> str:
    return F.BOOL if type_ == BOOL else F.INT


def heap_for(array_type: Optional[Type]) -> Term:
    elem = array_type.elem if array_type is not None and array_type.is_array else INT
    return F.heap_var(sort_of(elem))


def type_expr_sort(type_expr: ast.TypeExpr) -> str:
    return F.BOOL if type_expr.name == "bool" else F.INT


def function_heaps(decl: ast.FunctionDecl) -> List[Term]:
    """Heap variables a function reads, in a fixed order"""
    reads = {ref.name for ref in decl.reads}
    sorts = set()
    for param in decl.ins:
        if param.name in reads and param.type.name == "array" and param.type.elem is not None:
            sorts.add(type_expr_sort(param.type.elem))
    return [F.heap_var(sort) for sort in (F.INT, F.BOOL) if sort in sorts]


CallHook = Callable[[ast.Call, List[Term], List[str], List[Obligation]], None]


class Translator:
    """Turns expressions into terms; heap reads go through $heap / $heapb"""

    def __init__(self, tp: TypedProgram, call_hook: Optional[CallHook] = None):
        self.tp = tp
        self.call_hook = call_hook

    # -- terms -------------------------------------------------------------------

    def term(self, expr: ast.Expr) -> Term:
        if isinstance(expr, ast.IntLit):
            return F.mk_int(expr.value)
        if isinstance(expr, ast.BoolLit):
            return F.mk_bool(expr.value)
        if isinstance(expr, ast.NullLit):
            return F.NULL
        if isinstance(expr, ast.Var):
            symbol = expr.binding
            return F.mk_var(symbol.unique, sort_of(symbol.type))
        if isinstance(expr, ast.Unary):
            operand = self.term(expr.operand)
            return F.not_(operand) if expr.op == "!" else F.neg(operand)
        if isinstance(expr, ast.Binary):
            return self.binary(expr.op, self.term(expr.left), self.term(expr.right))
        if isinstance(expr, ast.ChainedCmp):
            return self.term(expr.desugar())
        if isinstance(expr, ast.ArraySelect):
            return F.select(heap_for(expr.array.ty), self.term(expr.array), self.term(expr.index))
        if isinstance(expr, ast.Length):
            return F.length(self.term(expr.array))
        if isinstance(expr, ast.IfThenElse):
            return F.ite(self.term(expr.cond), self.term(expr.then), self.term(expr.else_))
        if isinstance(expr, ast.Call):
            return self.application(expr.decl, [self.term(a) for a in expr.args])
        if isinstance(expr, ast.Quantifier):
            return F.quantifier(expr.kind, expr.binding.unique, self.term(expr.body))
        raise TypeError(f"cannot translate {type(expr).__name__}")

    @staticmethod
    def binary(op: str, left: Term, right: Term) -> Term:
        builders = {
            "+": F.add, "-": F.sub, "*": F.mul, "/": F.div, "%": F.mod,
            "<": F.lt, "<=": F.le, ">": F.gt, ">=": F.ge, "==": F.eq, "!=": F.ne,
            "&&": F.and_, "||": F.or_, "==>": F.implies, "<==>": F.iff,
        }
        return builders[op](left, right)

    def application(self, decl: ast.FunctionDecl, args: List[Term]) -> Term:
        return F.app(decl.qualified_name, tuple(args) + tuple(function_heaps(decl)),
                     type_expr_sort(decl.return_type))

    def callee_clause(self, decl: ast.Decl, clause: ast.Expr, args: List[Term]) -> Term:
        """A callee clause with its in-parameters replaced by argument terms"""
        info = self.tp.info(decl)
        mapping = {symbol.unique: arg for symbol, arg in zip(info.params, args)}
        return F.substitute(self.term(clause), mapping)

    # -- well-formedness -----------------------------------------------------------

    def wf(self, expr: ast.Expr) -> List[Obligation]:
        """Obligations making expr safe to evaluate, in evaluation order"""
        out: List[Obligation] = []
        self._wf(expr, [], [], out)
        return out

    def oblige(self, cond: Term, kind: ObligationKind, span: Span, guards: List[Term],
               bound: List[str], out: List[Obligation], description: str = ""):
        formula = F.implies(F.and_(*guards), cond)
        for var in reversed(bound):
            formula = F.forall(var, formula)
        if formula is not F.TRUE:
            out.append(Obligation(formula, kind, span, description))

    def _wf(self, expr: ast.Expr, guards: List[Term], bound: List[str], out: List[Obligation]):
        if isinstance(expr, (ast.IntLit, ast.BoolLit, ast.NullLit, ast.Var)):
            return
        if isinstance(expr, ast.Unary):
            self._wf(expr.operand, guards, bound, out)
        elif isinstance(expr, ast.ChainedCmp):
            self._wf(expr.desugar(), guards, bound, out)
        elif isinstance(expr, ast.Binary):
            self._wf(expr.left, guards, bound, out)
            if expr.op in ("&&", "==>"):
                self._wf(expr.right, guards + [self.term(expr.left)], bound, out)
            elif expr.op == "||":
                self._wf(expr.right, guards + [F.not_(self.term(expr.left))], bound, out)
            else:
                self._wf(expr.right, guards, bound, out)
            if expr.op in ("/", "%"):
                self.oblige(F.ne(self.term(expr.right), F.ZERO), ObligationKind.DIV_BY_ZERO,
                            expr.span, guards, bound, out)
        elif isinstance(expr, ast.ArraySelect):
            self._wf(expr.array, guards, bound, out)
            self._wf(expr.index, guards, bound, out)
            self.array_access(expr.array, expr.index, expr.span, guards, bound, out)
        elif isinstance(expr, ast.Length):
            self._wf(expr.array, guards, bound, out)
            self.oblige(F.ne(self.term(expr.array), F.NULL), ObligationKind.NULL_DEREF,
                        expr.span, guards, bound, out)
        elif isinstance(expr, ast.IfThenElse):
            self._wf(expr.cond, guards, bound, out)
            cond = self.term(expr.cond)
            self._wf(expr.then, guards + [cond], bound, out)
            self._wf(expr.else_, guards + [F.not_(cond)], bound, out)
        elif isinstance(expr, ast.Call):
            for arg in expr.args:
                self._wf(arg, guards, bound, out)
            self.call_obligations(expr, guards, bound, out)
        elif isinstance(expr, ast.Quantifier):
            self._wf(expr.body, guards, bound + [expr.binding.unique], out)
        else:
            raise TypeError(f"cannot check {type(expr).__name__}")

    def array_access(self, array: ast.Expr, index: ast.Expr, span: Span, guards: List[Term],
                     bound: List[str], out: List[Obligation]):
        ref = self.term(array)
        idx = self.term(index)
        self.oblige(F.ne(ref, F.NULL), ObligationKind.NULL_DEREF, span, guards, bound, out)
        self.oblige(F.and_(F.le(F.ZERO, idx), F.lt(idx, F.length(ref))),
                    ObligationKind.INDEX_IN_BOUNDS, span, guards, bound, out)

    def call_obligations(self, call: ast.Call, guards: List[Term], bound: List[str],
                         out: List[Obligation]):
        decl = call.decl
        args = [self.term(a) for a in call.args]
        for arg_expr, arg, param in zip(call.args, args, decl.ins):
            if param.type.name == "nat" and arg_expr.ty == INT:
                self.oblige(F.ge(arg, F.ZERO), ObligationKind.NAT_NON_NEGATIVE, arg_expr.span,
                            guards, bound, out)
        for clause in decl.requires:
            self.oblige(self.callee_clause(decl, clause, args), ObligationKind.PRECONDITION_AT_CALL,
                        call.span, guards, bound, out)
        if self.call_hook is not None:
            self.call_hook(call, guards, bound, out)
