"""
Concrete re-execution of a declaration under a counterexample model

The interpreter follows the same cut points as the guarded-command graph the
failed condition came from: a loop whose havocked names occur in the
condition starts from the model's state and runs one iteration, a call whose
outputs occur in it takes its results from the model. Everything else runs
concretely. The first obligation that fails decides the outcome.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from minidafny import formula as F
from minidafny.diagnostics import ReplayError, Span
from minidafny.frontend import ast
from minidafny.ir.commands import GuardedCommandGraph, LoopCut, ObligationKind
from minidafny.ir.decreases import guess_decreases
from minidafny.ir.lower import RECURSIVE_CALL_DESCRIPTION, lower_function, lower_method
from minidafny.prover.evaluate import MAX_RANGE
from minidafny.prover.verdict import Model
from minidafny.replay.values import (
    ArrayRef, Confirmed, NotReproduced, ReplayOutcome, StepLimit, Value, same_value,
)
from minidafny.typecheck.types import BOOL, INT, NAT, Symbol, Type, TypedProgram, needs_nat_check
from minidafny.vcgen.callgraph import CallGraph, build_callgraph
from minidafny.vcgen.wp import VerificationCondition

logger = logging.getLogger(__name__)

DEFAULT_STEP_LIMIT = 10 ** 6

_ARITHMETIC = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": same_value,
    "!=": lambda a, b: not same_value(a, b),
    "<==>": lambda a, b: a == b,
}
_FLIPPED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}


class _Failed(Exception):
    """A proof obligation is false in the concrete state"""

    def __init__(self, kind: ObligationKind, span: Span, depth: int):
        super().__init__(f"{kind.value} at {span.start_line}:{span.start_col}")
        self.kind = kind
        self.span = span
        self.depth = depth


class _Blocked(Exception):
    """An assumption of the path is false in the concrete state"""


class _PathEnd(Exception):
    pass


class _Break(Exception):
    pass


class _OutOfSteps(Exception):
    pass


@dataclass
class _Frame:
    decl: ast.Decl
    env: Dict[str, Value]
    depth: int


def _heap_name(elem: Type) -> str:
    return F.HEAPB_VAR if elem == BOOL else F.HEAP_VAR


def _default(type_: Type) -> Value:
    if type_.is_array:
        return None
    return False if type_ == BOOL else 0


def _conjuncts(expr: ast.Expr) -> List[ast.Expr]:
    if isinstance(expr, ast.ChainedCmp):
        return _conjuncts(expr.desugar())
    if isinstance(expr, ast.Binary) and expr.op == "&&":
        return _conjuncts(expr.left) + _conjuncts(expr.right)
    return [expr]


def _range_guards(q: ast.Quantifier) -> List[ast.Expr]:
    if q.kind == "exists":
        return _conjuncts(q.body)
    guards: List[ast.Expr] = []
    body = q.body
    while isinstance(body, ast.Binary) and body.op == "==>":
        guards.extend(_conjuncts(body.left))
        body = body.right
    return guards


def _is_bound(expr: ast.Expr, binding) -> bool:
    return isinstance(expr, ast.Var) and expr.binding is binding


def _mentions(expr: ast.Expr, binding) -> bool:
    return any(_is_bound(node, binding) for node in ast.walk(expr))


def _bounds(guard: ast.Expr, binding) -> List[Tuple[str, ast.Expr, int]]:
    """("low", e, k): var >= e + k;  ("high", e, k): var < e + k"""
    if not isinstance(guard, ast.Binary) or guard.op not in _FLIPPED:
        return []
    left, op, right = guard.left, guard.op, guard.right
    if not _is_bound(left, binding):
        left, op, right = right, _FLIPPED[op], left
    if not _is_bound(left, binding) or _mentions(right, binding):
        return []
    if op == ">=":
        return [("low", right, 0)]
    if op == ">":
        return [("low", right, 1)]
    if op == "<":
        return [("high", right, 0)]
    if op == "<=":
        return [("high", right, 1)]
    return [("low", right, 0), ("high", right, 1)]


def obligation_sites(expr: ast.Expr) -> List[Tuple[ObligationKind, Span]]:
    """Obligations evaluating expr can fail, in the order they are checked"""
    sites: List[Tuple[ObligationKind, Span]] = []

    def visit(node: ast.Expr):
        if isinstance(node, ast.ChainedCmp):
            visit(node.desugar())
        elif isinstance(node, ast.Binary):
            visit(node.left)
            visit(node.right)
            if node.op in ("/", "%"):
                sites.append((ObligationKind.DIV_BY_ZERO, node.span))
        elif isinstance(node, ast.Unary):
            visit(node.operand)
        elif isinstance(node, ast.ArraySelect):
            visit(node.array)
            visit(node.index)
            sites.append((ObligationKind.NULL_DEREF, node.span))
            sites.append((ObligationKind.INDEX_IN_BOUNDS, node.span))
        elif isinstance(node, ast.Length):
            visit(node.array)
            sites.append((ObligationKind.NULL_DEREF, node.span))
        elif isinstance(node, ast.IfThenElse):
            visit(node.cond)
            visit(node.then)
            visit(node.else_)
        elif isinstance(node, ast.Call):
            for arg in node.args:
                visit(arg)
            for arg, param in zip(node.args, node.decl.ins):
                if param.type.name == "nat" and arg.ty == INT:
                    sites.append((ObligationKind.NAT_NON_NEGATIVE, arg.span))
            sites.append((ObligationKind.PRECONDITION_AT_CALL, node.span))
            sites.append((ObligationKind.TERMINATION_DECREASES, node.span))
        elif isinstance(node, ast.Quantifier):
            visit(node.body)

    visit(expr)
    return sites


class Interpreter:
    """Big-step interpreter for one replay; not reusable"""

    def __init__(self, tp: TypedProgram, model: Model, vc: VerificationCondition,
                 graph: GuardedCommandGraph, callgraph: Optional[CallGraph], step_limit: int):
        self.tp = tp
        self.model = model
        self.vc = vc
        self.callgraph = callgraph
        self.step_limit = step_limit
        self.steps = 0
        self.arrays: Dict[Tuple[int, str], ArrayRef] = {}
        self.symbol_tables: Dict[str, Dict[str, Symbol]] = {}
        self.termination = (vc.kind is ObligationKind.TERMINATION_DECREASES
                            and vc.description == RECURSIVE_CALL_DESCRIPTION)
        self.loop_cuts: Dict[Span, LoopCut] = {
            cut.span: cut for cut in graph.loops if self.modelled(cut.havoc.values())}
        self.call_sites = {
            site.span: site for site in graph.calls
            if self.modelled(list(site.outs.values()) + list(site.heaps.values()))}
        self.used: Set[Span] = set()

    def modelled(self, names) -> bool:
        return any(name in self.vc.symbols for name in names)

    def tick(self):
        self.steps += 1
        if self.steps > self.step_limit:
            raise _OutOfSteps()

    # -- model values --------------------------------------------------------------

    def array(self, ref: int, elem: Type, heap: str) -> Optional[ArrayRef]:
        if ref == F.NULL_VALUE:
            return None
        key = (ref, elem.kind)
        found = self.arrays.get(key)
        if found is None:
            length = self.model.length(ref)
            if length > MAX_RANGE:
                raise ReplayError(f"array of length {length} is too large to replay")
            found = ArrayRef(ref, elem.kind, [self.model.read(heap, ref, i) for i in range(length)])
            self.arrays[key] = found
        return found

    def model_value(self, name: str, type_: Type) -> Value:
        if type_.is_array:
            return self.array(int(self.model.scalars.get(name, F.NULL_VALUE)), type_.elem,
                              _heap_name(type_.elem))
        if type_ == BOOL:
            return bool(self.model.scalars.get(name, False))
        return int(self.model.scalars.get(name, 0))

    def load_rows(self, array: Optional[ArrayRef], heap: str):
        if array is not None:
            array.elements[:] = [self.model.read(heap, array.ref, i) for i in range(array.length)]

    def symbols(self, decl: ast.Decl) -> Dict[str, Symbol]:
        table = self.symbol_tables.get(decl.qualified_name)
        if table is None:
            table = {symbol.unique: symbol for symbol in self.tp.info(decl).symbols}
            self.symbol_tables[decl.qualified_name] = table
        return table

    def enter(self, decl: ast.Decl, args: List[Value], depth: int) -> _Frame:
        info = self.tp.info(decl)
        env = {symbol.unique: arg for symbol, arg in zip(info.params, args)}
        for out in info.outs:
            env[out.unique] = _default(out.type)
        return _Frame(decl, env, depth)

    def initial_frame(self, decl: ast.Decl) -> _Frame:
        info = self.tp.info(decl)
        env = {symbol.unique: self.model_value(symbol.unique, symbol.type)
               for symbol in info.params + info.outs}
        return _Frame(decl, env, 0)

    # -- checks ---------------------------------------------------------------------

    @staticmethod
    def oblige(holds: bool, kind: ObligationKind, span: Span, frame: _Frame):
        if not holds:
            raise _Failed(kind, span, frame.depth)

    def nat_check(self, value: Value, source: Optional[Type], target: Type, span: Span, frame: _Frame):
        if needs_nat_check(source, target):
            self.oblige(value >= 0, ObligationKind.NAT_NON_NEGATIVE, span, frame)

    def access(self, array: Optional[ArrayRef], index: int, span: Span, frame: _Frame):
        self.oblige(array is not None, ObligationKind.NULL_DEREF, span, frame)
        self.oblige(0 <= index < array.length, ObligationKind.INDEX_IN_BOUNDS, span, frame)

    def settle(self, expr: ast.Expr, frame: _Frame, what: str) -> Value:
        """Value of an expression the path uses without checking its definedness"""
        try:
            return self.eval(expr, _Frame(frame.decl, frame.env, frame.depth + 1))
        except _Failed:
            raise _Blocked(f"{what} is not defined in the concrete state")

    def quiet(self, expr: ast.Expr, frame: _Frame) -> Optional[Value]:
        try:
            return self.eval(expr, _Frame(frame.decl, frame.env, frame.depth + 1))
        except (_Failed, ReplayError):
            return None

    def recursion_check(self, callee: ast.Decl, args: List[Value], span: Span, frame: _Frame):
        if not self.termination or frame.depth != 0:
            return
        caller = frame.decl
        if not self.callgraph.same_cycle(caller.qualified_name, callee.qualified_name):
            return
        if caller.decreases is None or callee.decreases is None:
            return
        measure = self.settle(caller.decreases, frame, "the decreases expression")
        callee_measure = self.settle(callee.decreases, self.enter(callee, args, 0),
                                     "the callee's decreases expression")
        self.oblige(measure >= 0 and callee_measure < measure,
                    ObligationKind.TERMINATION_DECREASES, span, frame)

    # -- expressions ------------------------------------------------------------------

    def eval(self, expr: ast.Expr, frame: _Frame) -> Value:
        if isinstance(expr, (ast.IntLit, ast.BoolLit)):
            return expr.value
        if isinstance(expr, ast.NullLit):
            return None
        if isinstance(expr, ast.Var):
            try:
                return frame.env[expr.binding.unique]
            except KeyError:
                raise ReplayError(f"'{expr.name}' has no value")
        if isinstance(expr, ast.Unary):
            operand = self.eval(expr.operand, frame)
            return (not operand) if expr.op == "!" else -operand
        if isinstance(expr, ast.ChainedCmp):
            return self.eval(expr.desugar(), frame)
        if isinstance(expr, ast.Binary):
            return self.binary(expr, frame)
        if isinstance(expr, ast.ArraySelect):
            array = self.eval(expr.array, frame)
            index = self.eval(expr.index, frame)
            self.access(array, index, expr.span, frame)
            return array.elements[index]
        if isinstance(expr, ast.Length):
            array = self.eval(expr.array, frame)
            self.oblige(array is not None, ObligationKind.NULL_DEREF, expr.span, frame)
            return array.length
        if isinstance(expr, ast.IfThenElse):
            if self.eval(expr.cond, frame):
                return self.eval(expr.then, frame)
            return self.eval(expr.else_, frame)
        if isinstance(expr, ast.Call):
            return self.call_function(expr, frame)
        if isinstance(expr, ast.Quantifier):
            return self.quantifier(expr, frame)
        raise ReplayError(f"cannot evaluate {type(expr).__name__}")

    def binary(self, expr: ast.Binary, frame: _Frame) -> Value:
        op = expr.op
        left = self.eval(expr.left, frame)
        if op == "&&":
            return bool(left) and bool(self.eval(expr.right, frame))
        if op == "||":
            return bool(left) or bool(self.eval(expr.right, frame))
        if op == "==>":
            return (not left) or bool(self.eval(expr.right, frame))
        right = self.eval(expr.right, frame)
        if op in ("/", "%"):
            self.oblige(right != 0, ObligationKind.DIV_BY_ZERO, expr.span, frame)
            quotient, remainder = F.euclid_divmod(left, right)
            return quotient if op == "/" else remainder
        return _ARITHMETIC[op](left, right)

    def call_function(self, call: ast.Call, frame: _Frame) -> Value:
        callee: ast.FunctionDecl = call.decl
        args = [self.eval(arg, frame) for arg in call.args]
        for arg_expr, arg, param in zip(call.args, args, callee.ins):
            if param.type.name == "nat" and arg_expr.ty == INT:
                self.oblige(arg >= 0, ObligationKind.NAT_NON_NEGATIVE, arg_expr.span, frame)
        inner = self.enter(callee, args, frame.depth + 1)
        for clause in callee.requires:
            self.oblige(self.eval(clause, inner), ObligationKind.PRECONDITION_AT_CALL, call.span, frame)
        self.recursion_check(callee, args, call.span, frame)
        self.tick()
        return self.eval(callee.body, inner)

    def quantifier_values(self, q: ast.Quantifier, frame: _Frame) -> Optional[range]:
        """Values of the bound variable where the body is not trivially decided; None if unknown"""
        lows: List[int] = []
        highs: List[int] = []
        for guard in _range_guards(q):
            for side, bound, shift in _bounds(guard, q.binding):
                value = self.quiet(bound, frame)
                if isinstance(value, bool) or not isinstance(value, int):
                    continue
                (lows if side == "low" else highs).append(value + shift)
        if not lows or not highs:
            lengths = []
            for node in ast.walk(q.body):
                if (isinstance(node, ast.ArraySelect) and _is_bound(node.index, q.binding)
                        and not _mentions(node.array, q.binding)):
                    array = self.quiet(node.array, frame)
                    if isinstance(array, ArrayRef):
                        lengths.append(array.length)
            if not lengths:
                return None
            lows = lows or [0]
            highs = highs or [max(lengths)]
        lo, hi = max(lows), min(highs)
        if hi - lo > MAX_RANGE:
            raise ReplayError(f"range of '{q.var}' is too wide to enumerate")
        return range(lo, max(lo, hi))

    def quantifier(self, q: ast.Quantifier, frame: _Frame) -> bool:
        var = q.binding.unique
        universal = q.kind == "forall"
        result = universal
        failures: List[_Failed] = []
        saved = frame.env.get(var)
        values = self.quantifier_values(q, frame)
        try:
            if values is None:
                # a failure at any single point is a genuine failure
                frame.env[var] = 0
                self.eval(q.body, frame)
                raise ReplayError(f"cannot enumerate the range of '{q.var}'")
            for value in values:
                frame.env[var] = value
                try:
                    holds = bool(self.eval(q.body, frame))
                except _Failed as failed:
                    failures.append(failed)
                    continue
                if holds != universal:
                    result = holds
        finally:
            if saved is None:
                frame.env.pop(var, None)
            else:
                frame.env[var] = saved
        if failures:
            sites = obligation_sites(q.body)

            def position(failed: _Failed) -> int:
                site = (failed.kind, failed.span)
                if failed.depth == frame.depth and site in sites:
                    return sites.index(site)
                return len(sites)

            raise min(failures, key=position)
        return result

    # -- statements ---------------------------------------------------------------------

    def run_block(self, block: ast.Block, frame: _Frame):
        for stmt in block.stmts:
            self.run_stmt(stmt, frame)

    def run_stmt(self, stmt: ast.Stmt, frame: _Frame):
        self.tick()
        if isinstance(stmt, ast.VarDecl):
            symbol = stmt.binding
            if stmt.init is not None:
                value = self.eval(stmt.init, frame)
                self.nat_check(value, stmt.init.ty, symbol.type, stmt.init.span, frame)
                frame.env[symbol.unique] = value
            elif symbol.unique not in frame.env:
                frame.env[symbol.unique] = (self.model_value(symbol.unique, symbol.type)
                                            if frame.depth == 0 else _default(symbol.type))
        elif isinstance(stmt, ast.Assign):
            self.assign(stmt, frame)
        elif isinstance(stmt, ast.MultiAssignCall):
            self.call_method(stmt, frame)
        elif isinstance(stmt, ast.If):
            if self.eval(stmt.cond, frame):
                self.run_block(stmt.then, frame)
            elif stmt.else_ is not None:
                self.run_block(stmt.else_, frame)
        elif isinstance(stmt, ast.While):
            self.run_loop(stmt, frame)
        elif isinstance(stmt, ast.Assert):
            self.oblige(self.eval(stmt.expr, frame), ObligationKind.ASSERT_STMT, stmt.span, frame)
        elif isinstance(stmt, ast.Break):
            raise _Break()
        else:
            raise ReplayError(f"cannot execute {type(stmt).__name__}")

    def assign(self, stmt: ast.Assign, frame: _Frame):
        if isinstance(stmt.lhs, ast.Var):
            value = self.eval(stmt.rhs, frame)
            self.nat_check(value, stmt.rhs.ty, stmt.lhs.binding.type, stmt.rhs.span, frame)
            frame.env[stmt.lhs.binding.unique] = value
            return
        target = stmt.lhs
        array = self.eval(target.array, frame)
        index = self.eval(target.index, frame)
        self.access(array, index, target.span, frame)
        array.elements[index] = self.eval(stmt.rhs, frame)

    def modifies_arrays(self, decl: ast.Decl, heap: str, values: List[Value]) -> List[Optional[ArrayRef]]:
        """Arguments bound to decl's modifies parameters stored in `heap`"""
        modifies = {ref.name for ref in getattr(decl, "modifies", [])}
        return [value for param, value in zip(decl.ins, values)
                if param.name in modifies and param.type.name == "array"
                and _heap_name(BOOL if param.type.elem.name == "bool" else INT) == heap]

    def havoc(self, cut: LoopCut, frame: _Frame):
        """Move to the state the model gives for an arbitrary iteration"""
        table = self.symbols(frame.decl)
        params = [frame.env.get(symbol.unique) for symbol in self.tp.info(frame.decl).params]
        for name, fresh in cut.havoc.items():
            if name in (F.HEAP_VAR, F.HEAPB_VAR):
                for array in self.modifies_arrays(frame.decl, name, params):
                    self.load_rows(array, fresh)
            elif fresh in self.model.scalars or name not in frame.env:
                frame.env[name] = self.model_value(fresh, table[name].type)

    def run_loop(self, loop: ast.While, frame: _Frame):
        for inv in loop.invariants:
            self.oblige(self.eval(inv, frame), ObligationKind.LOOP_INV_ENTRY, inv.span, frame)
        measure = loop.decreases if loop.decreases is not None else guess_decreases(loop)
        measure_span = measure.span if loop.decreases is not None else loop.guard.span
        cut = self.loop_cuts.get(loop.span) if frame.depth == 0 else None
        modular = cut is not None and loop.span not in self.used
        if modular:
            self.used.add(loop.span)
            self.havoc(cut, frame)
        while True:
            self.tick()
            for inv in loop.invariants:
                if not self.eval(inv, frame):
                    raise _Blocked(f"loop invariant at {inv.span.start_line}:{inv.span.start_col} "
                                   f"does not hold in the model state")
            if measure is not None:
                self.eval(measure, frame)
            if not self.eval(loop.guard, frame):
                return
            bound = None
            if measure is not None:
                bound = self.eval(measure, frame)
                self.oblige(bound >= 0, ObligationKind.TERMINATION_BOUNDED, measure_span, frame)
            try:
                self.run_block(loop.body, frame)
            except _Break:
                return
            for inv in loop.invariants:
                self.oblige(self.eval(inv, frame), ObligationKind.LOOP_INV_MAINTAINED, inv.span, frame)
            if measure is not None:
                self.oblige(self.eval(measure, frame) < bound, ObligationKind.TERMINATION_DECREASES,
                            measure_span, frame)
            if modular:
                raise _PathEnd()

    def call_method(self, stmt: ast.MultiAssignCall, frame: _Frame):
        callee: ast.MethodDecl = stmt.decl
        info = self.tp.info(callee)
        args = [self.eval(arg, frame) for arg in stmt.args]
        for arg_expr, arg, param in zip(stmt.args, args, info.params):
            self.nat_check(arg, arg_expr.ty, param.type, arg_expr.span, frame)
        self.recursion_check(callee, args, stmt.span, frame)
        inner = self.enter(callee, args, frame.depth + 1)
        for clause in callee.requires:
            self.oblige(self.eval(clause, inner), ObligationKind.PRECONDITION_AT_CALL, stmt.span, frame)

        site = self.call_sites.get(stmt.span) if frame.depth == 0 else None
        if site is not None and stmt.span not in self.used:
            self.used.add(stmt.span)
            for out in info.outs:
                inner.env[out.unique] = self.model_value(site.outs[out.name], out.type)
            for heap, fresh in site.heaps.items():
                for array in self.modifies_arrays(callee, heap, args):
                    self.load_rows(array, fresh)
        else:
            self.run_block(callee.body, inner)
            for clause in callee.ensures:
                self.oblige(self.eval(clause, inner), ObligationKind.POSTCONDITION, clause.span, inner)
        for clause in callee.ensures:
            if not self.eval(clause, inner):
                raise _Blocked(f"postcondition of '{callee.name}' does not hold after the call")

        spans = stmt.lhs_spans or [stmt.span] * len(info.outs)
        for symbol, out, span in zip(stmt.bindings, info.outs, spans):
            value = inner.env[out.unique]
            self.nat_check(value, out.type, symbol.type, span, frame)
            frame.env[symbol.unique] = value

    # -- declarations ----------------------------------------------------------------------

    def run(self, decl: ast.Decl):
        frame = self.initial_frame(decl)
        for clause in decl.requires:
            if not self.eval(clause, frame):
                raise _Blocked("precondition does not hold in the model")
        if isinstance(decl, ast.FunctionDecl):
            result = self.eval(decl.body, frame)
            if decl.return_type.name == "nat":
                self.nat_check(result, decl.body.ty, NAT, decl.body.span, frame)
        else:
            self.run_block(decl.body, frame)
        for clause in decl.ensures:
            self.oblige(self.eval(clause, frame), ObligationKind.POSTCONDITION, clause.span, frame)


def replay(decl: ast.Decl, model: Model, vc: VerificationCondition, tp: TypedProgram,
           graph: Optional[GuardedCommandGraph] = None, callgraph: Optional[CallGraph] = None,
           step_limit: int = DEFAULT_STEP_LIMIT) -> ReplayOutcome:
    """
    Execute decl under a counterexample model and check that vc's obligation fails

    Args:
        decl: method or function the condition belongs to
        model: counterexample from the prover
        vc: the failed verification condition
        tp: typed program holding decl
        graph: decl's guarded-command graph; lowered again when omitted
        callgraph: needed for recursive-call termination conditions
        step_limit: statements, iterations and calls executed before giving up

    Returns:
        Confirmed when the first failing obligation is vc's own,
        NotReproduced when the run passes it or fails elsewhere first,
        StepLimit when the run does not finish in time
    """
    if graph is None:
        graph = lower_function(decl, tp) if isinstance(decl, ast.FunctionDecl) else lower_method(decl, tp)
    if callgraph is None and vc.description == RECURSIVE_CALL_DESCRIPTION:
        callgraph = build_callgraph(tp)
    params = tp.info(decl).params
    if not model.scalars and any(symbol.unique in vc.symbols for symbol in params):
        return NotReproduced("incomplete model")

    interpreter = Interpreter(tp, model, vc, graph, callgraph, step_limit)
    outcome: ReplayOutcome
    try:
        interpreter.run(decl)
        outcome = NotReproduced("execution finished without a failure")
    except _Failed as failed:
        if failed.depth == 0 and failed.kind is vc.kind and failed.span == vc.span:
            outcome = Confirmed(vc.kind, vc.span)
        else:
            where = "in a callee" if failed.depth else f"at {failed.span.start_line}:{failed.span.start_col}"
            outcome = NotReproduced(f"{failed.kind.value} {where} failed first")
    except _Blocked as exc:
        outcome = NotReproduced(str(exc))
    except _PathEnd:
        outcome = NotReproduced("path reached the loop back edge without a failure")
    except (_OutOfSteps, RecursionError):
        outcome = StepLimit(interpreter.steps)
    except ReplayError as exc:
        outcome = NotReproduced(str(exc))
    logger.debug(f"replay {vc.method} vc {vc.id} {vc.kind.value}: {outcome}")
    return outcome
