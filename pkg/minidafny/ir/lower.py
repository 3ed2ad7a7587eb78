"""
Lowering of typed methods and functions to acyclic guarded-command graphs
"""
import logging
from typing import Dict, List, Optional

from minidafny import formula as F
from minidafny.diagnostics import Span, error
from minidafny.formula import Term
from minidafny.frontend import ast
from minidafny.ir.commands import (
    Assert, AssignVar, Assume, Block, CallSite, Command, GuardedCommandGraph, Havoc,
    HeapStore, LoopCut, ObligationKind, SymbolInfo,
)
from minidafny.ir.decreases import guess_decreases
from minidafny.ir.translate import (
    Obligation, Translator, function_heaps, heap_for, sort_of, type_expr_sort,
)
from minidafny.typecheck.types import NAT, SymbolKind, Type, TypedProgram, needs_nat_check

logger = logging.getLogger(__name__)

MISSING_DECREASES_MESSAGE = "cannot prove termination; add a decreases clause"
RECURSIVE_CALL_DESCRIPTION = "cannot prove termination of this recursive call"


def symbol_info(type_: Type) -> SymbolInfo:
    if type_.is_array:
        return SymbolInfo(F.INT, array_elem=sort_of(type_.elem))
    return SymbolInfo(sort_of(type_), nat=type_ == NAT)


def _snapshot_info(type_: Type) -> SymbolInfo:
    info = symbol_info(type_)
    return SymbolInfo(info.sort, array_elem=info.array_elem)


def _heap_info(heap: str) -> SymbolInfo:
    return SymbolInfo(F.HEAPB if heap == F.HEAPB_VAR else F.HEAP)


def _elem_heap(type_expr: ast.TypeExpr) -> str:
    return F.heap_var(type_expr_sort(type_expr.elem)).value


class _Lowering:
    """Builds one graph; a fresh instance per declaration"""

    def __init__(self, decl: ast.Decl, tp: TypedProgram, callgraph=None, termination: bool = False):
        self.decl = decl
        self.tp = tp
        self.info = tp.info(decl)
        self.callgraph = callgraph
        self.termination = termination
        self.translator = Translator(tp, call_hook=self.recursive_call if termination else None)
        self.blocks: Dict[str, Block] = {}
        self.symbols: Dict[str, SymbolInfo] = {
            F.HEAP_VAR: SymbolInfo(F.HEAP),
            F.HEAPB_VAR: SymbolInfo(F.HEAPB),
        }
        for symbol in self.info.symbols:
            if symbol.kind is not SymbolKind.BOUND:
                self.symbols[symbol.unique] = symbol_info(symbol.type)
        self.graph = GuardedCommandGraph(decl.qualified_name, "entry", self.blocks, self.symbols, decl)
        self.counter = 0
        self.loop_count = 0
        self.call_count = 0
        self.break_targets: List[str] = []
        self.current: Optional[Block] = self.new_block("entry")

    # -- plumbing ----------------------------------------------------------------

    def new_block(self, prefix: str) -> Block:
        if prefix == "entry":
            label = prefix
        else:
            self.counter += 1
            label = f"{prefix}{self.counter}"
        block = Block(label)
        self.blocks[label] = block
        return block

    def jump(self, target: Block):
        if self.current is not None:
            self.current.successors.append(target.label)

    def emit(self, command: Command):
        self.current.commands.append(command)

    def oblige(self, obligations: List[Obligation]):
        for obligation in obligations:
            self.emit(Assert(obligation.formula, obligation.kind, obligation.span, obligation.description))
            self.emit(Assume(obligation.formula))

    def check(self, expr: ast.Expr):
        self.oblige(self.translator.wf(expr))

    def term(self, expr: ast.Expr) -> Term:
        return self.translator.term(expr)

    def assert_then_assume(self, formula: Term, kind: ObligationKind, span: Span, description: str = ""):
        self.emit(Assert(formula, kind, span, description))
        self.emit(Assume(formula))

    def nat_check(self, value: Term, source: Optional[Type], target: Optional[Type], span: Span):
        if needs_nat_check(source, target):
            self.assert_then_assume(F.ge(value, F.ZERO), ObligationKind.NAT_NON_NEGATIVE, span)

    def fresh(self, name: str, info: SymbolInfo) -> str:
        self.symbols[name] = info
        return name

    # -- termination of recursive calls --------------------------------------------

    def recursion_obligation(self, callee: ast.Decl, args: List[Term]) -> Optional[Term]:
        if self.callgraph is None or not self.callgraph.same_cycle(self.decl.qualified_name,
                                                                   callee.qualified_name):
            return None
        if self.decl.decreases is None or callee.decreases is None:
            return None
        measure = self.term(self.decl.decreases)
        callee_measure = self.translator.callee_clause(callee, callee.decreases, args)
        return F.and_(F.ge(measure, F.ZERO), F.lt(callee_measure, measure))

    def recursive_call(self, call: ast.Call, guards: List[Term], bound: List[str],
                       out: List[Obligation]):
        condition = self.recursion_obligation(call.decl, [self.term(a) for a in call.args])
        if condition is not None:
            self.translator.oblige(condition, ObligationKind.TERMINATION_DECREASES, call.span,
                                   guards, bound, out, RECURSIVE_CALL_DESCRIPTION)

    # -- declarations --------------------------------------------------------------

    def lower_method(self) -> GuardedCommandGraph:
        decl: ast.MethodDecl = self.decl
        for clause in decl.requires:
            self.check(clause)
            self.emit(Assume(self.term(clause)))
        self.lower_block(decl.body)
        if self.current is not None:
            for clause in decl.ensures:
                self.check(clause)
                self.assert_then_assume(self.term(clause), ObligationKind.POSTCONDITION, clause.span)
        return self.graph

    def lower_function(self) -> GuardedCommandGraph:
        decl: ast.FunctionDecl = self.decl
        for clause in decl.requires:
            self.check(clause)
            self.emit(Assume(self.term(clause)))
        self.check(decl.body)
        result = self.term(decl.body)
        if decl.return_type.name == "nat":
            self.nat_check(result, decl.body.ty, NAT, decl.body.span)
        for clause in decl.ensures:
            self.check(clause)
            self.assert_then_assume(self.term(clause), ObligationKind.POSTCONDITION, clause.span)
        params = tuple(F.mk_var(symbol.unique, sort_of(symbol.type)) for symbol in self.info.params)
        self.graph.self_app = F.app(decl.qualified_name, params + tuple(function_heaps(decl)),
                                    type_expr_sort(decl.return_type))
        return self.graph

    # -- statements ----------------------------------------------------------------

    def lower_block(self, block: ast.Block):
        for stmt in block.stmts:
            if self.current is None:
                logger.debug(f"{self.graph.name}: unreachable statement at {stmt.span}")
                return
            self.lower_stmt(stmt)

    def lower_stmt(self, stmt: ast.Stmt):
        if isinstance(stmt, ast.VarDecl):
            if stmt.init is not None:
                self.check(stmt.init)
                value = self.term(stmt.init)
                self.nat_check(value, stmt.init.ty, stmt.binding.type, stmt.init.span)
                self.emit(AssignVar(stmt.binding.unique, value))
        elif isinstance(stmt, ast.Assign):
            self.lower_assign(stmt)
        elif isinstance(stmt, ast.MultiAssignCall):
            self.lower_call(stmt)
        elif isinstance(stmt, ast.If):
            self.lower_if(stmt)
        elif isinstance(stmt, ast.While):
            self.lower_while(stmt)
        elif isinstance(stmt, ast.Assert):
            self.check(stmt.expr)
            self.assert_then_assume(self.term(stmt.expr), ObligationKind.ASSERT_STMT, stmt.span)
        elif isinstance(stmt, ast.Break):
            self.jump(self.blocks[self.break_targets[-1]])
            self.current = None
        else:
            raise TypeError(f"cannot lower {type(stmt).__name__}")

    def lower_assign(self, stmt: ast.Assign):
        if isinstance(stmt.lhs, ast.Var):
            self.check(stmt.rhs)
            value = self.term(stmt.rhs)
            self.nat_check(value, stmt.rhs.ty, stmt.lhs.binding.type, stmt.rhs.span)
            self.emit(AssignVar(stmt.lhs.binding.unique, value))
            return
        target = stmt.lhs
        self.check(target.array)
        self.check(target.index)
        obligations: List[Obligation] = []
        self.translator.array_access(target.array, target.index, target.span, [], [], obligations)
        self.oblige(obligations)
        self.check(stmt.rhs)
        heap = heap_for(target.array.ty)
        self.emit(HeapStore(heap.value, self.term(target.array), self.term(target.index),
                            self.term(stmt.rhs)))

    def lower_call(self, stmt: ast.MultiAssignCall):
        callee: ast.MethodDecl = stmt.decl
        callee_info = self.tp.info(callee)
        self.call_count += 1
        k = self.call_count
        for arg in stmt.args:
            self.check(arg)
        args = [self.term(arg) for arg in stmt.args]
        for arg_expr, arg, param in zip(stmt.args, args, callee_info.params):
            self.nat_check(arg, arg_expr.ty, param.type, arg_expr.span)
        if self.termination:
            condition = self.recursion_obligation(callee, args)
            if condition is not None:
                self.emit(Assert(condition, ObligationKind.TERMINATION_DECREASES, stmt.span,
                                 RECURSIVE_CALL_DESCRIPTION))

        snapshots: Dict[str, str] = {}
        mapping: Dict[str, Term] = {}
        for param, arg in zip(callee_info.params, args):
            snap = self.fresh(f"{param.unique}$call{k}", _snapshot_info(param.type))
            snapshots[param.name] = snap
            mapping[param.unique] = F.mk_var(snap, sort_of(param.type))
            self.emit(AssignVar(snap, arg))
        for clause in callee.requires:
            self.assert_then_assume(F.substitute(self.term(clause), mapping),
                                    ObligationKind.PRECONDITION_AT_CALL, stmt.span)

        outs: Dict[str, str] = {}
        temps: List[Term] = []
        havoc = []
        for out in callee_info.outs:
            temp = self.fresh(f"{out.unique}$call{k}", symbol_info(out.type))
            outs[out.name] = temp
            temps.append(F.mk_var(temp, sort_of(out.type)))
            mapping[out.unique] = temps[-1]
            havoc.append((temp, temp, sort_of(out.type)))

        heaps: Dict[str, str] = {}
        effects = self.callee_heap_effects(callee, mapping)
        for heap in effects:
            fresh = self.fresh(f"{heap}$call{k}", _heap_info(heap))
            heaps[heap] = fresh
            havoc.append((fresh, fresh, _heap_info(heap).sort))
        if havoc:
            self.emit(Havoc(havoc))
        for heap, refs in effects.items():
            sort = _heap_info(heap).sort
            self.emit(AssignVar(heap, F.frame(F.mk_var(heap, sort), F.mk_var(heaps[heap], sort), refs)))

        for clause in callee.ensures:
            self.emit(Assume(F.substitute(self.term(clause), mapping)))
        for symbol, out, temp, span in zip(stmt.bindings, callee_info.outs, temps,
                                           stmt.lhs_spans or [stmt.span] * len(temps)):
            self.nat_check(temp, out.type, symbol.type, span)
            self.emit(AssignVar(symbol.unique, temp))
        self.graph.calls.append(CallSite(k, stmt.span, callee.qualified_name, snapshots, outs, heaps))

    def callee_heap_effects(self, callee: ast.MethodDecl, mapping: Dict[str, Term]) -> Dict[str, tuple]:
        """Heap variable -> references (after argument substitution) the callee may write"""
        modifies = {ref.name for ref in callee.modifies}
        effects: Dict[str, list] = {}
        info = self.tp.info(callee)
        for param, symbol in zip(callee.ins, info.params):
            if param.name in modifies and param.type.name == "array":
                effects.setdefault(_elem_heap(param.type), []).append(mapping[symbol.unique])
        return {heap: tuple(refs) for heap, refs in sorted(effects.items())}

    def lower_if(self, stmt: ast.If):
        self.check(stmt.cond)
        cond = self.term(stmt.cond)
        then_block = self.new_block("then")
        else_block = self.new_block("else")
        join = self.new_block("join")
        self.jump(then_block)
        self.jump(else_block)
        reaches_join = False
        for block, assumption, body in ((then_block, cond, stmt.then),
                                        (else_block, F.not_(cond), stmt.else_)):
            self.current = block
            self.emit(Assume(assumption))
            if body is not None:
                self.lower_block(body)
            if self.current is not None:
                self.jump(join)
                reaches_join = True
        self.current = join if reaches_join else None

    def loop_targets(self, loop: ast.While) -> Dict[str, SymbolInfo]:
        """Variables and heaps the loop body may change"""
        targets: Dict[str, SymbolInfo] = {}
        for stmt in ast.walk_statements(loop.body):
            if isinstance(stmt, ast.VarDecl):
                targets[stmt.binding.unique] = symbol_info(stmt.binding.type)
            elif isinstance(stmt, ast.Assign):
                if isinstance(stmt.lhs, ast.Var):
                    targets[stmt.lhs.binding.unique] = symbol_info(stmt.lhs.binding.type)
                else:
                    heap = heap_for(stmt.lhs.array.ty).value
                    targets[heap] = _heap_info(heap)
            elif isinstance(stmt, ast.MultiAssignCall):
                for symbol in stmt.bindings:
                    targets[symbol.unique] = symbol_info(symbol.type)
                for param in stmt.decl.ins:
                    if param.name in {ref.name for ref in stmt.decl.modifies}:
                        heap = _elem_heap(param.type)
                        targets[heap] = _heap_info(heap)
        return dict(sorted(targets.items()))

    def frame_refs(self, heap: str) -> tuple:
        """The enclosing method's modifies references stored in `heap`"""
        refs = []
        modifies = {ref.name for ref in getattr(self.decl, "modifies", [])}
        for param, symbol in zip(self.decl.ins, self.info.params):
            if param.name in modifies and _elem_heap(param.type) == heap:
                refs.append(F.mk_var(symbol.unique, F.INT))
        return tuple(refs)

    def lower_while(self, loop: ast.While):
        self.loop_count += 1
        n = self.loop_count
        for inv in loop.invariants:
            self.check(inv)
            self.emit(Assert(self.term(inv), ObligationKind.LOOP_INV_ENTRY, inv.span))

        havoc_map: Dict[str, str] = {}
        havoc = []
        heap_frames = []
        for name, info in self.loop_targets(loop).items():
            fresh = self.fresh(f"{name}$loop{n}", info)
            havoc_map[name] = fresh
            if info.sort in (F.HEAP, F.HEAPB):
                havoc.append((fresh, fresh, info.sort))
                heap_frames.append(AssignVar(name, F.frame(F.mk_var(name, info.sort),
                                                           F.mk_var(fresh, info.sort),
                                                           self.frame_refs(name))))
            else:
                havoc.append((name, fresh, info.sort))
        decreases_var = self.fresh(f"$decr{n}", SymbolInfo(F.INT))
        self.graph.loops.append(LoopCut(n, loop.span, havoc_map, decreases_var))

        head = self.new_block("head")
        self.jump(head)
        self.current = head
        if havoc:
            self.emit(Havoc(havoc))
        for command in heap_frames:
            self.emit(command)
        for inv in loop.invariants:
            self.check(inv)
            self.emit(Assume(self.term(inv)))

        measure = loop.decreases if loop.decreases is not None else guess_decreases(loop)
        if measure is None:
            self.graph.diagnostics.append(error(loop.span, "MISSING_DECREASES", MISSING_DECREASES_MESSAGE))
        else:
            self.check(measure)
        self.check(loop.guard)
        guard = self.term(loop.guard)

        body = self.new_block("body")
        exit_block = self.new_block("exit")
        join = self.new_block("after")
        self.jump(body)
        self.jump(exit_block)

        self.current = body
        self.emit(Assume(guard))
        measure_span = measure.span if loop.decreases is not None else loop.guard.span
        if measure is not None:
            self.emit(Assert(F.ge(self.term(measure), F.ZERO), ObligationKind.TERMINATION_BOUNDED,
                             measure_span))
            self.emit(AssignVar(decreases_var, self.term(measure)))
        self.break_targets.append(join.label)
        self.lower_block(loop.body)
        self.break_targets.pop()
        if self.current is not None:
            for inv in loop.invariants:
                self.check(inv)
                self.emit(Assert(self.term(inv), ObligationKind.LOOP_INV_MAINTAINED, inv.span))
            if measure is not None:
                self.check(measure)
                self.emit(Assert(F.lt(self.term(measure), F.mk_var(decreases_var)),
                                 ObligationKind.TERMINATION_DECREASES, measure_span))
            # back edge cut

        self.current = exit_block
        self.emit(Assume(F.not_(guard)))
        self.jump(join)
        self.current = join


def lower_method(m: ast.MethodDecl, tp: TypedProgram, callgraph=None,
                 termination: bool = False) -> GuardedCommandGraph:
    """
    Lower a typed method to its guarded-command graph

    Args:
        m: method declaration from tp
        tp: typed program
        callgraph: call graph, needed only with termination
        termination: also assert decreases at recursive call sites

    Returns:
        Acyclic block graph with entry block "entry"
    """
    graph = _Lowering(m, tp, callgraph, termination).lower_method()
    logger.debug(f"lowered {graph.name}: {len(graph.blocks)} blocks, {len(graph.asserts())} asserts")
    return graph


def lower_function(f: ast.FunctionDecl, tp: TypedProgram, callgraph=None,
                   termination: bool = False) -> GuardedCommandGraph:
    """Lower a function's own proof obligations (body definedness, nat result, ensures)"""
    return _Lowering(f, tp, callgraph, termination).lower_function()


def format_graph(graph: GuardedCommandGraph) -> str:
    """One `label: cmd; cmd -> succ, succ` line per reachable block"""
    lines = [f"graph {graph.name}"]
    for label in graph.topological_order():
        block = graph.blocks[label]
        commands = "; ".join(command.format() for command in block.commands)
        successors = ", ".join(block.successors) if block.successors else "."
        lines.append(f"  {label}: {commands} -> {successors}")
    return "\n".join(lines)
