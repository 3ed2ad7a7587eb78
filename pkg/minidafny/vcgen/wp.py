"""
Weakest preconditions over guarded-command graphs
One verification condition per Assert; every other Assert acts as an Assume
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from minidafny import formula as F
from minidafny.diagnostics import Span
from minidafny.formula import Term, format_term
from minidafny.ir.commands import (
    Assert, AssignVar, Assume, Command, GuardedCommandGraph, Havoc, HeapStore,
    ObligationKind, SymbolInfo,
)
from minidafny.vcgen.inline import FunctionDef, inline_functions

logger = logging.getLogger(__name__)


@dataclass
class VerificationCondition:
    """
    Validity of `formula` (free symbols read as universally quantified
    constants constrained by `prelude`) implies the obligation holds
    """
    id: int
    method: str
    kind: ObligationKind
    formula: Term
    span: Span
    description: str
    symbols: Dict[str, SymbolInfo] = field(default_factory=dict)
    prelude: List[Term] = field(default_factory=list)

    def closed_formula(self) -> Term:
        return F.implies(F.and_(*self.prelude), self.formula)

    def refresh(self, formula: Term, symbols: Dict[str, SymbolInfo]) -> "VerificationCondition":
        """Same obligation over a rewritten formula, symbols and prelude recomputed"""
        table = {name: symbols.get(name, SymbolInfo(sort)) for name, sort in sorted(F.symbols(formula).items())}
        return VerificationCondition(self.id, self.method, self.kind, formula, self.span,
                                     self.description, table, typing_facts(table))


def typing_facts(symbols: Dict[str, SymbolInfo]) -> List[Term]:
    """nat symbols are non-negative; non-null arrays have non-negative length"""
    facts: List[Term] = []
    for name, info in symbols.items():
        var = F.mk_var(name, info.sort)
        if info.nat:
            facts.append(F.ge(var, F.ZERO))
        if info.array_elem is not None:
            facts.append(F.implies(F.ne(var, F.NULL), F.ge(F.length(var), F.ZERO)))
    return facts


def wp_command(command: Command, post: Term) -> Term:
    """wp of one command; Asserts are read as Assumes here"""
    if isinstance(command, (Assume, Assert)):
        return F.implies(command.formula, post)
    if isinstance(command, AssignVar):
        return F.substitute(post, {command.name: command.term})
    if isinstance(command, HeapStore):
        sort = F.HEAPB if command.heap == F.HEAPB_VAR else F.HEAP
        heap = F.mk_var(command.heap, sort)
        return F.substitute(post, {command.heap: F.store(heap, command.ref, command.index, command.value)})
    if isinstance(command, Havoc):
        renames = {name: F.mk_var(fresh, sort) for name, fresh, sort in command.targets if name != fresh}
        return F.substitute(post, renames)
    raise TypeError(f"cannot handle command {type(command).__name__}")


def wp_commands(commands: List[Command], post: Term) -> Term:
    for command in reversed(commands):
        post = wp_command(command, post)
    return post


def _reaching(graph: GuardedCommandGraph, target: str) -> Set[str]:
    """Blocks from which `target` is reachable"""
    predecessors: Dict[str, List[str]] = {}
    for label, block in graph.blocks.items():
        for successor in block.successors:
            predecessors.setdefault(successor, []).append(label)
    found = {target}
    stack = [target]
    while stack:
        for pred in predecessors.get(stack.pop(), []):
            if pred not in found:
                found.add(pred)
                stack.append(pred)
    return found


def _obligation_wp(graph: GuardedCommandGraph, order: List[str], label: str, index: int) -> Term:
    """wp from the entry to the Assert at (label, index), over every path reaching it"""
    block = graph.blocks[label]
    goal = block.commands[index].formula
    memo: Dict[str, Term] = {label: wp_commands(block.commands[:index], goal)}
    reaching = _reaching(graph, label)
    for current in reversed(order):
        if current == label or current not in reaching:
            continue
        node = graph.blocks[current]
        post = F.and_(*(memo[s] for s in node.successors if s in memo))
        memo[current] = wp_commands(node.commands, post)
    return memo[graph.entry]


def compute_wp(graph: GuardedCommandGraph) -> List[VerificationCondition]:
    """
    Weakest-precondition verification conditions of a guarded-command graph

    Args:
        graph: acyclic graph from lower_method / lower_function

    Returns:
        One VerificationCondition per Assert, in topological order
    """
    order = graph.topological_order()
    vcs: List[VerificationCondition] = []
    for label, index, command in graph.asserts():
        body = _obligation_wp(graph, order, label, index)
        vc = VerificationCondition(len(vcs), graph.name, command.kind, body, command.span,
                                   command.description)
        vcs.append(vc.refresh(body, graph.symbols))
    logger.debug(f"{graph.name}: {len(vcs)} verification condition(s)")
    return vcs


def generate_vcs(graph: GuardedCommandGraph, table: Optional[Dict[str, FunctionDef]] = None,
                 fuel: int = 2) -> List[VerificationCondition]:
    """compute_wp followed by function inlining"""
    vcs = compute_wp(graph)
    if not table:
        return vcs
    exclude = frozenset([graph.self_app]) if graph.self_app is not None else frozenset()
    return [vc.refresh(inline_functions(vc.formula, fuel, table, exclude), vc.symbols) for vc in vcs]


def format_vc(vc: VerificationCondition) -> str:
    """Readable rendering used by --emit-vc"""
    span = vc.span
    lines = [f"vc {vc.id} {vc.method} {vc.kind.value} at {span.start_line}:{span.start_col}: {vc.description}"]
    if vc.symbols:
        declared = ", ".join(
            f"{name}: {'nat' if info.nat else info.sort}" for name, info in vc.symbols.items())
        lines.append(f"  symbols {declared}")
    for fact in vc.prelude:
        lines.append(f"  assume {format_term(fact)}")
    lines.append(f"  prove {format_term(vc.formula)}")
    return "\n".join(lines)
