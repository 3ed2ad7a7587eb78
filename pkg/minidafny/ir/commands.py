"""
Guarded commands and the acyclic block graph they live in
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from minidafny.diagnostics import Diagnostic, MiniDafnyError, Span
from minidafny.formula import Term, format_term


class ObligationKind(Enum):
    POSTCONDITION = "Postcondition"
    PRECONDITION_AT_CALL = "PreconditionAtCall"
    ASSERT_STMT = "AssertStmt"
    LOOP_INV_ENTRY = "LoopInvEntry"
    LOOP_INV_MAINTAINED = "LoopInvMaintained"
    TERMINATION_DECREASES = "TerminationDecreases"
    TERMINATION_BOUNDED = "TerminationBounded"
    INDEX_IN_BOUNDS = "IndexInBounds"
    NULL_DEREF = "NullDeref"
    DIV_BY_ZERO = "DivByZero"
    NAT_NON_NEGATIVE = "NatNonNegative"

    @property
    def code(self) -> str:
        return self.name

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]

    @property
    def order(self) -> int:
        return list(ObligationKind).index(self)


_DESCRIPTIONS = {
    ObligationKind.POSTCONDITION: "a postcondition might not hold on this return path",
    ObligationKind.PRECONDITION_AT_CALL: "a precondition for this call might not hold",
    ObligationKind.ASSERT_STMT: "assertion might not hold",
    ObligationKind.LOOP_INV_ENTRY: "this loop invariant might not hold on entry",
    ObligationKind.LOOP_INV_MAINTAINED: "this loop invariant might not be maintained by the loop",
    ObligationKind.TERMINATION_DECREASES: "decreases expression might not decrease",
    ObligationKind.TERMINATION_BOUNDED: "decreases expression must be bounded below by 0",
    ObligationKind.INDEX_IN_BOUNDS: "index out of range",
    ObligationKind.NULL_DEREF: "target object may be null",
    ObligationKind.DIV_BY_ZERO: "possible division by zero",
    ObligationKind.NAT_NON_NEGATIVE: "value does not satisfy the subset constraints of 'nat'",
}


@dataclass(frozen=True)
class SymbolInfo:
    """Logical sort of a free symbol plus the typing facts it carries"""
    sort: str
    nat: bool = False
    array_elem: Optional[str] = None     # Int | Bool for array references


@dataclass
class Assume:
    formula: Term

    def format(self) -> str:
        return f"assume {format_term(self.formula)}"


@dataclass
class Assert:
    formula: Term
    kind: ObligationKind
    span: Span
    description: str = ""

    def __post_init__(self):
        if not self.description:
            self.description = self.kind.description

    def format(self) -> str:
        return f"assert[{self.kind.value}@{self.span.start_line}:{self.span.start_col}] {format_term(self.formula)}"


@dataclass
class AssignVar:
    name: str
    term: Term

    def format(self) -> str:
        return f"{self.name} := {format_term(self.term)}"


@dataclass
class HeapStore:
    heap: str
    ref: Term
    index: Term
    value: Term

    def format(self) -> str:
        return (f"{self.heap}[{format_term(self.ref)}][{format_term(self.index)}] := "
                f"{format_term(self.value)}")


@dataclass
class Havoc:
    """Each (variable, fresh name, sort) target takes an arbitrary value named `fresh`"""
    targets: List[Tuple[str, str, str]]

    def format(self) -> str:
        return "havoc " + ", ".join(
            name if name == fresh else f"{name}->{fresh}" for name, fresh, _ in self.targets)


Command = Union[Assume, Assert, AssignVar, HeapStore, Havoc]


@dataclass
class Block:
    label: str
    commands: List[Command] = field(default_factory=list)
    successors: List[str] = field(default_factory=list)


@dataclass
class LoopCut:
    """Where a loop was cut: fresh names standing for the havocked targets"""
    index: int
    span: Span
    havoc: Dict[str, str]
    decreases_var: str


@dataclass
class CallSite:
    """Fresh names used at a method call for the callee's outputs and heap effects"""
    index: int
    span: Span
    callee: str
    snapshots: Dict[str, str]     # callee in-param -> snapshot symbol
    outs: Dict[str, str]          # callee out-param -> temporary symbol
    heaps: Dict[str, str]         # heap variable -> fresh heap symbol


class CyclicGraphError(MiniDafnyError):
    """The block graph contains a cycle"""


@dataclass
class GuardedCommandGraph:
    name: str
    entry: str
    blocks: Dict[str, Block]
    symbols: Dict[str, SymbolInfo]
    decl: object = None
    loops: List[LoopCut] = field(default_factory=list)
    calls: List[CallSite] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)
    self_app: Optional[Term] = None      # F(params) for function graphs

    def topological_order(self) -> List[str]:
        """Blocks reachable from entry, predecessors first"""
        order: List[str] = []
        state: Dict[str, int] = {}
        stack: List[Tuple[str, int]] = [(self.entry, 0)]
        state[self.entry] = 1
        while stack:
            label, k = stack.pop()
            successors = self.blocks[label].successors
            if k < len(successors):
                stack.append((label, k + 1))
                nxt = successors[k]
                mark = state.get(nxt, 0)
                if mark == 1:
                    raise CyclicGraphError(f"{self.name}: cycle through block {nxt}")
                if mark == 0:
                    state[nxt] = 1
                    stack.append((nxt, 0))
            else:
                state[label] = 2
                order.append(label)
        order.reverse()
        return order

    def asserts(self) -> List[Tuple[str, int, Assert]]:
        found = []
        for label in self.topological_order():
            for k, cmd in enumerate(self.blocks[label].commands):
                if isinstance(cmd, Assert):
                    found.append((label, k, cmd))
        return found
