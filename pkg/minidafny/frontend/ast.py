"""
Abstract syntax tree for .mdfy programs
Every node carries a Span; spans and type annotations never take part in equality
"""
from dataclasses import dataclass, field
from typing import Any, List, Optional, Union

from minidafny.diagnostics import NO_SPAN, Span


@dataclass
class Node:
    span: Span = field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


@dataclass
class TypeExpr(Node):
    name: str                       # int | nat | bool | array
    elem: Optional["TypeExpr"] = None

    def __str__(self) -> str:
        return f"array<{self.elem}>" if self.name == "array" else self.name


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass
class Expr(Node):
    # filled in by typecheck.resolve_and_check
    ty: Any = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class NullLit(Expr):
    pass


@dataclass
class Var(Expr):
    name: str
    binding: Any = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Unary(Expr):
    op: str
    operand: Expr


@dataclass
class ChainedCmp(Expr):
    operands: List[Expr]
    ops: List[str]

    def desugar(self) -> Expr:
        """a <= b < c  ==>  a <= b && b < c"""
        parts = [
            Binary(op, self.operands[k], self.operands[k + 1],
                   span=self.operands[k].span.to(self.operands[k + 1].span))
            for k, op in enumerate(self.ops)
        ]
        result = parts[0]
        for part in parts[1:]:
            result = Binary("&&", result, part, span=result.span.to(part.span))
        return result


@dataclass
class ArraySelect(Expr):
    array: Expr
    index: Expr


@dataclass
class Length(Expr):
    array: Expr


@dataclass
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    else_: Expr


@dataclass
class Call(Expr):
    name: str
    args: List[Expr]
    qualifier: Optional[str] = None
    decl: Any = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class Quantifier(Expr):
    kind: str                       # forall | exists
    var: str
    body: Expr
    binding: Any = field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass
class Stmt(Node):
    pass


@dataclass
class Block(Node):
    stmts: List[Stmt]


@dataclass
class VarDecl(Stmt):
    name: str
    type: Optional[TypeExpr] = None
    init: Optional[Expr] = None
    ghost: bool = False
    binding: Any = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class Assign(Stmt):
    lhs: Union[Var, ArraySelect]
    rhs: Expr


@dataclass
class MultiAssignCall(Stmt):
    lhs: List[str]
    method: str
    args: List[Expr]
    qualifier: Optional[str] = None
    declares: bool = False          # `var a, b := M(...)`
    ghost: bool = False
    lhs_spans: List[Span] = field(default_factory=list, compare=False, repr=False)
    bindings: List[Any] = field(default_factory=list, compare=False, repr=False)
    decl: Any = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class If(Stmt):
    cond: Expr
    then: Block
    else_: Optional[Block] = None


@dataclass
class While(Stmt):
    guard: Expr
    invariants: List[Expr]
    decreases: Optional[Expr]
    body: Block


@dataclass
class Assert(Stmt):
    expr: Expr


@dataclass
class Break(Stmt):
    pass


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass
class Param(Node):
    name: str
    type: TypeExpr
    ghost: bool = False


@dataclass
class FrameRef(Node):
    name: str


@dataclass
class MethodDecl(Node):
    name: str
    ins: List[Param]
    outs: List[Param]
    requires: List[Expr]
    modifies: List[FrameRef]
    ensures: List[Expr]
    decreases: Optional[Expr]
    body: Block
    reads: List[FrameRef] = field(default_factory=list)
    class_name: Optional[str] = field(default=None, compare=False)

    @property
    def qualified_name(self) -> str:
        return f"{self.class_name}.{self.name}" if self.class_name else self.name


@dataclass
class FunctionDecl(Node):
    name: str
    ins: List[Param]
    return_type: TypeExpr
    requires: List[Expr]
    reads: List[FrameRef]
    ensures: List[Expr]
    decreases: Optional[Expr]
    body: Expr
    is_function_method: bool = False
    is_predicate: bool = False
    class_name: Optional[str] = field(default=None, compare=False)

    @property
    def qualified_name(self) -> str:
        return f"{self.class_name}.{self.name}" if self.class_name else self.name


Decl = Union[MethodDecl, FunctionDecl]


@dataclass
class ClassDecl(Node):
    name: str
    members: List[Decl]


@dataclass
class Program(Node):
    classes: List[ClassDecl]
    members: List[Decl]
    file: str = field(default="<input>", compare=False)

    def declarations(self) -> List[Decl]:
        """All methods and functions in source order"""
        decls: List[Decl] = []
        items = sorted(
            [(c.span.start_line, c.span.start_col, c) for c in self.classes]
            + [(m.span.start_line, m.span.start_col, m) for m in self.members],
            key=lambda item: (item[0], item[1]),
        )
        for _, _, item in items:
            if isinstance(item, ClassDecl):
                decls.extend(item.members)
            else:
                decls.append(item)
        return decls


def desugar_chains(expr: Expr) -> Expr:
    """Return expr with every ChainedCmp replaced by its conjunction"""
    if isinstance(expr, ChainedCmp):
        return desugar_chains(expr.desugar())
    if isinstance(expr, Binary):
        return Binary(expr.op, desugar_chains(expr.left), desugar_chains(expr.right), span=expr.span)
    if isinstance(expr, Unary):
        return Unary(expr.op, desugar_chains(expr.operand), span=expr.span)
    if isinstance(expr, ArraySelect):
        return ArraySelect(desugar_chains(expr.array), desugar_chains(expr.index), span=expr.span)
    if isinstance(expr, Length):
        return Length(desugar_chains(expr.array), span=expr.span)
    if isinstance(expr, IfThenElse):
        return IfThenElse(desugar_chains(expr.cond), desugar_chains(expr.then),
                          desugar_chains(expr.else_), span=expr.span)
    if isinstance(expr, Call):
        return Call(expr.name, [desugar_chains(a) for a in expr.args], expr.qualifier, span=expr.span)
    if isinstance(expr, Quantifier):
        return Quantifier(expr.kind, expr.var, desugar_chains(expr.body), span=expr.span)
    return expr


def children(expr: Expr) -> List[Expr]:
    if isinstance(expr, Binary):
        return [expr.left, expr.right]
    if isinstance(expr, Unary):
        return [expr.operand]
    if isinstance(expr, ChainedCmp):
        return list(expr.operands)
    if isinstance(expr, ArraySelect):
        return [expr.array, expr.index]
    if isinstance(expr, Length):
        return [expr.array]
    if isinstance(expr, IfThenElse):
        return [expr.cond, expr.then, expr.else_]
    if isinstance(expr, Call):
        return list(expr.args)
    if isinstance(expr, Quantifier):
        return [expr.body]
    return []


def walk(expr: Expr):
    """Pre-order iteration over expr and its subexpressions"""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def walk_statements(block: Block):
    """Pre-order iteration over every statement nested in block"""
    for stmt in block.stmts:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_statements(stmt.then)
            if stmt.else_ is not None:
                yield from walk_statements(stmt.else_)
        elif isinstance(stmt, While):
            yield from walk_statements(stmt.body)
