"""
Types, symbols and the typed program produced by name resolution
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Union

from minidafny.diagnostics import NO_SPAN, Diagnostic, Span
from minidafny.frontend import ast


@dataclass(frozen=True)
class Type:
    kind: str                        # int | nat | bool | array | null
    elem: Optional["Type"] = None

    @property
    def is_int(self) -> bool:
        return self.kind in ("int", "nat")

    @property
    def is_array(self) -> bool:
        return self.kind == "array"

    def __str__(self) -> str:
        return f"array<{self.elem}>" if self.kind == "array" else self.kind


INT = Type("int")
NAT = Type("nat")
BOOL = Type("bool")
NULL = Type("null")


def array_of(elem: Type) -> Type:
    return Type("array", elem)


def assignable(source: Type, target: Type) -> bool:
    """Whether a value of `source` may be stored in a `target` slot (int -> nat checked later)"""
    if source == target:
        return True
    if source.is_int and target.is_int:
        return True
    if source.kind == "null" and target.is_array:
        return True
    return False


def comparable(a: Type, b: Type) -> bool:
    return assignable(a, b) or assignable(b, a)


def needs_nat_check(source: Type, target: Type) -> bool:
    return target == NAT and source == INT


def join(a: Type, b: Type) -> Optional[Type]:
    if a == b:
        return a
    if a.is_int and b.is_int:
        return INT
    if a.kind == "null" and b.is_array:
        return b
    if b.kind == "null" and a.is_array:
        return a
    return None


class SymbolKind(Enum):
    IN_PARAM = "in-param"
    OUT_PARAM = "out-param"
    LOCAL = "local"
    BOUND = "bound"
    FUNCTION = "function"
    METHOD = "method"


@dataclass(eq=False)
class Symbol:
    """A resolved variable; `unique` is distinct within its declaration"""
    name: str
    unique: str
    kind: SymbolKind
    type: Type
    ghost: bool = False
    span: Span = NO_SPAN

@dataclass
class DeclInfo:
    decl: Union[ast.MethodDecl, ast.FunctionDecl]
    params: List[Symbol] = field(default_factory=list)
    outs: List[Symbol] = field(default_factory=list)
    symbols: List[Symbol] = field(default_factory=list)


@dataclass
class TypedProgram:
    """A resolved program: every expression has `ty`, every name a binding"""
    program: ast.Program
    decls: Dict[str, DeclInfo]
    warnings: List[Diagnostic] = field(default_factory=list)

    @property
    def methods(self) -> Dict[str, ast.MethodDecl]:
        return {name: info.decl for name, info in self.decls.items()
                if isinstance(info.decl, ast.MethodDecl)}

    @property
    def functions(self) -> Dict[str, ast.FunctionDecl]:
        return {name: info.decl for name, info in self.decls.items()
                if isinstance(info.decl, ast.FunctionDecl)}

    def info(self, decl) -> DeclInfo:
        return self.decls[decl.qualified_name]
