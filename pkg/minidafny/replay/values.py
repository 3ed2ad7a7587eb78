"""
Runtime values and replay outcomes
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from minidafny.diagnostics import Span
from minidafny.ir.commands import ObligationKind


@dataclass(eq=False)
class ArrayRef:
    """A live array; identity is the reference, so aliases share one object"""
    ref: int
    elem: str                     # Int | Bool
    elements: List[Union[int, bool]] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"ArrayRef(#{self.ref}, {self.elements})"


# int | bool | None (null) | ArrayRef
Value = Any


def same_value(a: Value, b: Value) -> bool:
    if isinstance(a, ArrayRef) or isinstance(b, ArrayRef) or a is None or b is None:
        return a is b
    return a == b


@dataclass
class ReplayOutcome:
    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    @property
    def confirmed(self) -> bool:
        return False


@dataclass
class Confirmed(ReplayOutcome):
    kind: ObligationKind
    span: Span

    @property
    def confirmed(self) -> bool:
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"outcome": "confirmed", "kind": self.kind.value,
                "line": self.span.start_line, "col": self.span.start_col}


@dataclass
class NotReproduced(ReplayOutcome):
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"outcome": "not-reproduced", "detail": self.detail}


@dataclass
class StepLimit(ReplayOutcome):
    steps: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"outcome": "step-limit", "steps": self.steps}
