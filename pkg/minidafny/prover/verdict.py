"""
Prover answers and counterexample models
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

from minidafny import formula as F
from minidafny.diagnostics import MiniDafnyError
from minidafny.ir.commands import SymbolInfo

Value = Union[int, bool]

INSTANTIATION_LIMIT = "instantiation-limit"
TIMEOUT = "timeout"
EXTERNAL_SOLVER_UNKNOWN = "external-solver-unknown"
UNSUPPORTED_FRAGMENT = "unsupported-fragment"

UNKNOWN_REASONS = (INSTANTIATION_LIMIT, TIMEOUT, EXTERNAL_SOLVER_UNKNOWN, UNSUPPORTED_FRAGMENT)


class Answer(Enum):
    PROVED = "proved"
    COUNTEREXAMPLE = "counterexample"
    UNKNOWN = "unknown"


class Incomplete(MiniDafnyError):
    """The decision procedure gave up; `reason` is one of UNKNOWN_REASONS"""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass
class Model:
    """
    Satisfying assignment of a negated verification condition

    References are integers (null is 0); heap contents and array lengths are
    keyed by reference value, so two array symbols with equal values alias.
    A partial model (read back from an external solver) reports only the
    symbols it assigns.
    """
    scalars: Dict[str, Value] = field(default_factory=dict)
    lengths: Dict[int, int] = field(default_factory=dict)
    heaps: Dict[str, Dict[Tuple[int, int], Value]] = field(default_factory=dict)
    functions: Dict[Tuple[str, tuple], Value] = field(default_factory=dict)
    partial: bool = False

    def copy(self) -> "Model":
        return Model(dict(self.scalars), dict(self.lengths),
                     {name: dict(cells) for name, cells in self.heaps.items()},
                     dict(self.functions), self.partial)

    def length(self, ref: int) -> int:
        return self.lengths.get(ref, 0)

    def read(self, heap: str, ref: int, index: int) -> Value:
        default: Value = False if heap.startswith(F.HEAPB_VAR) else 0
        return self.heaps.get(heap, {}).get((ref, index), default)

    def array(self, name: str, elem_sort: str, heap: Optional[str] = None) -> Optional[Dict[str, Any]]:
        """Source-level view of an array symbol: None for null"""
        ref = self.scalars.get(name, F.NULL_VALUE)
        if ref == F.NULL_VALUE:
            return None
        if heap is None:
            heap = F.HEAPB_VAR if elem_sort == F.BOOL else F.HEAP_VAR
        length = self.length(ref)
        cells = self.heaps.get(heap, {})
        entries = {idx: value for (r, idx), value in sorted(cells.items()) if r == ref and 0 <= idx < length}
        default: Value = False if elem_sort == F.BOOL else 0
        return {"length": length, "entries": entries, "default": default}

    def to_dict(self, symbols: Dict[str, SymbolInfo]) -> Dict[str, Any]:
        """Counterexample as reported: values of the condition's scalar and array symbols"""
        shown: Dict[str, Any] = {}
        for name in sorted(symbols):
            info = symbols[name]
            if info.sort not in (F.INT, F.BOOL):
                continue
            if self.partial and name not in self.scalars:
                continue
            if info.array_elem is not None:
                view = self.array(name, info.array_elem)
                if view is not None:
                    view = dict(view, entries={str(k): v for k, v in view["entries"].items()})
                shown[name] = view
            else:
                shown[name] = self.scalars.get(name, False if info.sort == F.BOOL else 0)
        return shown


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    model: Optional[Model] = None
    reason: str = ""

    @property
    def proved(self) -> bool:
        return self.answer is Answer.PROVED

    @property
    def label(self) -> str:
        return self.answer.value


def Proved() -> Verdict:
    return Verdict(Answer.PROVED)


def Counterexample(model: Model) -> Verdict:
    return Verdict(Answer.COUNTEREXAMPLE, model=model)


def Unknown(reason: str) -> Verdict:
    if reason not in UNKNOWN_REASONS:
        raise ValueError(f"unknown reason {reason!r}")
    return Verdict(Answer.UNKNOWN, reason=reason)
