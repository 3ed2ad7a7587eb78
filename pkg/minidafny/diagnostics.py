"""
Diagnostics and error types
Source spans, diagnostic records and the exception hierarchy shared by every stage
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class Span:
    """1-based source range; end position is the last character covered"""
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def to(self, other: "Span") -> "Span":
        """Span from the start of self to the end of other"""
        return Span(self.file, self.start_line, self.start_col, other.end_line, other.end_col)

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


NO_SPAN = Span("<none>", 1, 1, 1, 1)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"


# Codes whose presence makes the static phase fail (exit code 2)
STATIC_CODES = frozenset({
    "LEX_ERROR", "SYNTAX_ERROR", "DUPLICATE_NAME", "UNKNOWN_IDENTIFIER",
    "TYPE_MISMATCH", "ASSIGN_TO_INPUT", "METHOD_IN_EXPRESSION", "NOT_AN_ARRAY",
    "ARITY_MISMATCH", "UNSUPPORTED", "GHOST_IN_COMPILED", "READS_VIOLATION",
    "MODIFIES_VIOLATION", "CALL_FRAME_VIOLATION", "IO_ERROR",
})


@dataclass
class Diagnostic:
    span: Span
    severity: Severity
    code: str
    message: str
    counterexample: Optional[Dict[str, Any]] = field(default=None, compare=False)

    def format(self) -> str:
        return (f"{self.span.file}:{self.span.start_line}:{self.span.start_col}: "
                f"{self.severity.value}[{self.code}]: {self.message}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    @property
    def is_static(self) -> bool:
        return self.is_error and self.code in STATIC_CODES

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "line": self.span.start_line,
            "col": self.span.start_col,
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
        }
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        return data


def error(span: Span, code: str, message: str) -> Diagnostic:
    return Diagnostic(span, Severity.ERROR, code, message)


def warning(span: Span, code: str, message: str) -> Diagnostic:
    return Diagnostic(span, Severity.WARNING, code, message)


def sort_diagnostics(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return sorted(diagnostics, key=lambda d: (d.span.file, d.span.start_line, d.span.start_col, d.code))


class MiniDafnyError(Exception):
    """Base class for all verifier errors"""


class DiagnosticError(MiniDafnyError):
    """Raised by a front-end stage that produced error diagnostics"""

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = sort_diagnostics(diagnostics)
        summary = self.diagnostics[0].format() if self.diagnostics else "no diagnostics"
        super().__init__(f"{len(self.diagnostics)} error(s); first: {summary}")


class ConfigError(MiniDafnyError):
    """Invalid run configuration"""


class ExternalSolverError(MiniDafnyError):
    """The external SMT solver could not be launched or failed without an answer"""


class ReplayError(MiniDafnyError):
    """Replay hit a state it cannot interpret"""
