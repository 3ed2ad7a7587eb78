"""
Verification reports: per-file, per-declaration and per-condition results,
rendered as diagnostic lines or as JSON
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from minidafny.diagnostics import Diagnostic, Severity, Span, error, sort_diagnostics
from minidafny.ir.commands import ObligationKind
from minidafny.prover.verdict import Answer, Verdict
from minidafny.vcgen.wp import VerificationCondition

REPORT_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_STATIC = 2
EXIT_INTERNAL = 3
EXIT_SOLVER = 4

# most severe first
_EXIT_PRECEDENCE = (EXIT_INTERNAL, EXIT_SOLVER, EXIT_STATIC, EXIT_FAILED)

SOLVER_ERROR = "error"


def combine_exit_codes(codes) -> int:
    present = set(codes)
    for code in _EXIT_PRECEDENCE:
        if code in present:
            return code
    return EXIT_OK


def _format_value(name: str, value: Any) -> str:
    if isinstance(value, dict):
        cells = ", ".join(f"{name}[{index}] = {_format_value('', v)}" for index, v in value["entries"].items())
        text = f"{name}.Length = {value['length']}"
        return f"{text}, {cells}" if cells else text
    if isinstance(value, bool):
        text = "true" if value else "false"
    elif value is None:
        text = "null"
    else:
        text = str(value)
    return f"{name} = {text}" if name else text


def format_counterexample(values: Dict[str, Any]) -> str:
    if not values:
        return "(no variables)"
    return ", ".join(_format_value(name, value) for name, value in values.items())


@dataclass
class VcResult:
    id: int
    kind: ObligationKind
    span: Span
    verdict: str
    message: str
    counterexample: Optional[Dict[str, Any]] = None
    replay: Optional[Dict[str, Any]] = None
    reason: str = ""

    @classmethod
    def from_verdict(cls, vc: VerificationCondition, verdict: Verdict) -> "VcResult":
        counterexample = None
        if verdict.answer is Answer.COUNTEREXAMPLE:
            shown = {name: info for name, info in vc.symbols.items() if not name.startswith("$")}
            counterexample = verdict.model.to_dict(shown)
        return cls(vc.id, vc.kind, vc.span, verdict.label, vc.description, counterexample,
                   reason=verdict.reason)

    @classmethod
    def from_solver_error(cls, vc: VerificationCondition, detail: str) -> "VcResult":
        return cls(vc.id, vc.kind, vc.span, SOLVER_ERROR, vc.description, reason=detail)

    @property
    def proved(self) -> bool:
        return self.verdict == Answer.PROVED.value

    def sort_key(self):
        return (self.span.start_line, self.span.start_col, self.kind.order)

    def diagnostics(self) -> List[Diagnostic]:
        if self.proved:
            return []
        if self.verdict == Answer.UNKNOWN.value:
            return [error(self.span, "UNKNOWN", f"{self.message} (prover gave up: {self.reason})")]
        if self.verdict == SOLVER_ERROR:
            return [error(self.span, "SOLVER_ERROR", f"{self.message} (solver failed: {self.reason})")]
        found = error(self.span, self.kind.code, self.message)
        found.counterexample = self.counterexample
        notes = [found, Diagnostic(self.span, Severity.NOTE, "COUNTEREXAMPLE",
                                   format_counterexample(self.counterexample or {}))]
        if self.replay is not None:
            outcome = self.replay["outcome"]
            detail = self.replay.get("detail")
            notes.append(Diagnostic(self.span, Severity.NOTE, "REPLAY",
                                    f"{outcome}: {detail}" if detail else outcome))
        return notes

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "id": self.id,
            "kind": self.kind.value,
            "line": self.span.start_line,
            "col": self.span.start_col,
            "verdict": self.verdict,
            "message": self.message,
        }
        if self.reason:
            data["reason"] = self.reason
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        if self.replay is not None:
            data["replay"] = self.replay
        return data


@dataclass
class MethodReport:
    name: str
    vcs: List[VcResult] = field(default_factory=list)

    def normalize(self):
        """Source order, then obligation kind; ids follow that order"""
        self.vcs.sort(key=VcResult.sort_key)
        for k, result in enumerate(self.vcs):
            result.id = k

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "vcs": [result.to_dict() for result in self.vcs]}


@dataclass
class FileReport:
    path: str
    diagnostics: List[Diagnostic] = field(default_factory=list)
    methods: List[MethodReport] = field(default_factory=list)
    dumps: List[str] = field(default_factory=list)
    internal_error: bool = False

    @property
    def results(self) -> List[VcResult]:
        return [result for method in self.methods for result in method.vcs]

    def all_diagnostics(self) -> List[Diagnostic]:
        """Static and verification diagnostics in source order, notes after their error"""
        groups = [[d] for d in self.diagnostics]
        groups.extend(result.diagnostics() for result in self.results if not result.proved)
        groups.sort(key=lambda group: (group[0].span.start_line, group[0].span.start_col, group[0].code))
        return [d for group in groups for d in group]

    @property
    def exit_code(self) -> int:
        codes = []
        if self.internal_error:
            codes.append(EXIT_INTERNAL)
        if any(result.verdict == SOLVER_ERROR for result in self.results):
            codes.append(EXIT_SOLVER)
        if any(d.is_static for d in self.diagnostics):
            codes.append(EXIT_STATIC)
        if any(d.is_error and not d.is_static for d in self.diagnostics):
            codes.append(EXIT_FAILED)
        if any(not result.proved for result in self.results):
            codes.append(EXIT_FAILED)
        return combine_exit_codes(codes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "diagnostics": [d.to_dict() for d in sort_diagnostics(self.diagnostics)],
            "methods": [method.to_dict() for method in self.methods],
        }


@dataclass
class Report:
    files: List[FileReport] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return combine_exit_codes(f.exit_code for f in self.files)

    def summary(self) -> Dict[str, int]:
        results = [result for f in self.files for result in f.results]
        return {
            "proved": sum(1 for r in results if r.proved),
            "failed": sum(1 for r in results if r.verdict == Answer.COUNTEREXAMPLE.value),
            "unknown": sum(1 for r in results if r.verdict == Answer.UNKNOWN.value),
            "errors": (sum(1 for f in self.files for d in f.diagnostics if d.is_error)
                       + sum(1 for r in results if r.verdict == SOLVER_ERROR)),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "files": [f.to_dict() for f in self.files],
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def human_lines(self) -> List[str]:
        lines = [d.format() for f in self.files for d in f.all_diagnostics()]
        counts = self.summary()
        lines.append(f"{len(self.files)} file(s): {counts['proved']} proved, {counts['failed']} failed, "
                     f"{counts['unknown']} unknown, {counts['errors']} error(s)")
        return lines
