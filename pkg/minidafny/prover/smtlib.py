"""
SMT-LIB2 emission and external solver driver
"""
import logging
import os
import re
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from minidafny import formula as F
from minidafny.diagnostics import ExternalSolverError
from minidafny.formula import Term
from minidafny.prover.verdict import (
    EXTERNAL_SOLVER_UNKNOWN, TIMEOUT, Counterexample, Model, Proved, Unknown, Verdict,
)
from minidafny.vcgen.wp import VerificationCondition

logger = logging.getLogger(__name__)

LENGTH_MAP = "$len"

_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$")
_RESERVED = frozenset({
    "and", "or", "not", "ite", "true", "false", "let", "forall", "exists", "select", "store",
    "div", "mod", "distinct", "par", "as", "_", "!",
})
_SORTS = {
    F.INT: "Int",
    F.BOOL: "Bool",
    F.HEAP: "(Array Int (Array Int Int))",
    F.HEAPB: "(Array Int (Array Int Bool))",
}
_OPERATORS = {
    "add": "+", "sub": "-", "mul": "*", "neg": "-", "div": "div", "mod": "mod",
    "lt": "<", "le": "<=", "eq": "=", "not": "not", "and": "and", "or": "or",
    "implies": "=>", "iff": "=", "ite": "ite",
}

_DEFINE_FUN = re.compile(
    r"\(define-fun\s+(\|[^|]*\||[^\s()]+)\s+\(\s*\)\s+(Int|Bool)\s+"
    r"(\(\s*-\s*\d+\s*\)|-?\d+|true|false)\s*\)")


def smt_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def _numeral(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


class SmtWriter:
    """Renders terms; collects the function symbols and features they use"""

    def __init__(self):
        self.functions: Dict[str, Tuple[Tuple[str, ...], str]] = {}
        self.uses_length = False
        self.nonlinear = False
        self._memo: Dict[int, str] = {}

    def term(self, t: Term) -> str:
        text = self._memo.get(id(t))
        if text is None:
            text = self._render(t)
            self._memo[id(t)] = text
        return text

    def _heap_row(self, heap: Term, ref: Term) -> str:
        return f"(select {self.term(heap)} {self.term(ref)})"

    def _render(self, t: Term) -> str:
        op = t.op
        if op == "int":
            return _numeral(t.value)
        if op == "bool":
            return "true" if t.value else "false"
        if op == "var":
            return smt_symbol(t.value)
        if op in ("forall", "exists"):
            return f"({op} (({smt_symbol(t.value)} Int)) {self.term(t.args[0])})"
        if op == "select":
            heap, ref, index = t.args
            return f"(select {self._heap_row(heap, ref)} {self.term(index)})"
        if op == "store":
            heap, ref, index, value = t.args
            row = f"(store {self._heap_row(heap, ref)} {self.term(index)} {self.term(value)})"
            return f"(store {self.term(heap)} {self.term(ref)} {row})"
        if op == "frame":
            old, fresh = t.args[:2]
            text = self.term(old)
            for ref in t.args[2:]:
                text = f"(store {text} {self.term(ref)} {self._heap_row(fresh, ref)})"
            return text
        if op == "len":
            self.uses_length = True
            return f"(select {LENGTH_MAP} {self.term(t.args[0])})"
        if op == "app":
            self.functions[t.value] = (tuple(_SORTS[a.sort] for a in t.args), _SORTS[t.sort])
            if not t.args:
                return smt_symbol(t.value)
            return f"({smt_symbol(t.value)} {' '.join(self.term(a) for a in t.args)})"
        if op == "mul" and t.args[0].op != "int" and t.args[1].op != "int":
            self.nonlinear = True
        if op in ("div", "mod") and t.args[1].op != "int":
            self.nonlinear = True
        return f"({_OPERATORS[op]} {' '.join(self.term(a) for a in t.args)})"


def emit_smtlib(vc: VerificationCondition) -> str:
    """
    SMT-LIB2 script asserting the prelude and the negated condition

    Unsat answers prove the condition; a sat answer's model is a counterexample.
    """
    writer = SmtWriter()
    facts = [writer.term(fact) for fact in vc.prelude]
    goal = writer.term(vc.formula)
    logic = "ALL" if writer.nonlinear else "AUFLIA"
    span = vc.span
    lines: List[str] = [
        f"; {vc.method} vc {vc.id}: {vc.kind.value} at {span.start_line}:{span.start_col}",
        "(set-option :produce-models true)",
        f"(set-logic {logic})",
    ]
    for name, sort in sorted(F.symbols(vc.closed_formula()).items()):
        lines.append(f"(declare-const {smt_symbol(name)} {_SORTS[sort]})")
    if writer.uses_length:
        lines.append(f"(declare-const {LENGTH_MAP} (Array Int Int))")
    for name in sorted(writer.functions):
        args, result = writer.functions[name]
        lines.append(f"(declare-fun {smt_symbol(name)} ({' '.join(args)}) {result})")
    for fact in facts:
        lines.append(f"(assert {fact})")
    lines.append(f"(assert (not {goal}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def smt_file_name(vc: VerificationCondition) -> str:
    return f"{vc.method}.{vc.id}.smt2"


def write_smtlib(vc: VerificationCondition, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / smt_file_name(vc)
    path.write_text(emit_smtlib(vc))
    return path


def parse_model(output: str) -> Optional[Model]:
    """Integer and boolean constants of a get-model answer; None when nothing parses"""
    found = _DEFINE_FUN.findall(output)
    if not found:
        return None
    model = Model(partial=True)
    for name, sort, text in found:
        if name.startswith("|"):
            name = name[1:-1]
        if sort == "Bool":
            model.scalars[name] = text == "true"
        else:
            model.scalars[name] = int(text.replace("(", "").replace(")", "").replace(" ", ""))
    return model


def _answer(completed: subprocess.CompletedProcess, vc: VerificationCondition) -> Verdict:
    tokens = completed.stdout.split()
    answer = tokens[0] if tokens else ""
    if answer == "unsat":
        return Proved()
    if answer == "sat":
        model = parse_model(completed.stdout)
        if model is None:
            logger.warning(f"{vc.method} vc {vc.id}: could not parse the solver's model")
            model = Model(partial=True)
        return Counterexample(model)
    if answer == "unknown":
        return Unknown(EXTERNAL_SOLVER_UNKNOWN)
    if completed.stderr:
        logger.warning(f"solver stderr: {completed.stderr.strip()}")
    raise ExternalSolverError(f"solver exited with status {completed.returncode} without an answer")


def run_external(vc: VerificationCondition, solver_command: str, timeout_ms: int = 30000,
                 emit_dir: Optional[Path] = None) -> Verdict:
    """
    Discharge vc with an external SMT-LIB2 solver run as `solver_command <file>`

    Raises:
        ExternalSolverError: the solver cannot be launched or gives no answer
    """
    if emit_dir is not None:
        path = write_smtlib(vc, emit_dir)
        temporary = False
    else:
        handle, name = tempfile.mkstemp(suffix=".smt2", prefix="minidafny-")
        with os.fdopen(handle, "w") as out:
            out.write(emit_smtlib(vc))
        path = Path(name)
        temporary = True
    argv = shlex.split(solver_command) + [str(path)]
    logger.debug(f"running {' '.join(argv)}")
    try:
        completed = subprocess.run(argv, capture_output=True, text=True, timeout=timeout_ms / 1000.0)
    except subprocess.TimeoutExpired:
        logger.debug(f"{vc.method} vc {vc.id}: solver timed out")
        return Unknown(TIMEOUT)
    except OSError as exc:
        raise ExternalSolverError(f"cannot launch solver '{argv[0]}': {exc}")
    finally:
        if temporary:
            path.unlink(missing_ok=True)
    return _answer(completed, vc)
