"""
Verification pipeline
frontend -> typecheck -> ir -> vcgen -> prover (-> replay), one file at a time
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

from minidafny.cli.report import FileReport, MethodReport, Report, VcResult
from minidafny.config.settings_loader import RunConfig
from minidafny.diagnostics import DiagnosticError, ExternalSolverError, Span, error
from minidafny.frontend import ast, parse_source
from minidafny.ir import GuardedCommandGraph, format_graph, lower_function, lower_method
from minidafny.prover import Answer, Verdict, prove, run_external, write_smtlib
from minidafny.replay import replay
from minidafny.typecheck import TypedProgram, check_frames, check_ghost_usage, resolve_and_check
from minidafny.vcgen import (
    CallGraph, VerificationCondition, build_callgraph, build_function_table,
    check_function_termination, format_vc, generate_vcs,
)

logger = logging.getLogger(__name__)

_Job = Tuple[MethodReport, ast.Decl, GuardedCommandGraph, VerificationCondition]


def _file_span(path: str) -> Span:
    return Span(path, 1, 1, 1, 1)


def discharge(vc: VerificationCondition, config: RunConfig) -> Verdict:
    """
    Decide one condition with the configured backend

    Raises:
        ExternalSolverError: from the smtlib backend
    """
    if config.backend == "smtlib":
        return run_external(vc, config.solver_command, config.backend_timeout_ms(), config.emit_smt_dir)
    if config.emit_smt_dir is not None:
        write_smtlib(vc, config.emit_smt_dir)
    return prove(vc, config.prover_options())


class FileVerifier:
    """Runs the pipeline over one source file"""

    def __init__(self, path: str, config: RunConfig):
        self.path = path
        self.config = config
        self.report = FileReport(path)
        self.tp: Optional[TypedProgram] = None
        self.callgraph: Optional[CallGraph] = None

    def front_end(self) -> bool:
        try:
            source = Path(self.path).read_text()
        except OSError as e:
            logger.error(f"Failed to read {self.path}: {e}")
            self.report.diagnostics.append(error(_file_span(self.path), "IO_ERROR",
                                                 f"cannot read file: {e.strerror or e}"))
            return False
        try:
            self.tp = resolve_and_check(parse_source(source, self.path))
        except DiagnosticError as e:
            logger.info(f"{self.path}: {len(e.diagnostics)} static error(s)")
            self.report.diagnostics.extend(e.diagnostics)
            return False
        self.report.diagnostics.extend(self.tp.warnings)
        self.report.diagnostics.extend(check_ghost_usage(self.tp))
        self.report.diagnostics.extend(check_frames(self.tp))
        return True

    def conditions(self) -> List[_Job]:
        tp = self.tp
        config = self.config
        self.callgraph = build_callgraph(tp)
        table = build_function_table(tp)
        jobs: List[_Job] = []
        for decl in tp.program.declarations():
            method = MethodReport(decl.qualified_name)
            self.report.methods.append(method)
            if isinstance(decl, ast.FunctionDecl):
                graph = lower_function(decl, tp)
            else:
                graph = lower_method(decl, tp)
            self.report.diagnostics.extend(graph.diagnostics)
            if config.emit_gc:
                self.report.dumps.append(format_graph(graph))
            vcs = generate_vcs(graph, table, config.fuel)
            try:
                vcs += check_function_termination(decl, self.callgraph, tp, table, config.fuel)
            except DiagnosticError as e:
                self.report.diagnostics.extend(e.diagnostics)
            for vc in vcs:
                if config.emit_vc:
                    self.report.dumps.append(format_vc(vc))
                jobs.append((method, decl, graph, vc))
            logger.debug(f"{decl.qualified_name}: {len(vcs)} verification condition(s)")
        return jobs

    def check(self, job: _Job) -> VcResult:
        _, decl, graph, vc = job
        try:
            verdict = discharge(vc, self.config)
        except ExternalSolverError as e:
            logger.error(f"{vc.method} vc {vc.id}: {e}")
            return VcResult.from_solver_error(vc, str(e))
        result = VcResult.from_verdict(vc, verdict)
        if verdict.answer is Answer.COUNTEREXAMPLE and self.config.replay:
            outcome = replay(decl, verdict.model, vc, self.tp, graph, self.callgraph, self.config.step_limit)
            result.replay = outcome.to_dict()
        return result

    def run(self) -> FileReport:
        if not self.front_end():
            return self.report
        jobs = self.conditions()
        if self.config.jobs > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
                results = list(pool.map(self.check, jobs))
        else:
            results = [self.check(job) for job in jobs]
        for (method, _, _, _), result in zip(jobs, results):
            method.vcs.append(result)
        for method in self.report.methods:
            method.normalize()
        proved = sum(1 for result in results if result.proved)
        logger.info(f"{self.path}: {proved}/{len(results)} verification condition(s) proved")
        return self.report


def verify_file(path: str, config: RunConfig) -> FileReport:
    """Verify one file; unexpected exceptions become an INTERNAL_ERROR diagnostic"""
    try:
        return FileVerifier(path, config).run()
    except Exception as e:
        logger.error(f"Internal error while verifying {path}: {e}")
        logger.debug("traceback", exc_info=True)
        report = FileReport(path, internal_error=True)
        report.diagnostics.append(error(_file_span(path), "INTERNAL_ERROR", f"internal error: {e}"))
        return report


def verify(config: RunConfig) -> Report:
    """
    Verify every input file of config

    Returns:
        Report; its exit_code is 0 when every condition is proved without
        diagnostics, 1 on failed or undecided conditions, 2 on static errors,
        3 on internal errors and 4 on external solver failures
    """
    report = Report()
    for path in config.inputs:
        logger.info(f"Verifying {path}")
        report.files.append(verify_file(path, config))
    return report
