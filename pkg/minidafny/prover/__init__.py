"""
Validity checking of verification conditions
"""
from minidafny.prover.builtin import ProverOptions, minimize_model, prove
from minidafny.prover.dpll import Sat, Unsat, decide_ground
from minidafny.prover.evaluate import NotEvaluable, evaluate_ground, holds
from minidafny.prover.ground import GroundClauseSet, encode_ground
from minidafny.prover.instantiate import Instantiator, instantiate_quantifiers
from minidafny.prover.normalize import nnf, skolemize
from minidafny.prover.omega import integer_model
from minidafny.prover.smtlib import emit_smtlib, parse_model, run_external, smt_file_name, write_smtlib
from minidafny.prover.verdict import (
    UNKNOWN_REASONS, Answer, Counterexample, Incomplete, Model, Proved, Unknown, Verdict,
)

__all__ = [
    "ProverOptions", "prove", "minimize_model", "Sat", "Unsat", "decide_ground", "NotEvaluable",
    "evaluate_ground", "holds", "GroundClauseSet", "encode_ground", "Instantiator",
    "instantiate_quantifiers", "nnf", "skolemize", "integer_model", "emit_smtlib", "parse_model",
    "run_external", "smt_file_name", "write_smtlib", "UNKNOWN_REASONS", "Answer", "Counterexample",
    "Incomplete", "Model", "Proved", "Unknown", "Verdict",
]
