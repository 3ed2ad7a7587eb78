"""
Verification condition generation
"""
from minidafny.vcgen.callgraph import CallGraph, build_callgraph
from minidafny.vcgen.inline import FunctionDef, build_function_table, inline_functions
from minidafny.vcgen.termination import check_function_termination
from minidafny.vcgen.wp import VerificationCondition, compute_wp, format_vc, generate_vcs

__all__ = [
    "CallGraph", "build_callgraph", "FunctionDef", "build_function_table", "inline_functions",
    "check_function_termination", "VerificationCondition", "compute_wp", "format_vc",
    "generate_vcs",
]
