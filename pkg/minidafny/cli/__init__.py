"""
Command line driver
"""
from minidafny.cli.corpus import run_corpus
from minidafny.cli.report import FileReport, MethodReport, Report, VcResult
from minidafny.cli.verify import discharge, verify, verify_file

__all__ = ["run_corpus", "FileReport", "MethodReport", "Report", "VcResult", "discharge", "verify",
           "verify_file"]
