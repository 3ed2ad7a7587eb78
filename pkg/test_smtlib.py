"""
Agreement between the built-in prover and an external SMT-LIB2 solver

Runs only when MINIDAFNY_SOLVER names a solver command, e.g. `z3` or `cvc5 --lang smt2`
"""
import os

import pytest

from minidafny.cli.verify import verify_file
from minidafny.config.settings_loader import RunConfig

SOLVER = os.getenv("MINIDAFNY_SOLVER")

pytestmark = pytest.mark.skipif(not SOLVER, reason="MINIDAFNY_SOLVER is not set")

FILES = [
    "edinburgh_castle.mdfy",
    "fee_int_children.mdfy",
    "fee_assert_exact.mdfy",
    "audio_guides_no_invariant.mdfy",
    "audio_guides_guessed_decreases.mdfy",
    "verify_adults_no_forall.mdfy",
    "verify_adults_no_length_bound.mdfy",
    "child_present_no_requires.mdfy",
    "division_by_guests.mdfy",
]


def _verdicts(path, config):
    report = verify_file(path, config)
    return {(m.name, r.kind, r.span.start_line, r.span.start_col): r.verdict
            for m in report.methods for r in m.vcs}


@pytest.mark.parametrize("name", FILES)
def test_backends_agree(corpus_dir, name):
    path = str(corpus_dir / name)
    builtin = _verdicts(path, RunConfig().validate())
    external = _verdicts(path, RunConfig(backend="smtlib", solver_command=SOLVER, timeout_ms=30000).validate())
    assert builtin.keys() == external.keys()
    for key, verdict in builtin.items():
        if "unknown" in (verdict, external[key]):
            continue
        assert verdict == external[key], key
