"""
Counterexample replay
"""
from minidafny.replay.interpreter import DEFAULT_STEP_LIMIT, Interpreter, obligation_sites, replay
from minidafny.replay.values import ArrayRef, Confirmed, NotReproduced, ReplayOutcome, StepLimit

__all__ = [
    "DEFAULT_STEP_LIMIT", "Interpreter", "obligation_sites", "replay", "ArrayRef", "Confirmed",
    "NotReproduced", "ReplayOutcome", "StepLimit",
]
