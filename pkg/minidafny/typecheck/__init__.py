"""
Name resolution, typing, ghost and frame checks
"""
from minidafny.typecheck.checker import resolve_and_check
from minidafny.typecheck.frames import check_frames
from minidafny.typecheck.ghost import check_ghost_usage
from minidafny.typecheck.types import TypedProgram

__all__ = ["resolve_and_check", "check_ghost_usage", "check_frames", "TypedProgram"]
