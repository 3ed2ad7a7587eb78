"""
Guarded-command intermediate form
"""
from minidafny.ir.commands import (
    Assert, AssignVar, Assume, Block, CallSite, GuardedCommandGraph, Havoc, HeapStore,
    LoopCut, ObligationKind, SymbolInfo,
)
from minidafny.ir.decreases import guess_decreases
from minidafny.ir.lower import format_graph, lower_function, lower_method

__all__ = [
    "Assert", "AssignVar", "Assume", "Block", "CallSite", "GuardedCommandGraph", "Havoc",
    "HeapStore", "LoopCut", "ObligationKind", "SymbolInfo",
    "guess_decreases", "lower_method", "lower_function", "format_graph",
]
