"""
minidafny: an auto-active verifier for a small Dafny-like language
"""
__version__ = "0.1.0"
