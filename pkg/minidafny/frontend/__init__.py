"""
Front end: tokenizer, parser and pretty printer for .mdfy source
"""
from minidafny.frontend.lexer import Token, TokenKind, tokenize
from minidafny.frontend.parser import parse, parse_source
from minidafny.frontend.printer import format_expr, format_program

__all__ = ["Token", "TokenKind", "tokenize", "parse", "parse_source", "format_expr", "format_program"]
