"""
Lexer for .mdfy source
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import List

from minidafny.diagnostics import Diagnostic, DiagnosticError, Span, error

logger = logging.getLogger(__name__)


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    INTEGER = "integer-literal"
    OPERATOR = "operator"
    PUNCTUATION = "punctuation"
    EOF = "eof"


KEYWORDS = frozenset({
    "method", "function", "predicate", "returns", "requires", "ensures",
    "modifies", "reads", "decreases", "invariant", "assert", "while", "if",
    "then", "else", "var", "ghost", "class", "forall", "exists", "true",
    "false", "null", "new", "return", "break",
})

# longest first: maximal munch
OPERATORS = (
    "<==>", "==>", ":=", "::", "==", "!=", "<=", ">=", "&&", "||",
    "<", ">", "+", "-", "*", "/", "%", "!",
)


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    offset: int = field(default=0, compare=False)

    def is_keyword(self, *lexemes: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme in lexemes

    def __str__(self) -> str:
        return "end of file" if self.kind is TokenKind.EOF else f"'{self.lexeme}'"


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n\f\v]+)"
    r"|(?P<line_comment>//[^\n]*)"
    r"|(?P<block_comment>/\*.*?\*/)"
    r"|(?P<open_comment>/\*)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<number>[0-9]+)"
    r"|(?P<op>" + "|".join(re.escape(op) for op in OPERATORS) + r")"
    r"|(?P<punct>[(){}\[\],;:.])",
    re.DOTALL,
)


class _Position:
    """Tracks 1-based line/column while scanning"""

    def __init__(self, source: str):
        self.source = source
        self.line_starts = [0]
        for k, ch in enumerate(source):
            if ch == "\n":
                self.line_starts.append(k + 1)

    def line_col(self, offset: int):
        lo, hi = 0, len(self.line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self.line_starts[lo] + 1

    def span(self, path: str, start: int, end: int) -> Span:
        line, col = self.line_col(start)
        end_line, end_col = self.line_col(max(start, end - 1))
        return Span(path, line, col, end_line, end_col)


def tokenize(source: str, path: str = "<input>") -> List[Token]:
    """
    Split source into tokens

    Args:
        source: program text
        path: file name used in spans

    Returns:
        Tokens terminated by an EOF token

    Raises:
        DiagnosticError: one LEX_ERROR per unknown character or unterminated comment
    """
    pos = _Position(source)
    tokens: List[Token] = []
    diagnostics: List[Diagnostic] = []
    offset = 0
    while offset < len(source):
        match = _TOKEN_RE.match(source, offset)
        if match is None:
            diagnostics.append(error(pos.span(path, offset, offset + 1), "LEX_ERROR",
                                     f"unexpected character '{source[offset]}'"))
            offset += 1
            continue
        kind = match.lastgroup
        text = match.group()
        span = pos.span(path, offset, match.end())
        if kind == "open_comment":
            diagnostics.append(error(span, "LEX_ERROR", "unterminated comment"))
            break
        if kind == "word":
            token_kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(token_kind, text, span, offset))
        elif kind == "number":
            tokens.append(Token(TokenKind.INTEGER, text, span, offset))
        elif kind == "op":
            tokens.append(Token(TokenKind.OPERATOR, text, span, offset))
        elif kind == "punct":
            tokens.append(Token(TokenKind.PUNCTUATION, text, span, offset))
        offset = match.end()

    if diagnostics:
        logger.debug(f"{path}: {len(diagnostics)} lexical error(s)")
        raise DiagnosticError(diagnostics)

    end_line, end_col = pos.line_col(len(source))
    tokens.append(Token(TokenKind.EOF, "", Span(path, end_line, end_col, end_line, end_col), len(source)))
    return tokens
