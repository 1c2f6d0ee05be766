"""Indentation-aware lexer for the restricted Python-like surface syntax.

Each physical line is one logical line: the generator never emits bracket
continuations or backslash joins, so we don't support them either.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

KEYWORDS = frozenset(
    {
        "False", "None", "True", "and", "as", "assert", "async", "await",
        "break", "class", "continue", "def", "del", "elif", "else", "except",
        "finally", "for", "from", "global", "if", "import", "in", "is",
        "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
        "while", "with", "yield",
    }
)

# Longest match first.
OPERATORS = (
    "**=", "//=", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
    "**", "//", "->", "+", "-", "*", "/", "%", "<", ">", "=",
)
PUNCT = "()[]{},:."

INDENT_TEXT = "<INDENT>"
DEDENT_TEXT = "<DEDENT>"
NEWLINE_TEXT = "<NEWLINE>"


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    NUMBER = "number"
    STRING = "string"
    OPERATOR = "operator"
    PUNCT = "punct"
    INDENT = "indent"
    DEDENT = "dedent"
    NEWLINE = "newline"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int = 0
    col: int = 0

    def __eq__(self, other):
        # Positions are bookkeeping; two tokens are the same token if kind and text agree.
        if not isinstance(other, Token):
            return NotImplemented
        return self.kind is other.kind and self.text == other.text

    def __hash__(self):
        return hash((self.kind, self.text))


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_NUMBER = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")


def _indent_width(line: str) -> int:
    width = 0
    for ch in line:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width = (width // 8 + 1) * 8
        else:
            break
    return width


def scan_line(text: str, lineno: int = 1) -> list[Token]:
    """Lex one physical line into non-layout tokens (no Indent/Dedent/Newline)."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        col = i + 1
        if ch in " \t\r\f":
            i += 1
            continue
        if ch == "#":
            break
        if ch in "\"'":
            j = i + 1
            while j < n and text[j] != ch:
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                raise LexError("unterminated string literal", lineno, col)
            tokens.append(Token(TokenKind.STRING, text[i : j + 1], lineno, col))
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m and (ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit())):
            tokens.append(Token(TokenKind.NUMBER, m.group(), lineno, col))
            i = m.end()
            continue
        m = _NAME.match(text, i)
        if m:
            word = m.group()
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, word, lineno, col))
            i = m.end()
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token(TokenKind.OPERATOR, op, lineno, col))
                i += len(op)
                break
        else:
            if ch in PUNCT:
                tokens.append(Token(TokenKind.PUNCT, ch, lineno, col))
                i += 1
            else:
                raise LexError(f"illegal character {ch!r}", lineno, col)
    return tokens


def tokenize(source: str) -> list[Token]:
    """Lex ``source`` into a token stream with Indent/Dedent/Newline layout tokens.

    Comments and blank lines are dropped. A dedent that does not return to an
    enclosing indentation level raises :class:`LexError`, as does an unterminated
    string or an illegal character.
    """
    tokens: list[Token] = []
    levels = [0]
    lineno = 0
    for lineno, raw in enumerate(source.splitlines(), start=1):
        body = scan_line(raw, lineno)
        if not body:
            continue
        width = _indent_width(raw)
        if width > levels[-1]:
            levels.append(width)
            tokens.append(Token(TokenKind.INDENT, INDENT_TEXT, lineno, 1))
        elif width < levels[-1]:
            while width < levels[-1]:
                levels.pop()
                tokens.append(Token(TokenKind.DEDENT, DEDENT_TEXT, lineno, 1))
            if width != levels[-1]:
                raise LexError("unindent does not match any outer indentation level", lineno, width + 1)
        tokens.extend(body)
        tokens.append(Token(TokenKind.NEWLINE, NEWLINE_TEXT, lineno, len(raw) + 1))
    while len(levels) > 1:
        levels.pop()
        tokens.append(Token(TokenKind.DEDENT, DEDENT_TEXT, lineno + 1, 1))
    return tokens


def render(tokens: list[Token]) -> str:
    """Inverse of :func:`tokenize` up to whitespace: four spaces per indent level."""
    lines: list[str] = []
    depth = 0
    current: list[str] = []
    for tok in tokens:
        if tok.kind is TokenKind.INDENT:
            depth += 1
        elif tok.kind is TokenKind.DEDENT:
            depth -= 1
        elif tok.kind is TokenKind.NEWLINE:
            lines.append("    " * depth + " ".join(current))
            current = []
        else:
            current.append(tok.text)
    if current:
        lines.append("    " * depth + " ".join(current))
    return "\n".join(lines) + ("\n" if lines else "")
