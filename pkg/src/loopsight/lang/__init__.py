"""Lexing, vocabulary persistence, and compile validation for generated programs."""

from loopsight.lang.lexer import LexError, Token, TokenKind, render, scan_line, tokenize
from loopsight.lang.parser import CompileVerdict, ParseError, parse, python_compiles, validate
from loopsight.lang.vocab import PAD_ID, UNK_TEXT, TokenVocab, VocabError, encode, load_vocab, save_vocab

__all__ = [
    "CompileVerdict",
    "LexError",
    "PAD_ID",
    "ParseError",
    "Token",
    "TokenKind",
    "TokenVocab",
    "UNK_TEXT",
    "VocabError",
    "encode",
    "load_vocab",
    "parse",
    "python_compiles",
    "render",
    "save_vocab",
    "scan_line",
    "tokenize",
    "validate",
]
