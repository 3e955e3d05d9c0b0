"""C front end: lexer, tolerant parser and loop extraction."""
from .ast import AstNode, KINDS, PragmaAttachment, is_empty_body
from .errors import LexError, ParseError
from .lexer import BACKEND, Token, lex, normalize_pragma
from .loops import LoopEntry, extract_loops
from .parser import parse_unit

__all__ = [
    "AstNode", "KINDS", "PragmaAttachment", "is_empty_body", "LexError", "ParseError",
    "BACKEND", "Token", "lex", "normalize_pragma", "LoopEntry", "extract_loops", "parse_unit",
]
