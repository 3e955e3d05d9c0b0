"""Tokenizer for the C subset handled by the front end.

Comments and preprocessor lines are dropped, except ``#pragma`` lines which
survive as single ``pragma-line`` tokens with continuations joined. The hot
scanning loop lives in the compiled ``_cscan`` extension when it is built;
otherwise the regex scanner in ``_scan`` is used. Set
``OMPADVISOR_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass

from . import _scan
from .errors import LexError

if os.environ.get("OMPADVISOR_PURE_PYTHON") == "1":
    _backend_scan = _scan.scan
    BACKEND = "python"
else:
    try:
        from ._cscan import scan as _backend_scan

        BACKEND = "cython"
    except ImportError:  # extension not built
        _backend_scan = _scan.scan
        BACKEND = "python"

__all__ = ["Token", "LexError", "lex", "KEYWORDS", "BACKEND", "normalize_pragma"]

KEYWORDS = frozenset(
    """auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Alignas _Alignof _Atomic _Bool _Complex _Generic _Imaginary _Noreturn
    _Static_assert _Thread_local""".split()
)
PUNCTUATION = frozenset(["(", ")", "[", "]", "{", "}", ";", ",", "..."])

_KIND_NAMES = {
    _scan.CHAR: "char-literal",
    _scan.STRING: "string-literal",
    _scan.PRAGMA: "pragma-line",
}
_COMMENT = re.compile(r"/\*.*?\*/|//[^\n]*", re.DOTALL)
_SPLICE = re.compile(r"\\\r?\n")
_SPACE = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class Token:
    lexeme: str
    kind: str
    line: int
    column: int
    start: int = 0
    end: int = 0


def normalize_pragma(raw: str) -> str:
    """Join continuation lines, strip comments and collapse whitespace."""
    text = _SPLICE.sub(" ", raw)
    text = _COMMENT.sub(" ", text)
    return _SPACE.sub(" ", text).strip()


def _number_kind(lexeme):
    low = lexeme.lower()
    if low.startswith("0x"):
        return "float-literal" if ("." in low or "p" in low) else "integer-literal"
    return "float-literal" if ("." in low or "e" in low) else "integer-literal"


def lex(source: str, scanner=None) -> list[Token]:
    """Tokenize C source text.

    Raises :class:`LexError` (with line and column) on unterminated string
    or comment literals and on characters outside the C character set.
    """
    raw = (scanner or _backend_scan)(source)
    tokens = []
    append = tokens.append
    for code, start, end, line, col in raw:
        text = source[start:end]
        if code == _scan.IDENT:
            kind = "keyword" if text in KEYWORDS else "identifier"
        elif code == _scan.SYMBOL:
            kind = "punctuation" if text in PUNCTUATION else "operator"
        elif code == _scan.NUMBER:
            kind = _number_kind(text)
        else:
            kind = _KIND_NAMES[code]
            if code == _scan.PRAGMA:
                text = normalize_pragma(text)
        append(Token(text, kind, line, col, start, end))
    return tokens
