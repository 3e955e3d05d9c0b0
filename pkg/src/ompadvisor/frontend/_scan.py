"""Pure-Python scanner; the reference behaviour for the Cython ``_cscan``.

``scan(text)`` returns raw ``(code, start, end, line, column)`` tuples.
Codes: 0 identifier/keyword, 1 number, 2 char literal, 3 string literal,
4 operator/punctuation, 5 ``#pragma`` logical line. Comments, whitespace and
every other preprocessor line are consumed silently.
"""
import re

from .errors import LexError

IDENT, NUMBER, CHAR, STRING, SYMBOL, PRAGMA = range(6)

_TOKEN = re.compile(
    r"""
     (?P<ws>[ \t\r\f\v]+)
    |(?P<nl>\n)
    |(?P<splice>\\\r?\n)
    |(?P<lc>//[^\n]*)
    |(?P<bc>/\*.*?\*/)
    |(?P<str>(?:u8|[LuU])?"(?:[^"\\\n]|\\.)*")
    |(?P<chr>[LuU]?'(?:[^'\\\n]|\\.)*')
    |(?P<num>\.?[0-9](?:[eEpP][+-]|[0-9A-Za-z_.])*)
    |(?P<id>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<op>\.\.\.|<<=|>>=|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\|
        |[-+*/%&|^]=|[-+*/%&|^!~<>=?:.()\[\]{};,])
    """,
    re.VERBOSE | re.DOTALL,
)
_DIRECTIVE_BODY = re.compile(
    r"(?:[^\\\n/]|\\\r?\n|\\|/\*.*?\*/|//[^\n]*|/(?![/*]))*", re.DOTALL
)
_DIRECTIVE_NAME = re.compile(r"#[ \t]*([A-Za-z_][A-Za-z0-9_]*)?")

_CODES = {"str": STRING, "chr": CHAR, "num": NUMBER, "id": IDENT, "op": SYMBOL}


def scan(text):
    out = []
    pos = 0
    n = len(text)
    line = 1
    line_start = 0
    at_bol = True
    match = _TOKEN.match
    while pos < n:
        m = match(text, pos)
        if m is None:
            c = text[pos]
            col = pos - line_start + 1
            if c == "#" and at_bol:
                body = _DIRECTIVE_BODY.match(text, pos + 1)
                end = body.end()
                if text.startswith("/*", end):
                    nl = text.count("\n", pos, end)
                    ls = text.rfind("\n", pos, end) + 1 if nl else line_start
                    raise LexError("unterminated-comment", line + nl, end - ls + 1)
                name = _DIRECTIVE_NAME.match(text, pos, end)
                if name.group(1) == "pragma":
                    out.append((PRAGMA, pos, end, line, col))
                nl = text.count("\n", pos, end)
                if nl:
                    line += nl
                    line_start = text.rfind("\n", pos, end) + 1
                pos = end
                continue
            if c == '"' or c == "'":
                raise LexError("unterminated-string", line, col)
            raise LexError("illegal-character", line, col, repr(c))
        kind = m.lastgroup
        end = m.end()
        if kind == "nl":
            line += 1
            line_start = end
            at_bol = True
        elif kind in ("ws", "lc"):
            pass
        elif kind in ("splice", "bc"):
            nl = text.count("\n", pos, end)
            if nl:
                line += nl
                line_start = text.rfind("\n", pos, end) + 1
        else:
            col = pos - line_start + 1
            if kind == "op" and end - pos == 1 and text[pos] == "/" and text.startswith("*", end):
                raise LexError("unterminated-comment", line, col)
            out.append((_CODES[kind], pos, end, line, col))
            at_bol = False
            if kind == "str":
                nl = text.count("\n", pos, end)
                if nl:
                    line += nl
                    line_start = text.rfind("\n", pos, end) + 1
        pos = end
    return out
