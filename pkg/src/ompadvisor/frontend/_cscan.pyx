# cython: language_level=3
"""Compiled scanner; must produce exactly what ``_scan.scan`` produces."""
from .errors import LexError

cdef enum:
    IDENT = 0
    NUMBER = 1
    CHAR = 2
    STRING = 3
    SYMBOL = 4
    PRAGMA = 5


cdef inline bint is_ident_start(Py_UCS4 c):
    return (u'a' <= c <= u'z') or (u'A' <= c <= u'Z') or c == u'_'


cdef inline bint is_ident_char(Py_UCS4 c):
    return is_ident_start(c) or (u'0' <= c <= u'9')


cdef inline bint is_digit(Py_UCS4 c):
    return u'0' <= c <= u'9'


cdef inline bint is_hspace(Py_UCS4 c):
    return c == u' ' or c == u'\t' or c == u'\r' or c == u'\f' or c == u'\v'


cdef inline bint is_single_symbol(Py_UCS4 c):
    return (c == u'-' or c == u'+' or c == u'*' or c == u'/' or c == u'%' or c == u'&'
            or c == u'|' or c == u'^' or c == u'!' or c == u'~' or c == u'<' or c == u'>'
            or c == u'=' or c == u'?' or c == u':' or c == u'.' or c == u'(' or c == u')'
            or c == u'[' or c == u']' or c == u'{' or c == u'}' or c == u';' or c == u',')


cdef Py_ssize_t symbol_len(str text, Py_ssize_t i, Py_ssize_t n):
    cdef Py_UCS4 c = text[i]
    cdef Py_UCS4 d = text[i + 1] if i + 1 < n else 0
    cdef Py_UCS4 e = text[i + 2] if i + 2 < n else 0
    if c == u'.' and d == u'.' and e == u'.':
        return 3
    if (c == u'<' or c == u'>') and d == c and e == u'=':
        return 3
    if c == u'-' and d == u'>':
        return 2
    if (c == u'+' or c == u'-' or c == u'<' or c == u'>' or c == u'&' or c == u'|') and d == c:
        return 2
    if (c == u'<' or c == u'>' or c == u'=' or c == u'!') and d == u'=':
        return 2
    if (c == u'+' or c == u'-' or c == u'*' or c == u'/' or c == u'%' or c == u'&'
            or c == u'|' or c == u'^') and d == u'=':
        return 2
    if is_single_symbol(c):
        return 1
    return 0


cdef Py_ssize_t quoted_end(str text, Py_ssize_t i, Py_ssize_t n, Py_UCS4 quote):
    # index just past the closing quote, -1 when unterminated
    cdef Py_UCS4 c
    i += 1
    while i < n:
        c = text[i]
        if c == quote:
            return i + 1
        if c == u'\n':
            return -1
        if c == u'\\':
            if i + 1 >= n:
                return -1
            i += 2
            continue
        i += 1
    return -1


cdef bint is_literal_prefix(str text, Py_ssize_t start, Py_ssize_t end, Py_UCS4 quote):
    cdef Py_ssize_t k = end - start
    cdef Py_UCS4 c = text[start]
    if k == 1:
        return c == u'L' or c == u'u' or c == u'U'
    if k == 2 and quote == u'"':
        return c == u'u' and text[start + 1] == u'8'
    return False


def scan(str text):
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t pos = 0, end, j, k, q, line_start = 0
    cdef Py_ssize_t tok_line, tok_col
    cdef long line = 1
    cdef bint at_bol = True
    cdef Py_UCS4 c, d, quote
    out = []
    while pos < n:
        c = text[pos]
        if c == u'\n':
            line += 1
            pos += 1
            line_start = pos
            at_bol = True
            continue
        if is_hspace(c):
            pos += 1
            continue
        if c == u'\\':
            j = pos + 1
            if j < n and text[j] == u'\r':
                j += 1
            if j < n and text[j] == u'\n':
                line += 1
                pos = j + 1
                line_start = pos
                continue
            raise LexError("illegal-character", line, pos - line_start + 1, repr(c))
        d = text[pos + 1] if pos + 1 < n else 0
        if c == u'/' and d == u'/':
            pos += 2
            while pos < n and text[pos] != u'\n':
                pos += 1
            continue
        if c == u'/' and d == u'*':
            j = pos + 2
            while j + 1 < n and not (text[j] == u'*' and text[j + 1] == u'/'):
                j += 1
            if j + 1 >= n:
                raise LexError("unterminated-comment", line, pos - line_start + 1)
            for q in range(pos, j):
                if text[q] == u'\n':
                    line += 1
                    line_start = q + 1
            pos = j + 2
            continue
        tok_line = line
        tok_col = pos - line_start + 1
        if c == u'#' and at_bol:
            j = pos + 1
            while j < n:
                c = text[j]
                if c == u'\n':
                    break
                if c == u'\\':
                    k = j + 1
                    if k < n and text[k] == u'\r':
                        k += 1
                    if k < n and text[k] == u'\n':
                        line += 1
                        line_start = k + 1
                        j = k + 1
                        continue
                    j += 1
                    continue
                if c == u'/' and j + 1 < n and text[j + 1] == u'*':
                    k = j + 2
                    while k + 1 < n and not (text[k] == u'*' and text[k + 1] == u'/'):
                        k += 1
                    if k + 1 >= n:
                        raise LexError("unterminated-comment", line, j - line_start + 1)
                    for q in range(j, k):
                        if text[q] == u'\n':
                            line += 1
                            line_start = q + 1
                    j = k + 2
                    continue
                if c == u'/' and j + 1 < n and text[j + 1] == u'/':
                    while j < n and text[j] != u'\n':
                        j += 1
                    break
                j += 1
            end = j
            k = pos + 1
            while k < end and (text[k] == u' ' or text[k] == u'\t'):
                k += 1
            if k + 6 <= end and text[k:k + 6] == u"pragma" and (
                    k + 6 == end or not is_ident_char(text[k + 6])):
                out.append((PRAGMA, pos, end, tok_line, tok_col))
            pos = end
            continue
        if c == u'"' or c == u"'":
            end = quoted_end(text, pos, n, c)
            if end < 0:
                raise LexError("unterminated-string", line, tok_col)
            out.append((STRING if c == u'"' else CHAR, pos, end, tok_line, tok_col))
            at_bol = False
            for q in range(pos, end):
                if text[q] == u'\n':
                    line += 1
                    line_start = q + 1
            pos = end
            continue
        if is_digit(c) or (c == u'.' and is_digit(d)):
            end = pos + 1
            while end < n:
                c = text[end]
                if (c == u'e' or c == u'E' or c == u'p' or c == u'P') and end + 1 < n and (
                        text[end + 1] == u'+' or text[end + 1] == u'-'):
                    end += 2
                elif is_ident_char(c) or c == u'.':
                    end += 1
                else:
                    break
            out.append((NUMBER, pos, end, tok_line, tok_col))
            at_bol = False
            pos = end
            continue
        if is_ident_start(c):
            end = pos + 1
            while end < n and is_ident_char(text[end]):
                end += 1
            if end < n:
                quote = text[end]
                if (quote == u'"' or quote == u"'") and is_literal_prefix(text, pos, end, quote):
                    q = quoted_end(text, end, n, quote)
                    if q >= 0:
                        out.append((STRING if quote == u'"' else CHAR, pos, q, tok_line, tok_col))
                        at_bol = False
                        for j in range(end, q):
                            if text[j] == u'\n':
                                line += 1
                                line_start = j + 1
                        pos = q
                        continue
            out.append((IDENT, pos, end, tok_line, tok_col))
            at_bol = False
            pos = end
            continue
        end = symbol_len(text, pos, n)
        if end == 0:
            raise LexError("illegal-character", line, tok_col, repr(c))
        out.append((SYMBOL, pos, pos + end, tok_line, tok_col))
        at_bol = False
        pos += end
    return out
