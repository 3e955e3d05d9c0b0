"""Tolerant recursive-descent parser for a C subset.

There is no preprocessor: unexpanded function-like macros parse as calls and
bare macros as identifiers. Typedef names are tracked per unit; an unknown
identifier is taken as a type name when it is followed by a declarator
(``size_t n;``, ``foo *p = q;``) or sits alone in parentheses in front of an
operand (``(ssize_t) x``). Top-level constructs that fail to parse are
skipped and reported; statements are accepted at top level so that bare loop
snippets parse as units.
"""
from __future__ import annotations

import logging

from .ast import AstNode, PragmaAttachment
from .errors import ParseError
from .lexer import Token

log = logging.getLogger(__name__)

TYPE_KEYWORDS = frozenset(
    "void char short int long float double signed unsigned _Bool _Complex _Imaginary".split()
)
STORAGE = frozenset("typedef extern static auto register inline _Noreturn _Thread_local".split())
QUALIFIERS = frozenset("const volatile restrict _Atomic".split())
# compiler extensions that may prefix or qualify a declaration
GNU_QUALIFIERS = frozenset(
    """__inline __inline__ __restrict __restrict__ __const __const__ __volatile__
    __thread __extension__ __signed__ __signed __forceinline""".split()
)
GNU_WRAPPERS = frozenset("__attribute__ __attribute __declspec __asm__ __asm asm __alignas".split())
TAG_KEYWORDS = frozenset(["struct", "union", "enum"])

ASSIGN_OPS = frozenset("= += -= *= /= %= <<= >>= &= ^= |=".split())
BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "<<": 8, ">>": 8,
    "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_OPERAND_START_KINDS = frozenset(
    ["identifier", "integer-literal", "float-literal", "char-literal", "string-literal"]
)


class _Fail(Exception):
    def __init__(self, message, token):
        super().__init__(message)
        self.token = token


def _constant_type(tok: Token) -> str:
    if tok.kind == "integer-literal":
        return "int"
    if tok.kind == "float-literal":
        low = tok.lexeme.lower()
        return "float" if low.endswith("f") and not low.startswith("0x") else "double"
    if tok.kind == "char-literal":
        return "char"
    return "string"


class _Declarator:
    __slots__ = ("name", "name_tok", "pointers", "dims", "params", "funcptr")

    def __init__(self):
        self.name = None
        self.name_tok = None
        self.pointers = 0
        self.dims = []
        self.params = None
        self.funcptr = False


class Parser:
    def __init__(self, tokens, typedefs=()):
        self.sig = []
        self.pragmas = [[]]
        for tok in tokens:
            if tok.kind == "pragma-line":
                self.pragmas[-1].append(tok)
            else:
                self.sig.append(tok)
                self.pragmas.append([])
        # pragmas_before[j]: pragma tokens between sig[j-1] and sig[j]
        self.pragmas_before = self.pragmas
        self.eof = Token("<eof>", "eof", tokens[-1].line + 1 if tokens else 1, 1,
                         tokens[-1].end if tokens else 0, tokens[-1].end if tokens else 0)
        self.j = 0
        self.typedefs = set(typedefs)
        self.attachments: list[PragmaAttachment] = []
        self.used_pragmas = set()
        self.last = self.eof

    # -- token access -------------------------------------------------------

    def peek(self, k=0) -> Token:
        i = self.j + k
        return self.sig[i] if i < len(self.sig) else self.eof

    def at(self, lexeme, k=0) -> bool:
        tok = self.peek(k)
        return tok.lexeme == lexeme and tok.kind not in ("string-literal", "char-literal", "eof")

    def advance(self) -> Token:
        tok = self.peek()
        if tok is self.eof:
            raise _Fail("unexpected end of input", tok)
        self.j += 1
        self.last = tok
        return tok

    def expect(self, lexeme) -> Token:
        if not self.at(lexeme):
            tok = self.peek()
            raise _Fail(f"expected {lexeme!r}, found {tok.lexeme!r}", tok)
        return self.advance()

    def accept(self, lexeme) -> bool:
        if self.at(lexeme):
            self.advance()
            return True
        return False

    def node(self, kind, first: Token, attr=None, children=None) -> AstNode:
        last = self.last
        return AstNode(kind, attr, children or [], first.line, last.line, first.start, last.end)

    def skip_balanced(self):
        """Skip a parenthesised group starting at the current ``(``."""
        depth = 0
        while True:
            tok = self.advance()
            if tok.lexeme == "(":
                depth += 1
            elif tok.lexeme == ")":
                depth -= 1
                if depth == 0:
                    return

    def skip_braces(self):
        depth = 0
        while True:
            tok = self.advance()
            if tok.lexeme == "{":
                depth += 1
            elif tok.lexeme == "}":
                depth -= 1
                if depth == 0:
                    return

    def skip_gnu(self):
        while self.peek().lexeme in GNU_WRAPPERS and self.peek().kind == "identifier":
            self.advance()
            while self.peek().lexeme in ("volatile", "__volatile__", "goto", "inline"):
                self.advance()
            if self.at("("):
                self.skip_balanced()

    # -- pragmas ------------------------------------------------------------

    def take_pragmas(self):
        j = self.j
        if j in self.used_pragmas or not self.pragmas_before[j]:
            return []
        self.used_pragmas.add(j)
        return self.pragmas_before[j]

    def attach(self, pragmas, target: AstNode):
        for tok in pragmas:
            self.attachments.append(PragmaAttachment(tok.lexeme, target, tok.line))

    def dangling(self, pragmas, tok: Token):
        # pragma with no following statement (e.g. before a closing brace)
        if not pragmas:
            return
        line = max(tok.line, pragmas[-1].line + 1)
        target = AstNode("EmptyStatement", None, [], line, line, tok.start, tok.start)
        self.attach(pragmas, target)

    # -- declarations ---------------------------------------------------------

    def is_decl_start(self, param=False) -> bool:
        tok = self.peek()
        if tok.kind == "keyword":
            return (tok.lexeme in TYPE_KEYWORDS or tok.lexeme in STORAGE
                    or tok.lexeme in QUALIFIERS or tok.lexeme in TAG_KEYWORDS
                    or tok.lexeme == "_Static_assert")
        if tok.kind != "identifier":
            return False
        name = tok.lexeme
        if name in GNU_QUALIFIERS or name in ("__attribute__", "__declspec"):
            return True
        nxt = self.peek(1)
        if name in self.typedefs:
            return not (nxt.kind == "operator" and nxt.lexeme not in ("*", "("))
        if nxt.kind == "identifier" and nxt.lexeme not in GNU_WRAPPERS:
            return True
        if nxt.kind == "keyword" and (nxt.lexeme in TYPE_KEYWORDS or nxt.lexeme in QUALIFIERS):
            return True
        if nxt.lexeme == "*":
            k = 1
            while self.at("*", k):
                k += 1
            after = self.peek(k)
            if param:
                return after.kind == "identifier" or after.lexeme in (")", ",")
            if after.kind == "identifier" and self.peek(k + 1).lexeme in ("=", ";", ",", "["):
                return True
        if param and nxt.lexeme in (")", ","):
            return True
        return False

    def decl_specifiers(self, param=False):
        words = []
        is_typedef = False
        saw_type = False
        while True:
            tok = self.peek()
            lx = tok.lexeme
            if tok.kind == "keyword":
                if lx == "typedef":
                    is_typedef = True
                    words.append(lx)
                    self.advance()
                elif lx in STORAGE or lx in QUALIFIERS:
                    words.append(lx)
                    self.advance()
                elif lx in TYPE_KEYWORDS:
                    words.append(lx)
                    saw_type = True
                    self.advance()
                elif lx in TAG_KEYWORDS:
                    self.advance()
                    words.append(lx)
                    self.skip_gnu()
                    if self.peek().kind == "identifier":
                        words.append(self.advance().lexeme)
                    if self.at("{"):
                        self.skip_braces()
                    saw_type = True
                else:
                    break
            elif tok.kind == "identifier":
                if lx in GNU_QUALIFIERS:
                    self.advance()
                elif lx in GNU_WRAPPERS:
                    self.skip_gnu()
                elif not saw_type and self._ident_is_type(param):
                    words.append(lx)
                    saw_type = True
                    self.advance()
                else:
                    break
            else:
                break
        if not words:
            raise _Fail("expected declaration specifiers", self.peek())
        return words, is_typedef

    def _ident_is_type(self, param) -> bool:
        tok, nxt = self.peek(), self.peek(1)
        if tok.lexeme in self.typedefs:
            return True
        if nxt.kind == "identifier" or nxt.lexeme == "*":
            return True
        if nxt.kind == "keyword" and (nxt.lexeme in QUALIFIERS or nxt.lexeme in TYPE_KEYWORDS):
            return True
        if param and nxt.lexeme in (")", ",", "["):
            return True
        return False

    def declarator(self, abstract=False) -> _Declarator:
        d = _Declarator()
        self._declarator_into(d, abstract)
        self.skip_gnu()
        return d

    def _declarator_into(self, d, abstract):
        while self.at("*"):
            self.advance()
            d.pointers += 1
            while (self.peek().lexeme in QUALIFIERS or self.peek().lexeme in GNU_QUALIFIERS):
                self.advance()
        self.skip_gnu()
        tok = self.peek()
        if tok.kind == "identifier" and tok.lexeme not in GNU_WRAPPERS:
            d.name_tok = self.advance()
            d.name = tok.lexeme
        elif self.at("(") and (self.at("*", 1) or self.at("(", 1) or self.at("^", 1)):
            self.advance()
            inner = _Declarator()
            self._declarator_into(inner, abstract)
            self.expect(")")
            d.name, d.name_tok = inner.name, inner.name_tok
            d.funcptr = inner.pointers > 0
            d.dims.extend(inner.dims)
        elif not abstract:
            raise _Fail(f"expected declarator, found {tok.lexeme!r}", tok)
        while True:
            if self.at("["):
                self.advance()
                while self.peek().lexeme in ("static",) or self.peek().lexeme in QUALIFIERS:
                    self.advance()
                if self.at("]"):
                    d.dims.append(None)
                elif self.at("*") and self.at("]", 1):
                    self.advance()
                    d.dims.append(None)
                else:
                    d.dims.append(self.assignment())
                self.expect("]")
            elif self.at("("):
                self.advance()
                params = self.parameter_list()
                self.expect(")")
                if d.params is None:
                    d.params = params
            else:
                break

    def parameter_list(self):
        params = []
        if self.at(")"):
            return params
        if self.at("void") and self.at(")", 1):
            self.advance()
            return params
        while True:
            if self.at("..."):
                tok = self.advance()
                params.append(self.node("Decl", tok, "...", [self.node("Typename", tok, "...")]))
            else:
                first = self.peek()
                if self.is_decl_start(param=True):
                    words, _ = self.decl_specifiers(param=True)
                    d = self.declarator(abstract=True)
                elif first.kind == "identifier":
                    # K&R identifier list
                    words, d = ["int"], _Declarator()
                    d.name_tok = self.advance()
                    d.name = first.lexeme
                else:
                    raise _Fail(f"bad parameter {first.lexeme!r}", first)
                params.append(self.make_decl(first, words, d, None))
            if not self.accept(","):
                return params

    def type_text(self, words, d: _Declarator) -> str:
        parts = list(words)
        if d.funcptr:
            parts.append("(*)")
        parts.extend("*" * d.pointers)
        parts.extend("[]" for _ in d.dims)
        if d.params is not None:
            parts.append("()")
        return " ".join(parts)

    def make_decl(self, first, words, d: _Declarator, init) -> AstNode:
        tname = AstNode("Typename", self.type_text(words, d), [x for x in d.dims if x is not None],
                        first.line, first.line, first.start, first.end)
        children = [tname]
        if init is not None:
            children.append(init)
        return self.node("Decl", first, d.name or "", children)

    def declaration(self, top_level=False):
        """Parse a declaration; returns a list of Decl nodes or one FuncDef."""
        first = self.peek()
        if self.at("_Static_assert"):
            self.advance()
            self.skip_balanced()
            self.expect(";")
            return []
        words, is_typedef = self.decl_specifiers()
        if self.accept(";"):
            return [self.make_decl(first, words, _Declarator(), None)]
        decls = []
        while True:
            d = self.declarator()
            if is_typedef and d.name:
                self.typedefs.add(d.name)
            if d.params is not None and not d.funcptr and not decls and (
                    self.at("{") or (top_level and self.is_decl_start())):
                return [self.function_body(first, words, d)]
            init = None
            if self.accept("="):
                init = self.initializer()
            decls.append(self.make_decl(first, words, d, init))
            if not self.accept(","):
                break
        self.expect(";")
        return decls

    def function_body(self, first, words, d: _Declarator) -> AstNode:
        params = list(d.params or [])
        # K&R parameter declarations
        while not self.at("{"):
            params.extend(self.declaration())
        body = self.compound()
        ret = AstNode("Typename", self.type_text(words, _with_pointers(d.pointers)), [],
                      first.line, first.line, first.start, first.end)
        return self.node("FuncDef", first, d.name, [ret, *params, body])

    def initializer(self) -> AstNode:
        if not self.at("{"):
            return self.assignment()
        first = self.advance()
        items = []
        while not self.at("}"):
            # designators
            while self.at(".") or self.at("["):
                if self.accept("."):
                    self.advance()
                else:
                    self.advance()
                    self.conditional()
                    self.expect("]")
            self.accept("=")
            items.append(self.initializer())
            if not self.accept(","):
                break
        self.expect("}")
        return self.node("InitList", first, None, items)

    # -- statements -----------------------------------------------------------

    def block_items(self):
        """One block item; a declaration may yield several nodes."""
        pragmas = self.take_pragmas()
        if self.at("}") or self.peek() is self.eof:
            self.dangling(pragmas, self.peek())
            return []
        if self.is_decl_start():
            nodes = self.declaration()
        else:
            nodes = [self.statement_inner()]
        if nodes:
            self.attach(pragmas, nodes[0])
        else:
            self.dangling(pragmas, self.peek())
        return nodes

    def statement(self) -> AstNode:
        pragmas = self.take_pragmas()
        if self.is_decl_start():
            first = self.peek()
            nodes = self.declaration()
            node = nodes[0] if len(nodes) == 1 else self.node("ExprList", first, None, nodes)
        else:
            node = self.statement_inner()
        self.attach(pragmas, node)
        return node

    def compound(self) -> AstNode:
        first = self.expect("{")
        items = []
        while not self.at("}"):
            if self.peek() is self.eof:
                raise _Fail("unterminated block", first)
            items.extend(self.block_items())
        self.dangling(self.take_pragmas(), self.peek())
        self.expect("}")
        return self.node("Compound", first, None, items)

    def statement_inner(self) -> AstNode:
        tok = self.peek()
        lx = tok.lexeme
        if tok.kind == "punctuation":
            if lx == "{":
                return self.compound()
            if lx == ";":
                self.advance()
                return self.node("EmptyStatement", tok)
        elif tok.kind == "keyword":
            handler = getattr(self, f"stmt_{lx}", None)
            if handler is not None:
                return handler()
        elif tok.kind == "identifier":
            if self.at(":", 1):
                self.advance()
                self.advance()
                if self.at("}"):
                    return self.node("Label", tok, lx, [])
                return self.node("Label", tok, lx, [self.statement()])
            if lx in ("asm", "__asm__", "__asm"):
                self.skip_gnu()
                self.expect(";")
                return self.node("EmptyStatement", tok)
        expr = self.expression()
        self.expect(";")
        return expr

    def stmt_if(self):
        first = self.advance()
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.statement()
        children = [cond, then]
        if self.accept("else"):
            children.append(self.statement())
        return self.node("If", first, None, children)

    def stmt_for(self):
        first = self.advance()
        self.expect("(")
        tok = self.peek()
        if self.at(";"):
            self.advance()
            init = self.node("EmptyStatement", tok)
        elif self.is_decl_start():
            decls = self.declaration()
            init = decls[0] if len(decls) == 1 else self.node("ExprList", tok, None, decls)
        else:
            init = self.expression()
            self.expect(";")
        tok = self.peek()
        if self.at(";"):
            cond = AstNode("EmptyStatement", None, [], tok.line, tok.line, tok.start, tok.start)
        else:
            cond = self.expression()
        self.expect(";")
        tok = self.peek()
        if self.at(")"):
            nxt = AstNode("EmptyStatement", None, [], tok.line, tok.line, tok.start, tok.start)
        else:
            nxt = self.expression()
        self.expect(")")
        body = self.statement()
        return self.node("For", first, None, [init, cond, nxt, body])

    def stmt_while(self):
        first = self.advance()
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        body = self.statement()
        return self.node("While", first, None, [cond, body])

    def stmt_do(self):
        first = self.advance()
        body = self.statement()
        self.expect("while")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        self.expect(";")
        return self.node("DoWhile", first, None, [cond, body])

    def stmt_switch(self):
        first = self.advance()
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        body = self.statement()
        return self.node("Switch", first, None, [cond, body])

    def _case_body(self):
        items = []
        while not (self.at("case") or self.at("default") or self.at("}")):
            if self.peek() is self.eof:
                break
            items.extend(self.block_items())
        if self.at("}"):
            self.dangling(self.take_pragmas(), self.peek())
        return items

    def stmt_case(self):
        first = self.advance()
        expr = self.conditional()
        if self.accept("..."):  # GNU case ranges
            self.conditional()
        self.expect(":")
        return self.node("Case", first, None, [expr, *self._case_body()])

    def stmt_default(self):
        first = self.advance()
        self.expect(":")
        return self.node("Default", first, None, self._case_body())

    def stmt_return(self):
        first = self.advance()
        if self.accept(";"):
            return self.node("Return", first)
        expr = self.expression()
        self.expect(";")
        return self.node("Return", first, None, [expr])

    def stmt_break(self):
        first = self.advance()
        self.expect(";")
        return self.node("Break", first)

    def stmt_continue(self):
        first = self.advance()
        self.expect(";")
        return self.node("Continue", first)

    def stmt_goto(self):
        first = self.advance()
        target = self.advance()
        self.expect(";")
        return self.node("Goto", first, target.lexeme)

    # -- expressions ----------------------------------------------------------

    def expression(self) -> AstNode:
        first = self.peek()
        expr = self.assignment()
        if not self.at(","):
            return expr
        items = [expr]
        while self.accept(","):
            items.append(self.assignment())
        return self.node("ExprList", first, None, items)

    def assignment(self) -> AstNode:
        first = self.peek()
        lhs = self.conditional()
        tok = self.peek()
        if tok.kind == "operator" and tok.lexeme in ASSIGN_OPS:
            self.advance()
            rhs = self.assignment()
            return self.node("Assignment", first, tok.lexeme, [lhs, rhs])
        return lhs

    def conditional(self) -> AstNode:
        first = self.peek()
        cond = self.binary(1)
        if not self.at("?"):
            return cond
        self.advance()
        then = self.expression()
        self.expect(":")
        other = self.conditional()
        return self.node("TernaryOp", first, None, [cond, then, other])

    def binary(self, min_prec) -> AstNode:
        first = self.peek()
        left = self.cast()
        while True:
            tok = self.peek()
            prec = BINARY_PREC.get(tok.lexeme) if tok.kind == "operator" else None
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.binary(prec + 1)
            left = self.node("BinaryOp", first, tok.lexeme, [left, right])

    def type_ahead(self, k=1) -> bool:
        """Whether ``(`` at offset k-1 opens a type name."""
        tok = self.peek(k)
        if tok.kind == "keyword":
            return (tok.lexeme in TYPE_KEYWORDS or tok.lexeme in QUALIFIERS
                    or tok.lexeme in TAG_KEYWORDS)
        if tok.kind != "identifier":
            return False
        if tok.lexeme in self.typedefs or tok.lexeme in GNU_QUALIFIERS:
            return True
        m = k + 1
        if self.at("*", m):
            while self.at("*", m):
                m += 1
            return self.at(")", m)
        if not self.at(")", m):
            return False
        after = self.peek(m + 1)
        return (after.kind in _OPERAND_START_KINDS or after.lexeme in ("(", "!", "~")
                or (after.kind == "keyword" and after.lexeme == "sizeof"))

    def type_name(self) -> AstNode:
        first = self.peek()
        words, _ = self.decl_specifiers(param=True)
        d = self.declarator(abstract=True)
        return self.node("Typename", first, self.type_text(words, d),
                         [x for x in d.dims if x is not None])

    def cast(self) -> AstNode:
        if self.at("(") and self.type_ahead():
            first = self.advance()
            tname = self.type_name()
            self.expect(")")
            if self.at("{"):
                operand = self.initializer()
            else:
                operand = self.cast()
            return self.node("Cast", first, None, [tname, operand])
        return self.unary()

    def unary(self) -> AstNode:
        tok = self.peek()
        lx = tok.lexeme
        if tok.kind == "operator":
            if lx in ("++", "--"):
                self.advance()
                return self.node("UnaryOp", tok, lx, [self.unary()])
            if lx in ("&", "*", "+", "-", "~", "!"):
                self.advance()
                return self.node("UnaryOp", tok, lx, [self.cast()])
        elif tok.kind == "keyword" and lx in ("sizeof", "_Alignof"):
            self.advance()
            if self.at("(") and self.type_ahead():
                self.advance()
                tname = self.type_name()
                self.expect(")")
                return self.node("UnaryOp", tok, lx, [tname])
            return self.node("UnaryOp", tok, lx, [self.unary()])
        return self.postfix()

    def postfix(self) -> AstNode:
        first = self.peek()
        expr = self.primary()
        while True:
            tok = self.peek()
            lx = tok.lexeme
            if lx == "[" and tok.kind == "punctuation":
                self.advance()
                index = self.expression()
                self.expect("]")
                expr = self.node("ArrayRef", first, None, [expr, index])
            elif lx == "(" and tok.kind == "punctuation":
                self.advance()
                args = []
                args_first = self.peek()
                if not self.at(")"):
                    while True:
                        args.append(self.assignment())
                        if not self.accept(","):
                            break
                self.expect(")")
                children = [expr]
                if args:
                    children.append(AstNode("ExprList", None, args, args_first.line,
                                            self.last.line, args_first.start, args[-1].end))
                expr = self.node("FuncCall", first, None, children)
            elif lx in (".", "->") and tok.kind == "operator":
                self.advance()
                field = self.advance()
                if field.kind != "identifier":
                    raise _Fail(f"expected member name, found {field.lexeme!r}", field)
                member = self.node("ID", field, field.lexeme)
                expr = self.node("StructRef", first, lx, [expr, member])
            elif lx in ("++", "--") and tok.kind == "operator":
                self.advance()
                expr = self.node("UnaryOp", first, "p" + lx, [expr])
            else:
                return expr

    def primary(self) -> AstNode:
        tok = self.peek()
        kind = tok.kind
        if kind == "identifier":
            self.advance()
            return self.node("ID", tok, tok.lexeme)
        if kind in ("integer-literal", "float-literal", "char-literal"):
            self.advance()
            return self.node("Constant", tok, f"{_constant_type(tok)}, {tok.lexeme}")
        if kind == "string-literal":
            self.advance()
            value = tok.lexeme
            while self.peek().kind == "string-literal":
                nxt = self.advance()
                value = value[:-1] + nxt.lexeme[nxt.lexeme.index('"') + 1:]
            return self.node("Constant", tok, f"string, {value}")
        if self.at("("):
            self.advance()
            if self.at("{"):
                raise _Fail("statement expressions are not supported", tok)
            expr = self.expression()
            self.expect(")")
            return expr
        raise _Fail(f"unexpected token {tok.lexeme!r}", tok)

    # -- translation unit -------------------------------------------------------

    def external_item(self):
        tok = self.peek()
        if self.at(";"):
            self.advance()
            return []
        if self.is_decl_start():
            return self.declaration(top_level=True)
        # implicit-int definition: name(...) {  or  name(a, b) int a; {
        if tok.kind == "identifier" and self.at("(", 1) and self._kr_definition_ahead():
            d = self.declarator()
            return [self.function_body(tok, ["int"], d)]
        return [self.statement_inner()]

    def _kr_definition_ahead(self) -> bool:
        depth = 0
        k = 1
        while True:
            tok = self.peek(k)
            if tok is self.eof:
                return False
            if tok.lexeme == "(":
                depth += 1
            elif tok.lexeme == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.peek(k + 1)
                    return nxt.lexeme == "{" or (
                        nxt.kind == "keyword" and nxt.lexeme in TYPE_KEYWORDS)
            k += 1

    def recover(self, start):
        """Skip past the construct that began at ``start``."""
        self.j = start
        depth = 0
        moved = False
        while self.j < len(self.sig):
            tok = self.sig[self.j]
            self.j += 1
            lx = tok.lexeme
            if tok.kind in ("punctuation",):
                if lx in ("{", "("):
                    depth += 1
                elif lx in ("}", ")"):
                    depth -= 1
                    if depth <= 0 and lx == "}":
                        if self.at(";"):
                            self.j += 1
                        return
                elif lx == ";" and depth <= 0:
                    return
            moved = True
        if not moved:
            self.j = min(start + 1, len(self.sig))

    def translation_unit(self, skipped=None):
        items = []
        failures = 0
        while self.j < len(self.sig):
            start = self.j
            mark = len(self.attachments)
            pragmas = self.take_pragmas()
            try:
                nodes = self.external_item()
            except (_Fail, RecursionError) as exc:
                tok = exc.token if isinstance(exc, _Fail) else self.peek()
                del self.attachments[mark:]
                first = self.sig[start]
                msg = f"skipped construct at line {first.line}: {exc} (near {tok.line}:{tok.column})"
                log.debug(msg)
                if skipped is not None:
                    skipped.append((first.line, str(exc)))
                failures += 1
                self.recover(start)
                continue
            if nodes:
                self.attach(pragmas, nodes[0])
                items.extend(nodes)
            else:
                self.dangling(pragmas, self.peek())
        self.dangling(self.take_pragmas(), self.eof)
        if failures and not items:
            first = self.sig[0]
            raise ParseError("no top-level construct could be parsed", first.line, first.column)
        if items:
            root = AstNode("TranslationUnit", None, items, items[0].line, items[-1].end_line,
                           items[0].start, items[-1].end)
        else:
            root = AstNode("TranslationUnit", None, [], 1, 1, 0, 0)
        return root


def _with_pointers(n):
    d = _Declarator()
    d.pointers = n
    return d


def parse_unit(tokens, skipped=None, typedefs=()):
    """Parse a token list into ``(root, attachments)``.

    Constructs that fail to parse are skipped; when ``skipped`` is a list,
    ``(line, message)`` pairs are appended to it. Raises :class:`ParseError`
    only when nothing at all could be parsed.
    """
    parser = Parser(tokens, typedefs)
    root = parser.translation_unit(skipped)
    return root, parser.attachments
