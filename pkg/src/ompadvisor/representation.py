"""The four code representations fed to the classifiers.

``text``   lexer tokens of the snippet, pragma lines removed
``r_text`` the same with user identifiers renamed to ``var<k>``/``arr<k>``/``func<k>``
``ast``    pre-order DFS dump of the snippet AST (``For: Assignment: = ID: i ...``)
``r_ast``  the AST dump with the same renaming as ``r_text``
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .frontend import AstNode, lex, parse_unit


class ReprKind(str, Enum):
    TEXT = "text"
    R_TEXT = "r_text"
    AST = "ast"
    R_AST = "r_ast"


REPR_KINDS = tuple(k.value for k in ReprKind)


@dataclass
class RenameMap:
    mapping: dict[str, str] = field(default_factory=dict)
    counters: dict[str, int] = field(default_factory=lambda: {"var": 0, "arr": 0, "func": 0})

    def note(self, name: str, category: str) -> None:
        if not name or name in self.mapping:
            return
        k = self.counters[category]
        self.mapping[name] = f"{category}{k}"
        self.counters[category] = k + 1

    def get(self, name: str) -> str:
        return self.mapping.get(name, name)


def _code(record) -> str:
    return record if isinstance(record, str) else record.code_text


@lru_cache(maxsize=4096)
def parse_snippet(code_text: str):
    """Lex and parse a snippet; cached, so callers must not mutate the result."""
    tokens = lex(code_text)
    root, _ = parse_unit(tokens)
    return tuple(tokens), root


# -- AST dumps ----------------------------------------------------------------

def _attr_tokens(node: AstNode) -> list[str]:
    attr = node.attr
    if not attr:
        return []
    if node.kind == "Constant":
        ctype, _, value = attr.partition(", ")
        return [ctype + ",", value]
    if node.kind == "Typename":
        return attr.split()
    return [attr]


def _roots(ast):
    if isinstance(ast, AstNode):
        return ast.children if ast.kind == "TranslationUnit" else [ast]
    return list(ast)


def ast_linearize(ast) -> list[str]:
    """Flat pre-order token sequence; one ``Kind:`` marker per node."""
    out = []
    for root in _roots(ast):
        for node in root.walk():
            out.append(node.kind + ":")
            out.extend(_attr_tokens(node))
    return out


def render_tree(ast) -> str:
    """One node per line, two-space indentation per depth level."""
    lines = []

    def emit(node, depth):
        attr = " ".join(_attr_tokens(node))
        lines.append(f"{'  ' * depth}{node.kind}: {attr}".rstrip())
        for child in node.children:
            emit(child, depth + 1)

    for root in _roots(ast):
        emit(root, 0)
    return "\n".join(lines)


# -- renaming -----------------------------------------------------------------

def _decl_category(decl: AstNode) -> str:
    tname = decl.children[0].attr if decl.children and decl.children[0].kind == "Typename" else ""
    words = (tname or "").split()
    if "()" in words and "(*)" not in words:
        return "func"
    if "[]" in words:
        return "arr"
    return "var"


def build_rename_map(ast) -> RenameMap:
    """Categorize identifiers by first syntactic use, numbering per category.

    Callees of calls are ``func``, bases of subscripts are ``arr``, everything
    else is ``var``. Member names after ``.``/``->``, type names and labels
    keep their spelling.
    """
    rmap = RenameMap()
    stack = [(n, None) for n in reversed(_roots(ast))]
    while stack:
        node, role = stack.pop()
        kind = node.kind
        if kind == "ID":
            if role != "member":
                rmap.note(node.attr, role or "var")
            continue
        roles = [None] * len(node.children)
        if kind == "FuncCall":
            roles[0] = "func"
        elif kind == "ArrayRef":
            roles[0] = "arr"
        elif kind == "StructRef":
            roles[1] = "member"
        elif kind == "FuncDef":
            rmap.note(node.attr, "func")
        elif kind == "Decl" and node.attr != "...":
            rmap.note(node.attr, _decl_category(node))
        for child, r in zip(reversed(node.children), reversed(roles)):
            stack.append((child, r))
    return rmap


def rename_ast(node: AstNode, rmap: RenameMap, member=False) -> AstNode:
    attr = node.attr
    if (node.kind == "ID" and not member) or node.kind in ("FuncDef", "Decl"):
        attr = rmap.get(attr) if attr else attr
    children = []
    for i, child in enumerate(node.children):
        children.append(rename_ast(child, rmap, member=node.kind == "StructRef" and i == 1))
    return AstNode(node.kind, attr, children, node.line, node.end_line, node.start, node.end)


def rename_tokens(tokens, rmap: RenameMap) -> list[str]:
    out = []
    prev = None
    for tok in tokens:
        if tok.kind == "pragma-line":
            continue
        lx = tok.lexeme
        if tok.kind == "identifier" and prev not in (".", "->"):
            lx = rmap.get(lx)
        out.append(lx)
        prev = tok.lexeme
    return out


# -- public operations --------------------------------------------------------

def text_tokens(record) -> list:
    """Lexer tokens (with positions) that make up the ``text`` view."""
    tokens, _ = parse_snippet(_code(record))
    return [t for t in tokens if t.kind != "pragma-line"]


def to_text(record) -> list[str]:
    return [t.lexeme for t in text_tokens(record)]


def canonicalize(record, target: str = "text"):
    """Return ``(RenameMap, renamed sequence)``; ``target`` is ``text`` or ``ast``."""
    tokens, root = parse_snippet(_code(record))
    rmap = build_rename_map(root)
    if target == "ast":
        return rmap, ast_linearize([rename_ast(n, rmap) for n in root.children])
    return rmap, rename_tokens(tokens, rmap)


def represent(record, kind) -> list[str]:
    kind = ReprKind(kind)
    if kind is ReprKind.TEXT:
        return to_text(record)
    if kind is ReprKind.R_TEXT:
        return canonicalize(record, "text")[1]
    if kind is ReprKind.AST:
        _, root = parse_snippet(_code(record))
        return ast_linearize(root)
    return canonicalize(record, "ast")[1]


def token_spans(record, kind) -> list[tuple[int, int] | None]:
    """Character span in ``code_text`` for each represented token.

    Only the text views map back to source; AST tokens get ``None``.
    """
    kind = ReprKind(kind)
    if kind in (ReprKind.TEXT, ReprKind.R_TEXT):
        return [(t.start, t.end) for t in text_tokens(record)]
    return [None] * len(represent(record, kind))
