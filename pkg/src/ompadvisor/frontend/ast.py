"""AST node type for the C subset.

Node kinds follow pycparser's class names so that a depth-first dump reads
like ``For: / Assignment: = / ID: i / Constant: int, 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

KINDS = frozenset(
    [
        "TranslationUnit", "FuncDef", "Decl", "For", "While", "If", "Compound",
        "Assignment", "BinaryOp", "UnaryOp", "TernaryOp", "FuncCall", "ExprList",
        "ArrayRef", "StructRef", "ID", "Constant", "Cast", "Return", "Break",
        "Continue", "EmptyStatement",
        # needed to keep whole functions parseable
        "DoWhile", "Switch", "Case", "Default", "Label", "Goto", "InitList", "Typename",
    ]
)

STATEMENT_KINDS = frozenset(
    [
        "For", "While", "DoWhile", "If", "Compound", "Decl", "Switch", "Case", "Default",
        "Label", "Goto", "Return", "Break", "Continue", "EmptyStatement", "FuncDef",
        # expression statements
        "Assignment", "BinaryOp", "UnaryOp", "TernaryOp", "FuncCall", "ExprList",
        "ArrayRef", "StructRef", "ID", "Constant", "Cast",
    ]
)


@dataclass(eq=False, slots=True)
class AstNode:
    kind: str
    attr: str | None = None
    children: list[AstNode] = field(default_factory=list)
    line: int = 0
    end_line: int = 0
    start: int = 0
    end: int = 0

    def walk(self) -> Iterator[AstNode]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def same_as(self, other: AstNode) -> bool:
        """Structural equality, ignoring source positions."""
        if self.kind != other.kind or self.attr != other.attr:
            return False
        if len(self.children) != len(other.children):
            return False
        return all(a.same_as(b) for a, b in zip(self.children, other.children))

    def __repr__(self):
        attr = f" {self.attr!r}" if self.attr is not None else ""
        return f"<{self.kind}{attr} @{self.line} +{len(self.children)}>"


@dataclass(eq=False, slots=True)
class PragmaAttachment:
    pragma: str
    target: AstNode
    line: int = 0


def is_empty_body(body: AstNode) -> bool:
    return body.kind == "EmptyStatement" or (body.kind == "Compound" and not body.children)
