"""Loop extraction: pair each ``for`` loop with its pragma and helper functions."""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast import AstNode, PragmaAttachment


@dataclass
class LoopEntry:
    loop: AstNode
    pragma: str | None
    helpers: list[AstNode] = field(default_factory=list)


def _pick_pragma(pragmas):
    for text in pragmas:
        if text.split()[:2] == ["#pragma", "omp"]:
            return text
    return pragmas[0]


def called_names(node: AstNode) -> set[str]:
    names = set()
    for n in node.walk():
        if n.kind == "FuncCall" and n.children and n.children[0].kind == "ID":
            names.add(n.children[0].attr)
    return names


def extract_loops(root: AstNode, attachments: list[PragmaAttachment]) -> list[LoopEntry]:
    """Every reachable ``For`` node with its attached pragma (if any).

    Loops nested inside a pragma-annotated loop are not reported separately;
    loops nested in an unannotated loop are. Helpers are the unit's function
    definitions called from the loop (one level, source order).
    """
    attached: dict[int, list[str]] = {}
    for att in attachments:
        attached.setdefault(id(att.target), []).append(att.pragma)
    funcdefs = [n for n in root.children if n.kind == "FuncDef"]

    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.kind == "For":
            pragmas = attached.get(id(node))
            if pragmas:
                out.append(LoopEntry(node, _pick_pragma(pragmas)))
                continue
            out.append(LoopEntry(node, None))
        stack.extend(reversed(node.children))

    for entry in out:
        calls = called_names(entry.loop)
        entry.helpers = [f for f in funcdefs if f.attr in calls]
    return out
