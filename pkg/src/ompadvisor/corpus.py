"""Corpus construction: walk C trees, pick loop snippets, label them, dedup, persist."""
from __future__ import annotations

import hashlib
import json
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .frontend import LexError, ParseError, extract_loops, is_empty_body, lex, normalize_pragma, parse_unit
from .representation import ast_linearize, parse_snippet

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
NEGATIVE_RULE = "omp-file-only"

REDUCTION_OPS = frozenset(["+", "-", "*", "&", "|", "^", "&&", "||", "min", "max"])
SCHEDULE_KINDS = frozenset(["static", "dynamic", "guided", "runtime", "auto"])
# words that may open a directive before any clause
DIRECTIVE_WORDS = frozenset(
    "parallel for simd do target teams distribute loop taskloop sections section single "
    "master masked critical atomic barrier taskwait taskyield task taskgroup flush ordered "
    "declare threadprivate cancel cancellation point end data enter exit update requires "
    "scan depobj metadirective tile unroll nothing error interop dispatch".split()
)

_OMP_PREFIX = re.compile(r"#\s*pragma\s+omp\b")


class NotOmpPragma(ValueError):
    pass


@dataclass(frozen=True)
class DirectiveInfo:
    is_parallel_for: bool
    private_vars: frozenset[str] = frozenset()
    firstprivate_vars: frozenset[str] = frozenset()
    reduction_clauses: tuple[tuple[str, frozenset[str]], ...] = ()
    schedule: tuple[str, int | None] | None = None
    other_clauses: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "is_parallel_for": self.is_parallel_for,
            "private_vars": sorted(self.private_vars),
            "firstprivate_vars": sorted(self.firstprivate_vars),
            "reduction_clauses": [[op, sorted(vs)] for op, vs in self.reduction_clauses],
            "schedule": list(self.schedule) if self.schedule else None,
            "other_clauses": list(self.other_clauses),
        }

    @classmethod
    def from_json(cls, obj: dict) -> DirectiveInfo:
        sched = obj.get("schedule")
        return cls(
            is_parallel_for=bool(obj["is_parallel_for"]),
            private_vars=frozenset(obj.get("private_vars", ())),
            firstprivate_vars=frozenset(obj.get("firstprivate_vars", ())),
            reduction_clauses=tuple((op, frozenset(vs)) for op, vs in obj.get("reduction_clauses", ())),
            schedule=(sched[0], sched[1]) if sched else None,
            other_clauses=tuple(obj.get("other_clauses", ())),
        )


def _split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _clauses(text: str):
    """Yield ``(name, args or None, raw)`` for each clause-like item."""
    i, n = 0, len(text)
    while i < n:
        while i < n and (text[i].isspace() or text[i] == ","):
            i += 1
        if i >= n:
            break
        m = re.compile(r"[A-Za-z_]\w*").match(text, i)
        if not m:
            j = i
            while j < n and not text[j].isspace():
                j += 1
            yield None, None, text[i:j]
            i = j
            continue
        name, j = m.group(), m.end()
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k < n and text[k] == "(":
            depth, e = 0, k
            while e < n:
                if text[e] == "(":
                    depth += 1
                elif text[e] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                e += 1
            args = text[k + 1:e]
            yield name, args, text[i:min(e + 1, n)]
            i = e + 1
        else:
            yield name, None, name
            i = j


def _names(args: str) -> set[str]:
    return {p.strip() for p in _split_top(args, ",") if p.strip()}


def parse_directive(pragma_raw: str) -> DirectiveInfo:
    text = normalize_pragma(pragma_raw)
    m = _OMP_PREFIX.match(text)
    if not m:
        raise NotOmpPragma(f"not an OpenMP pragma: {pragma_raw!r}")
    words: list[str] = []
    private: set[str] = set()
    firstprivate: set[str] = set()
    reductions = []
    schedule = None
    other: list[str] = []
    in_head = True
    for name, args, raw in _clauses(text[m.end():]):
        if in_head and args is None and name in DIRECTIVE_WORDS:
            words.append(name)
            continue
        in_head = False
        if name == "private" and args is not None:
            private |= _names(args)
        elif name == "firstprivate" and args is not None:
            firstprivate |= _names(args)
        elif name == "reduction" and args is not None and ":" in args:
            head, _, tail = args.partition(":")
            op = head.split(",")[-1].strip()
            names = _names(tail)
            if op in REDUCTION_OPS and names:
                reductions.append((op, frozenset(names)))
            else:
                other.append(raw)
        elif name == "schedule" and args is not None:
            parts = [p.strip() for p in args.split(",")]
            kind = parts[0].split(":")[-1].strip()
            if kind not in SCHEDULE_KINDS:
                other.append(raw)
                continue
            chunk = None
            if len(parts) > 1 and parts[1].isdigit() and int(parts[1]) > 0:
                chunk = int(parts[1])
            schedule = (kind, chunk)
        else:
            other.append(raw)
    return DirectiveInfo(
        is_parallel_for="parallel" in words and "for" in words,
        private_vars=frozenset(private),
        firstprivate_vars=frozenset(firstprivate),
        reduction_clauses=tuple(reductions),
        schedule=schedule,
        other_clauses=tuple(other),
    )


def is_omp_pragma(pragma_raw: str) -> bool:
    return bool(_OMP_PREFIX.match(normalize_pragma(pragma_raw)))


# -- records ------------------------------------------------------------------

def record_id(code_text: str) -> str:
    """Hash of the whitespace- and comment-insensitive token stream."""
    h = hashlib.sha256()
    for tok in lex(code_text):
        h.update(tok.lexeme.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:32]


@dataclass
class SourceRecord:
    id: str
    code_text: str
    ast_text: str
    origin: tuple[str, int]
    loop_line_count: int
    pragma_raw: str | None = None
    directive: DirectiveInfo | None = None

    @property
    def label(self) -> int:
        """1 when the loop carries a parallel-for directive."""
        return int(self.directive is not None and self.directive.is_parallel_for)

    def to_json(self) -> dict:
        obj = {"id": self.id, "code_text": self.code_text, "ast_text": self.ast_text}
        if self.pragma_raw is not None:
            obj["pragma_raw"] = self.pragma_raw
            obj["directive"] = self.directive.to_json()
        obj["origin"] = [self.origin[0], self.origin[1]]
        obj["loop_line_count"] = self.loop_line_count
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> SourceRecord:
        allowed = {"id", "code_text", "ast_text", "pragma_raw", "directive", "origin", "loop_line_count"}
        extra = set(obj) - allowed
        if extra:
            raise ValueError(f"unexpected record fields: {sorted(extra)}")
        if ("pragma_raw" in obj) != ("directive" in obj):
            raise ValueError("pragma_raw and directive must appear together")
        d = obj.get("directive")
        return cls(
            id=obj["id"],
            code_text=obj["code_text"],
            ast_text=obj["ast_text"],
            origin=(obj["origin"][0], int(obj["origin"][1])),
            loop_line_count=int(obj["loop_line_count"]),
            pragma_raw=obj.get("pragma_raw"),
            directive=DirectiveInfo.from_json(d) if d is not None else None,
        )


def make_record(code_text: str, origin: tuple[str, int], loop_line_count: int,
                pragma_raw: str | None = None) -> SourceRecord:
    _, root = parse_snippet(code_text)
    directive = parse_directive(pragma_raw) if pragma_raw is not None else None
    return SourceRecord(
        id=record_id(code_text),
        code_text=code_text,
        ast_text=" ".join(ast_linearize(root)),
        origin=origin,
        loop_line_count=loop_line_count,
        pragma_raw=pragma_raw,
        directive=directive,
    )


# -- building -----------------------------------------------------------------

@dataclass
class CorpusFilters:
    extensions: tuple[str, ...] = (".c",)
    max_file_bytes: int | None = 4_000_000
    drop_empty_loops: bool = True


@dataclass
class SkipReport:
    unreadable: list[tuple[str, str]] = field(default_factory=list)
    unparseable: list[tuple[str, str]] = field(default_factory=list)
    partial: list[tuple[str, int, str]] = field(default_factory=list)
    files_seen: int = 0
    files_without_omp: int = 0
    empty_loops: int = 0
    non_parallel_for: int = 0
    other_pragma: int = 0

    def merge(self, other: SkipReport) -> None:
        self.unreadable += other.unreadable
        self.unparseable += other.unparseable
        self.partial += other.partial
        for name in ("files_seen", "files_without_omp", "empty_loops", "non_parallel_for", "other_pragma"):
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def to_json(self) -> dict:
        return {
            "unreadable": [list(x) for x in self.unreadable],
            "unparseable": [list(x) for x in self.unparseable],
            "partial": [list(x) for x in self.partial],
            "files_seen": self.files_seen,
            "files_without_omp": self.files_without_omp,
            "empty_loops": self.empty_loops,
            "non_parallel_for": self.non_parallel_for,
            "other_pragma": self.other_pragma,
        }


@dataclass
class Snippet:
    code_text: str
    line: int
    end_line: int
    pragma: str | None
    empty_body: bool


def extract_snippets(source: str, tokens=None, skipped=None) -> list[Snippet]:
    """Every extracted loop of one unit with its helper functions appended.

    Raises LexError/ParseError when the unit cannot be read at all.
    """
    tokens = lex(source) if tokens is None else tokens
    root, attachments = parse_unit(tokens, skipped)
    out = []
    for entry in extract_loops(root, attachments):
        loop = entry.loop
        pieces = [source[loop.start:loop.end]] + [source[h.start:h.end] for h in entry.helpers]
        out.append(Snippet("\n".join(pieces), loop.line, loop.end_line, entry.pragma,
                           is_empty_body(loop.children[3])))
    return out


def records_from_source(source: str, path: str, filters: CorpusFilters | None = None):
    """Records for one translation unit plus a per-file SkipReport."""
    filters = filters or CorpusFilters()
    report = SkipReport(files_seen=1)
    try:
        tokens = lex(source)
    except LexError as exc:
        report.unparseable.append((path, str(exc)))
        return [], report
    if not any(t.kind == "pragma-line" and is_omp_pragma(t.lexeme) for t in tokens):
        report.files_without_omp = 1
        return [], report
    skipped: list[tuple[int, str]] = []
    try:
        snippets = extract_snippets(source, tokens, skipped)
    except ParseError as exc:
        report.unparseable.append((path, str(exc)))
        return [], report
    report.partial += [(path, line, msg) for line, msg in skipped]

    records = []
    for snip in snippets:
        if filters.drop_empty_loops and snip.empty_body:
            report.empty_loops += 1
            continue
        pragma = snip.pragma
        if pragma is not None:
            if not is_omp_pragma(pragma):
                report.other_pragma += 1
                continue
            if not parse_directive(pragma).is_parallel_for:
                report.non_parallel_for += 1
                continue
        try:
            rec = make_record(snip.code_text, (path, snip.line), snip.end_line - snip.line + 1, pragma)
        except (LexError, ParseError) as exc:
            report.partial.append((path, snip.line, f"snippet does not re-parse: {exc}"))
            continue
        records.append(rec)
    return records, report


def _process_file(args):
    path, filters = args
    p = Path(path)
    try:
        if filters.max_file_bytes is not None and p.stat().st_size > filters.max_file_bytes:
            return [], SkipReport(files_seen=1, unreadable=[(path, "file too large")])
        source = p.read_text(encoding="utf-8", errors="strict")
    except (OSError, UnicodeDecodeError) as exc:
        return [], SkipReport(files_seen=1, unreadable=[(path, str(exc))])
    try:
        return records_from_source(source, path, filters)
    except RecursionError:
        return [], SkipReport(files_seen=1, unparseable=[(path, "nesting too deep")])


def list_sources(root_dirs, extensions=(".c",)) -> list[str]:
    found = set()
    for root in root_dirs:
        rp = Path(root)
        if rp.is_file():
            found.add(str(rp))
            continue
        if not rp.is_dir():
            raise FileNotFoundError(f"no such directory: {root}")
        for p in rp.rglob("*"):
            if p.suffix in extensions and p.is_file():
                found.add(str(p))
    return sorted(found)


def build_corpus(root_dirs, filters: CorpusFilters | None = None, workers: int = 1):
    """Return ``(records, SkipReport)`` for every C file under ``root_dirs``.

    Files are visited in lexicographic path order; with ``workers > 1`` they
    are processed in a pool but merged back in that same order.
    """
    filters = filters or CorpusFilters()
    paths = list_sources(root_dirs, filters.extensions)
    jobs = [(p, filters) for p in paths]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_process_file, jobs, chunksize=8))
    else:
        results = [_process_file(j) for j in jobs]
    records, report = [], SkipReport()
    for recs, rep in results:
        records.extend(recs)
        report.merge(rep)
    for path, msg in report.unparseable:
        log.warning("skipped %s: %s", path, msg)
    return records, report


def deduplicate(records):
    ordered = sorted(records, key=lambda r: (r.origin[0], r.origin[1]))
    seen, out = set(), []
    for rec in ordered:
        if rec.id in seen:
            continue
        seen.add(rec.id)
        out.append(rec)
    return out


# -- statistics ---------------------------------------------------------------

HISTOGRAM_BINS = ("<=10", "11-50", "51-100", ">100")


@dataclass(frozen=True)
class CorpusStats:
    total_snippets: int = 0
    with_directive: int = 0
    schedule_static: int = 0
    schedule_dynamic: int = 0
    reduction_count: int = 0
    private_count: int = 0
    length_histogram: tuple[int, int, int, int] = (0, 0, 0, 0)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["length_histogram"] = dict(zip(HISTOGRAM_BINS, self.length_histogram))
        return d


def length_bin(n: int) -> int:
    if n <= 10:
        return 0
    if n <= 50:
        return 1
    if n <= 100:
        return 2
    return 3


def corpus_stats(records) -> CorpusStats:
    total = with_dir = static = dynamic = red = priv = 0
    hist = [0, 0, 0, 0]
    for rec in records:
        total += 1
        hist[length_bin(rec.loop_line_count)] += 1
        d = rec.directive
        if d is None:
            continue
        with_dir += 1
        # no schedule clause means the default (static) schedule
        if d.schedule is None or d.schedule[0] == "static":
            static += 1
        elif d.schedule[0] == "dynamic":
            dynamic += 1
        red += bool(d.reduction_clauses)
        priv += bool(d.private_vars)
    return CorpusStats(total, with_dir, static, dynamic, red, priv, tuple(hist))


# -- persistence --------------------------------------------------------------

def write_corpus(path, records, created_from=()) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "created_from": [str(p) for p in created_from],
        "negative_rule": NEGATIVE_RULE,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


def read_corpus(path):
    """Return ``(header, records)``; raises ValueError naming the bad line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:1: bad corpus header: {exc}") from None
        if not isinstance(header, dict) or header.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"{path}:1: unsupported corpus format")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                records.append(SourceRecord.from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record: {exc}") from None
    return header, records
