"""Classification metrics, error rate by snippet length, benchmark runs, external predictions."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import HISTOGRAM_BINS, build_corpus, length_bin, read_corpus

log = logging.getLogger(__name__)

LENGTH_BINS = ("1-10", "11-20", "21-30", "31-40", ">40")


class EmptyBenchmark(ValueError):
    pass


class MalformedPredictions(ValueError):
    pass


def _ratio(num, den, flag, flags):
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


@dataclass
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    flags: tuple[str, ...] = ()
    length_bins: dict = field(default_factory=dict)
    corpus_bins: dict = field(default_factory=dict)
    skipped: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_json(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "accuracy": self.accuracy, "flags": list(self.flags),
            "length_bins": self.length_bins, "corpus_bins": self.corpus_bins,
            "skipped": self.skipped,
        }


def metrics(predictions, labels) -> EvalReport:
    predictions, labels = list(predictions), list(labels)
    if len(predictions) != len(labels):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(labels)} labels")
    tp = fp = tn = fn = 0
    for p, y in zip(predictions, labels):
        p, y = int(p), int(y)
        if p and y:
            tp += 1
        elif p:
            fp += 1
        elif y:
            fn += 1
        else:
            tn += 1
    flags: list[str] = []
    prec = _ratio(tp, tp + fp, "precision-undefined", flags)
    rec = _ratio(tp, tp + fn, "recall-undefined", flags)
    f1 = _ratio(2 * prec * rec, prec + rec, "f1-undefined", flags)
    acc = _ratio(tp + tn, tp + fp + tn + fn, "accuracy-undefined", flags)
    return EvalReport(tp, fp, tn, fn, prec, rec, f1, acc, tuple(flags))


def fig_bin(n: int) -> int:
    return min(max(n - 1, 0) // 10, 4)


def error_by_length(predictions, labels, records, bins="fig") -> dict:
    """``{bin: {"errors", "count", "rate"}}``; rate = errors in bin / all evaluated."""
    names = LENGTH_BINS if bins == "fig" else HISTOGRAM_BINS
    index = fig_bin if bins == "fig" else length_bin
    table = {b: {"errors": 0, "count": 0, "rate": 0.0} for b in names}
    total = 0
    for p, y, rec in zip(predictions, labels, records):
        row = table[names[index(rec.loop_line_count)]]
        row["count"] += 1
        row["errors"] += int(p) != int(y)
        total += 1
    for row in table.values():
        row["rate"] = row["errors"] / total if total else 0.0
    return table


def evaluate_predictions(predictions, labels, records=None, skipped=0) -> EvalReport:
    rep = metrics(predictions, labels)
    if records is not None:
        rep.length_bins = error_by_length(predictions, labels, records, "fig")
        rep.corpus_bins = error_by_length(predictions, labels, records, "corpus")
    rep.skipped = skipped
    return rep


def load_labeled(labeled):
    """Records and skipped-file count from a corpus file or a C source tree."""
    p = Path(labeled)
    if p.is_dir():
        records, report = build_corpus([p])
        return records, len(report.unparseable) + len(report.unreadable)
    _, records = read_corpus(p)
    return records, 0


def benchmark_run(trained, labeled, tau=None) -> EvalReport:
    from .models.predict import predict_many

    records, skipped = load_labeled(labeled)
    if not records:
        raise EmptyBenchmark(f"no labeled records in {labeled}")
    preds = [r.label for r in predict_many(trained, records, tau)]
    labels = [r.label for r in records]
    return evaluate_predictions(preds, labels, records, skipped)


def import_external_predictions(csv_path) -> dict[str, int]:
    """``record_id,label`` lines; a header row is allowed; the last duplicate wins."""
    out: dict[str, int] = {}
    with open(csv_path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and [c.strip() for c in row] == ["record_id", "label"]:
                continue
            if len(row) != 2 or row[1].strip() not in ("0", "1") or not row[0].strip():
                raise MalformedPredictions(f"{csv_path}:{lineno}: expected 'record_id,label' with label 0/1")
            rid = row[0].strip()
            if rid in out:
                log.warning("%s:%d: duplicate id %s, keeping the later label", csv_path, lineno, rid)
            out[rid] = int(row[1])
    return out


def align_predictions(pred_map: dict[str, int], record_ids) -> list[int]:
    """Predictions in ``record_ids`` order; ids the tool skipped count as negative."""
    return [pred_map.get(rid, 0) for rid in record_ids]


def format_report(name: str, rep: EvalReport) -> str:
    lines = [
        f"{'model':<24}{'precision':>10}{'recall':>10}{'f1':>10}{'accuracy':>10}",
        f"{name:<24}{rep.precision:>10.3f}{rep.recall:>10.3f}{rep.f1:>10.3f}{rep.accuracy:>10.3f}",
        f"confusion tp={rep.tp} fp={rep.fp} tn={rep.tn} fn={rep.fn}"
        + (f"  flags={','.join(rep.flags)}" if rep.flags else "")
        + (f"  skipped={rep.skipped}" if rep.skipped else ""),
    ]
    if rep.length_bins:
        lines.append(f"{'length':<10}{'count':>8}{'errors':>8}{'rate':>8}")
        for b, row in rep.length_bins.items():
            lines.append(f"{b:<10}{row['count']:>8}{row['errors']:>8}{row['rate']:>8.3f}")
    return "\n".join(lines)
