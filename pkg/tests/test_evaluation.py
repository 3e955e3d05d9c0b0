import json

import pytest

from ompadvisor.corpus import SourceRecord
from ompadvisor.evaluation import (MalformedPredictions, align_predictions, error_by_length,
                                   evaluate_predictions, fig_bin, format_report,
                                   import_external_predictions, metrics)


def confusion(tp, fp, fn, tn):
    preds = [1] * tp + [1] * fp + [0] * fn + [0] * tn
    labels = [1] * tp + [0] * fp + [1] * fn + [0] * tn
    return preds, labels


def test_eight_two_two_eight():
    r = metrics(*confusion(8, 2, 2, 8))
    for v in (r.precision, r.recall, r.f1, r.accuracy):
        assert abs(v - 0.8) < 1e-12
    assert r.flags == ()


def test_hand_computed_asymmetric():
    r = metrics(*confusion(6, 3, 1, 10))
    assert (r.tp, r.fp, r.fn, r.tn) == (6, 3, 1, 10)
    assert r.precision == pytest.approx(6 / 9, abs=1e-12)
    assert r.recall == pytest.approx(6 / 7, abs=1e-12)
    assert r.f1 == pytest.approx(2 * 6 / (2 * 6 + 3 + 1), abs=1e-12)
    assert r.accuracy == pytest.approx(16 / 20, abs=1e-12)


def test_no_positive_predictions_flagged():
    r = metrics([0, 0, 0], [1, 0, 0])
    assert r.precision == 0.0 and "precision-undefined" in r.flags
    assert r.f1 == 0.0 and "f1-undefined" in r.flags
    assert r.accuracy == pytest.approx(2 / 3)


def test_no_positive_labels_flagged():
    r = metrics([1, 0], [0, 0])
    assert r.recall == 0.0 and "recall-undefined" in r.flags


def test_empty_flags_everything():
    r = metrics([], [])
    assert r.accuracy == 0.0 and len(r.flags) == 4


def test_length_mismatch():
    with pytest.raises(ValueError):
        metrics([1], [1, 0])


@pytest.mark.parametrize("n,b", [(1, 0), (10, 0), (11, 1), (20, 1), (21, 2), (40, 3), (41, 4), (500, 4)])
def test_fig_bins(n, b):
    assert fig_bin(n) == b


def rec(lines):
    return SourceRecord("x", "c", "", ("p", 1), lines)


def test_error_rate_over_all_evaluated():
    recs = [rec(3), rec(3), rec(15), rec(45)]
    table = error_by_length([1, 0, 1, 1], [1, 1, 0, 1], recs)
    assert table["1-10"] == {"errors": 1, "count": 2, "rate": 0.25}
    assert table["11-20"] == {"errors": 1, "count": 1, "rate": 0.25}
    assert table[">40"]["errors"] == 0
    corpus = error_by_length([1, 0, 1, 1], [1, 1, 0, 1], recs, bins="corpus")
    assert corpus["<=10"]["count"] == 2 and corpus["11-50"]["count"] == 2


def test_report_json_and_text():
    preds, labels = confusion(2, 1, 1, 2)
    r = evaluate_predictions(preds, labels, [rec(5)] * 6)
    obj = json.loads(json.dumps(r.to_json()))
    assert obj["tp"] == 2 and set(obj["length_bins"]) == {"1-10", "11-20", "21-30", "31-40", ">40"}
    text = format_report("m", r)
    assert "tp=2 fp=1 tn=2 fn=1" in text


def test_import_with_header_and_duplicates(tmp_path, caplog):
    p = tmp_path / "p.csv"
    p.write_text("record_id,label\na,1\nb,0\na,0\n\n")
    assert import_external_predictions(p) == {"a": 0, "b": 0}
    assert "duplicate" in caplog.text


@pytest.mark.parametrize("body,line", [("a,1\nb,2\n", 2), ("a\n", 1), ("a,1,3\n", 1), (",1\n", 1)])
def test_import_malformed(tmp_path, body, line):
    p = tmp_path / "p.csv"
    p.write_text(body)
    with pytest.raises(MalformedPredictions, match=f":{line}:"):
        import_external_predictions(p)


def test_missing_ids_count_negative(tmp_path):
    ids = [f"r{i}" for i in range(10)]
    labels = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
    p = tmp_path / "p.csv"
    # r0, r5, r6 skipped by the tool
    p.write_text("r1,1\nr2,1\nr3,0\nr4,1\nr7,1\nr8,0\nr9,0\n")
    preds = align_predictions(import_external_predictions(p), ids)
    assert preds == [0, 1, 1, 0, 1, 0, 0, 1, 0, 0]
    r = metrics(preds, labels)
    assert (r.tp, r.fp, r.fn, r.tn) == (3, 1, 2, 4)
    assert r.precision == pytest.approx(0.75, abs=1e-12)
    assert r.recall == pytest.approx(0.6, abs=1e-12)
    assert r.accuracy == pytest.approx(0.7, abs=1e-12)
