"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

Run with ``pytest -v -s tests/test_acceptance.py`` to see only these lines;
under a plain ``pytest -v`` they are printed with capture disabled.
Criteria 8 and 9 train real models and take several minutes.
"""
import filecmp
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import EXAMPLE1, EXAMPLE2, TREE_EXAMPLE1, TREE_EXAMPLE2, GOLDEN_VIEWS, GOLDEN_SOURCE
from ompadvisor.cli import main as cli
from ompadvisor.corpus import (build_corpus, deduplicate, parse_directive, records_from_source,
                               write_corpus)
from ompadvisor.evaluation import align_predictions, import_external_predictions, metrics
from ompadvisor.explain import explain
from ompadvisor.frontend import lex, parse_unit
from ompadvisor.models import (LogisticModel, TrainConfig, TrainedModel, TransformerClassifier,
                               bce_loss, grad_check)
from ompadvisor.representation import REPR_KINDS, ast_linearize, render_tree, represent
from test_corpus import EXPECTED, GRAMMAR, TREE, rel

SYNTH_N = 2000
SPLIT_SEED = 17


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return report


def run_cli(*argv):
    code = cli([str(a) for a in argv])
    assert code == 0, f"ompadvisor {' '.join(map(str, argv))} exited {code}"


def read_report(path):
    return json.loads(Path(path).read_text().splitlines()[0])


# 1 ---------------------------------------------------------------------------

def test_c01_representation_goldens(verdict):
    t0 = time.perf_counter()
    bad = []
    for kind in REPR_KINDS:
        want = [t.lexeme for t in lex(GOLDEN_VIEWS[kind])] if kind in ("text", "r_text") else GOLDEN_VIEWS[kind].split()
        if represent(GOLDEN_SOURCE, kind) != want:
            bad.append(f"view:{kind}")
    for name, src, table, whole in (("ex1", EXAMPLE1, TREE_EXAMPLE1, False), ("ex2", EXAMPLE2, TREE_EXAMPLE2, True)):
        root, _ = parse_unit(lex(src))
        flat = ast_linearize(root)
        # the golden capitalises the constant type; the linearization keeps C's spelling
        want = " ".join(line.strip() for line in table.splitlines()).replace("Int,", "int,").split()
        if (flat != want) if whole else (flat[:len(want)] != want):
            bad.append(f"tree:{name}")
        if " ".join(line.strip() for line in render_tree(root).splitlines()).split() != flat:
            bad.append(f"render:{name}")
    dt = time.perf_counter() - t0
    verdict(1, not bad and dt < 1.0, f"4 golden views + 2 golden AST dumps, mismatches={bad or 'none'}, {dt:.3f}s")


# 2 ---------------------------------------------------------------------------

PRIVATE_J_LOOP = """#pragma omp parallel for\\
private(j)
for (i = 0; i < POLYBENCH_LOOP_BOUND(4000, n); i++)
  for (j = 0; j < POLYBENCH_LOOP_BOUND(4000, n); j++)
    x1[i] = x1[i] + (A[i][j] * y_1[j]);
"""


def test_c02_pragma_grammar(verdict):
    bad = []
    recs, _ = records_from_source(PRIVATE_J_LOOP, "pj.c")
    d = recs[0].directive if len(recs) == 1 else None
    if not (d and d.is_parallel_for and d.private_vars == {"j"} and recs[0].pragma_raw ==
            "#pragma omp parallel for private(j)"):
        bad.append("private(j)")
    d = parse_directive("#pragma omp parallel for schedule(dynamic,4)")
    if not (d.is_parallel_for and d.schedule == ("dynamic", 4)):
        bad.append("schedule(dynamic,4)")
    for pragma, fields in GRAMMAR:
        try:
            d = parse_directive(pragma)
        except Exception as exc:  # noqa: BLE001 - any failure is a grammar miss
            bad.append(f"{pragma}: {exc}")
            continue
        if not all(getattr(d, k) == v for k, v in fields.items()):
            bad.append(pragma)
    verdict(2, not bad and len(GRAMMAR) == 20, f"private(j) + schedule(dynamic,4) + {len(GRAMMAR)} grammar fixtures, failures={bad or 'none'}")


# 3 ---------------------------------------------------------------------------

def test_c03_corpus_rules(verdict, tmp_path):
    records, _ = build_corpus([TREE])
    got = [(rel(r), r.origin[1], r.label) for r in deduplicate(records)]
    for name in ("a", "b"):
        write_corpus(tmp_path / name, deduplicate(build_corpus([TREE])[0]), [str(TREE)])
    same = (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()
    n_files = sum(1 for p in TREE.rglob("*.c"))
    verdict(3, got == EXPECTED and same and n_files == 12,
            f"{n_files}-file tree -> {len(got)} records (expected {len(EXPECTED)}), match={got == EXPECTED}, "
            f"byte-identical rebuild={same}")


# 4 ---------------------------------------------------------------------------

def test_c04_loss_oracle(verdict):
    half = abs(bce_loss(0.5, 1) - math.log(2))
    p = np.linspace(0.0, 1.0, 1002)[1:-1]
    sym = float(np.max(np.abs(bce_loss(p, 1) - bce_loss(1 - p, 0))))
    verdict(4, half < 1e-9 and sym < 1e-12, f"|bce(0.5,1)-ln2|={half:.2e}, symmetry max err={sym:.2e} over {len(p)} points")


# 5 ---------------------------------------------------------------------------

def test_c05_gradient_checks(verdict):
    t0 = time.perf_counter()
    cfg = TrainConfig()
    rng = np.random.default_rng(5)
    model = TransformerClassifier.init(60, cfg, rng)
    ids = np.zeros(cfg.max_len, np.int64)
    L = 40
    ids[0], ids[1:L] = 2, rng.integers(3, 60, L - 1)
    t_err = grad_check(model, ids, L, label=1, n_samples=256, seed=1)
    lr = LogisticModel(rng.normal(size=60), 0.2)
    l_err = grad_check(lr, ids, L, label=0, n_samples=256, seed=1)
    batch = (ids[None], np.array([L]), np.array([1]))
    corrupt = lambda: {k: v * 2.0 for k, v in model.loss_and_grads(*batch)[1].items()}
    c_err = grad_check(model, ids, L, label=1, n_samples=64, seed=2, analytic=corrupt)
    lbatch = (ids[None], np.array([L]), np.array([0]))
    lcorrupt = lambda: {k: v + 0.1 for k, v in lr.loss_and_grads(*lbatch)[1].items()}
    lc_err = grad_check(lr, ids, L, label=0, n_samples=64, seed=2, analytic=lcorrupt)
    dt = time.perf_counter() - t0
    ok = t_err < 1e-4 and l_err < 1e-4 and c_err >= 1e-4 and lc_err >= 1e-4 and dt < 120
    verdict(5, ok, f"transformer max rel err={t_err:.2e}, logistic={l_err:.2e} (256 params each); "
                   f"corrupted controls {c_err:.2e}/{lc_err:.2e} rejected; {dt:.1f}s")


# 6 ---------------------------------------------------------------------------

def test_c06_pad_invariance(verdict):
    cfg = TrainConfig()
    rng = np.random.default_rng(6)
    model = TransformerClassifier.init(80, cfg, rng)
    a = np.zeros((100, cfg.max_len), np.int64)
    lengths = rng.integers(2, cfg.max_len, 100)
    for i, L in enumerate(lengths):
        a[i, 0], a[i, 1:L] = 2, rng.integers(3, 80, L - 1)
    b = a.copy()
    for i, L in enumerate(lengths):
        b[i, L:] = rng.integers(0, 80, cfg.max_len - L)
    diff = float(np.max(np.abs(model.logits(a, lengths) - model.logits(b, lengths))))
    verdict(6, diff < 1e-9, f"100 pairs differing beyond true_length, max |dlogit|={diff:.2e}")


# 7 ---------------------------------------------------------------------------

def test_c07_metrics_oracle(verdict):
    preds = [1] * 8 + [1] * 2 + [0] * 2 + [0] * 8
    labels = [1] * 8 + [0] * 2 + [1] * 2 + [0] * 8
    r = metrics(preds, labels)
    err = max(abs(v - 0.8) for v in (r.precision, r.recall, r.f1, r.accuracy))
    z1 = metrics([0, 0], [1, 0])
    z2 = metrics([1, 0], [0, 0])
    z3 = metrics([], [])
    degenerate = (z1.precision == 0 and "precision-undefined" in z1.flags and z1.f1 == 0
                  and z2.recall == 0 and "recall-undefined" in z2.flags
                  and z3.accuracy == 0 and "accuracy-undefined" in z3.flags)
    verdict(7, err < 1e-12 and degenerate and r.flags == (),
            f"(8,2,2,8) -> max |metric-0.8|={err:.1e}; zero denominators flagged={degenerate}")


# 8 ---------------------------------------------------------------------------

def test_c08_scaled_experiment(verdict, tmp_path):
    t0 = time.perf_counter()
    corpus, splits, ck, rep = (tmp_path / x for x in ("corpus.jsonl", "splits", "ck", "rep"))
    run_cli("synth", "--out", corpus, "--n", SYNTH_N)
    run_cli("split", "--corpus", corpus, "--seed", SPLIT_SEED, "--out-dir", splits)
    scores = {}
    for model in ("transformer", "bow"):
        run_cli("train", "--corpus", corpus, "--splits-dir", splits, "--checkpoints-dir", ck,
                "--model", model, "--repr", "text")
        run_cli("evaluate", "--checkpoint", ck / f"directive.{model}.text.ckpt", "--corpus", corpus,
                "--splits-dir", splits, "--reports-dir", rep)
        scores[model] = read_report(rep / f"directive.{model}.text.test.jsonl")
    dt = time.perf_counter() - t0
    t, b = scores["transformer"], scores["bow"]
    ok = (t["accuracy"] >= 0.85 and t["f1"] >= 0.85 and b["accuracy"] >= 0.75
          and t["accuracy"] > b["accuracy"] and dt < 900)
    verdict(8, ok, f"transformer acc={t['accuracy']:.3f} f1={t['f1']:.3f}; bow acc={b['accuracy']:.3f} "
                   f"f1={b['f1']:.3f}; n_test={t['tp'] + t['fp'] + t['tn'] + t['fn']}; {dt:.0f}s")


# 9 ---------------------------------------------------------------------------

def test_c09_representation_ordering(verdict, tmp_path):
    corpus, splits, ck, rep = (tmp_path / x for x in ("corpus.jsonl", "splits", "ck", "rep"))
    run_cli("synth", "--out", corpus, "--n", SYNTH_N, "--naming-signal", "0.5")
    run_cli("split", "--corpus", corpus, "--seed", SPLIT_SEED, "--out-dir", splits)
    acc = {}
    for kind in ("text", "r_text"):
        run_cli("train", "--corpus", corpus, "--splits-dir", splits, "--checkpoints-dir", ck,
                "--model", "bow", "--repr", kind)
        run_cli("evaluate", "--checkpoint", ck / f"directive.bow.{kind}.ckpt", "--corpus", corpus,
                "--splits-dir", splits, "--reports-dir", rep, "--split", "validation")
        acc[kind] = read_report(rep / f"directive.bow.{kind}.validation.jsonl")["accuracy"]
    verdict(9, acc["text"] >= acc["r_text"],
            f"naming signal 0.5, BoW validation acc text={acc['text']:.3f} >= r_text={acc['r_text']:.3f} "
            f"(direction only; the size of the gap is corpus-specific)")


# 10 --------------------------------------------------------------------------

def test_c10_explainer_oracle(verdict, tmp_path):
    corpus, splits, ck = tmp_path / "c.jsonl", tmp_path / "s", tmp_path / "ck"
    run_cli("synth", "--out", corpus, "--n", SYNTH_N)
    run_cli("split", "--corpus", corpus, "--seed", SPLIT_SEED, "--out-dir", splits)
    run_cli("train", "--corpus", corpus, "--splits-dir", splits, "--checkpoints-dir", ck, "--model", "bow")
    from ompadvisor.corpus import read_corpus
    from ompadvisor.datasets import read_manifests
    from ompadvisor.models import load_checkpoint

    trained = load_checkpoint(ck / "directive.bow.text.ckpt")
    byid = {r.id: r for r in read_corpus(corpus)[1]}
    test_ids = read_manifests(splits, "directive")[2].ids[:20]
    w = trained.model.weights
    cut = np.percentile(np.abs(w), 75)
    checked = disagree = 0
    for rid in test_ids:
        exp = explain(trained, byid[rid], n_samples=500, seed=0)
        for (_, tok), weight in zip(exp.tokens, exp.weights):
            c = w[trained.vocab.id_of(tok)]
            if abs(c) > cut:
                checked += 1
                disagree += np.sign(weight) != np.sign(c)
    flat = TrainedModel(LogisticModel.init(len(trained.vocab)), trained.vocab, "text", "directive", trained.config)
    const_max = max(float(np.max(np.abs(explain(flat, byid[rid], n_samples=500).weights))) for rid in test_ids)
    verdict(10, disagree == 0 and checked > 0 and const_max < 1e-3,
            f"20 instances, {checked} token positions above the 75th |coef| percentile, sign disagreements="
            f"{disagree}; constant model max |w|={const_max:.1e}")


# 11 --------------------------------------------------------------------------

def test_c11_external_import(verdict, tmp_path):
    ids = [f"rec{i:02d}" for i in range(10)]
    labels = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
    present = {"rec01": 1, "rec02": 1, "rec03": 0, "rec04": 1, "rec07": 1, "rec08": 0, "rec09": 0}
    p = tmp_path / "ext.csv"
    p.write_text("record_id,label\n" + "".join(f"{k},{v}\n" for k, v in present.items()))
    preds = align_predictions(import_external_predictions(p), ids)
    r = metrics(preds, labels)
    # by hand: rec00 (pos) and rec05, rec06 (neg) are missing and count as predicted 0
    # tp = rec01 rec02 rec04 = 3, fp = rec07 = 1, fn = rec00 rec03 = 2, tn = 4
    want = dict(tp=3, fp=1, fn=2, tn=4, precision=0.75, recall=0.6, f1=2 * 0.75 * 0.6 / 1.35, accuracy=0.7)
    got = dict(tp=r.tp, fp=r.fp, fn=r.fn, tn=r.tn, precision=r.precision, recall=r.recall, f1=r.f1,
               accuracy=r.accuracy)
    ok = all(abs(got[k] - want[k]) < 1e-12 for k in want)
    verdict(11, ok, f"3 of 10 ids missing -> negatives; got {got}")


# 12 --------------------------------------------------------------------------

SMALL = ["--epochs", "2", "--d-model", "16", "--n-heads", "2", "--n-layers", "1", "--d-ff", "32",
         "--d-head", "16"]


def pipeline(root: Path):
    corpus, splits, ck, rep = (root / x for x in ("corpus.jsonl", "splits", "ck", "rep"))
    run_cli("build-corpus", TREE, "--out", root / "tree.jsonl")
    run_cli("synth", "--out", corpus, "--n", 300, "--seed", 3)
    run_cli("split", "--corpus", corpus, "--seed", SPLIT_SEED, "--out-dir", splits)
    run_cli("split", "--corpus", root / "tree.jsonl", "--seed", SPLIT_SEED, "--out-dir", root / "tree_splits",
            "--task", "private")
    for model in ("transformer", "bow"):
        run_cli("train", "--corpus", corpus, "--splits-dir", splits, "--checkpoints-dir", ck,
                "--model", model, *SMALL)
        ckpt = ck / f"directive.{model}.text.ckpt"
        run_cli("evaluate", "--checkpoint", ckpt, "--corpus", corpus, "--splits-dir", splits,
                "--reports-dir", rep)
        run_cli("explain", "--checkpoint", ckpt, TREE / "a_basic.c", "--samples", 100,
                "--json-out", rep / f"{model}.explain.json")


def test_c12_determinism(verdict, tmp_path, capsys):
    pipeline(tmp_path / "a")
    pipeline(tmp_path / "b")
    capsys.readouterr()
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    differ = [str(f) for f in files if not filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f, shallow=False)]
    kinds = {f.suffix for f in files}
    ok = not differ and {".jsonl", ".tsv", ".ckpt", ".csv", ".vocab", ".json"} <= kinds
    verdict(12, ok, f"{len(files)} artifacts (corpus, manifests, checkpoints, curves, reports, explanations), "
                    f"differing={differ or 'none'}")
