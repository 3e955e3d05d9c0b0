"""``ompadvisor`` command line.

Exit codes: 0 ok, 1 input or configuration error, 2 numeric failure, 3 parse failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import config as cfgmod
from .corpus import (HISTOGRAM_BINS, build_corpus, corpus_stats, deduplicate, extract_snippets,
                     read_corpus, write_corpus)
from .datasets import make_dataset, read_manifests, split_and_balance, write_manifests
from .frontend import LexError, ParseError
from .representation import REPR_KINDS, represent

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_PARSE = 0, 1, 2, 3
MODEL_ALIASES = {"bow": "logistic", "transformer": "transformer"}

log = logging.getLogger("ompadvisor")


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _out(line=""):
    sys.stdout.write(line + "\n")


# -- helpers ------------------------------------------------------------------

def _run_config(args) -> cfgmod.RunConfig:
    file_values = cfgmod.read_config_file(args.config) if args.config else {}
    flags = {}
    for key in ("corpus", "splits_dir", "checkpoints_dir", "reports_dir", "task", "seed",
                "epochs", "learning_rate", "batch_size", "dropout", "d_model", "n_heads",
                "n_layers", "d_ff", "d_head", "threshold", "max_len", "min_freq", "weight_decay"):
        if hasattr(args, key):
            flags[key] = getattr(args, key)
    if getattr(args, "repr", None) is not None:
        flags["repr_kind"] = args.repr
    if getattr(args, "model", None) is not None:
        flags["model"] = args.model
    return cfgmod.resolve(file_values, flags)


def _load_corpus(path):
    if not Path(path).exists():
        raise CliError(f"corpus file not found: {path}")
    return read_corpus(path)[1]


def _read_source(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _snippets(path):
    source = _read_source(path)
    skipped: list = []
    snippets = extract_snippets(source, skipped=skipped)
    for line, msg in skipped:
        print(f"{path}:{line}: warning: skipped construct: {msg}", file=sys.stderr)
    if not snippets:
        raise CliError(f"{path}: no for-loops found")
    return snippets


def _load_ckpt(path):
    from .models import load_checkpoint

    if not Path(path).exists():
        raise CliError(f"checkpoint not found: {path}")
    return load_checkpoint(path)


def _print_stats(stats):
    _out("OpenMP directives in the corpus")
    _out(f"  {'total snippets':<22}{stats.total_snippets:>8}")
    _out(f"  {'with parallel for':<22}{stats.with_directive:>8}")
    _out(f"  {'schedule static':<22}{stats.schedule_static:>8}")
    _out(f"  {'schedule dynamic':<22}{stats.schedule_dynamic:>8}")
    _out(f"  {'reduction':<22}{stats.reduction_count:>8}")
    _out(f"  {'private':<22}{stats.private_count:>8}")
    _out("Snippet lengths (lines)")
    for name, count in zip(HISTOGRAM_BINS, stats.length_histogram):
        _out(f"  {name:<22}{count:>8}")


# -- commands -----------------------------------------------------------------

def cmd_build_corpus(args):
    rc = _run_config(args)
    out = args.out or rc.corpus
    try:
        records, report = build_corpus(args.dirs, workers=args.workers)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from None
    for path, line, msg in report.partial:
        print(f"{path}:{line}: warning: skipped construct: {msg}", file=sys.stderr)
    for path, msg in report.unparseable + report.unreadable:
        print(f"{path}: warning: skipped file: {msg}", file=sys.stderr)
    if not args.no_dedup:
        records = deduplicate(records)
    if not records:
        raise CliError("no records")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    write_corpus(out, records, args.dirs)
    _print_stats(corpus_stats(records))
    _out(f"wrote {len(records)} records to {out}")


def cmd_stats(args):
    rc = _run_config(args)
    _print_stats(corpus_stats(_load_corpus(args.corpus_file or rc.corpus)))


def cmd_synth(args):
    from .synthetic import SynthConfig, generate_corpus

    rc = _run_config(args)
    out = args.out or rc.corpus
    cfg = SynthConfig(n=args.n, seed=args.seed if args.seed is not None else 0,
                      ambiguous_rate=args.ambiguous_rate, naming_signal=args.naming_signal)
    records = generate_corpus(cfg)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    write_corpus(out, records, [f"synthetic:n={cfg.n}:seed={cfg.seed}:ambiguous={cfg.ambiguous_rate}"
                                f":naming={cfg.naming_signal}"])
    _out(f"wrote {len(records)} synthetic records to {out}")


def cmd_split(args):
    rc = _run_config(args)
    records = _load_corpus(rc.corpus)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    sets = split_and_balance(make_dataset(records, rc.task), ratios, rc.seed, rc.task)
    paths = write_manifests(rc.splits_dir, sets)
    _out(f"{'task':<12}{'split':<12}{'positive':>10}{'negative':>10}{'total':>8}")
    for s in sets:
        neg, pos = s.counts()
        _out(f"{rc.task:<12}{s.split:<12}{pos:>10}{neg:>10}{len(s):>8}")
    for p in paths:
        log.info("wrote %s", p)


def _split_sequences(records_by_id, lset, repr_kind):
    missing = [rid for rid in lset.ids if rid not in records_by_id]
    if missing:
        raise CliError(f"{len(missing)} manifest ids are not in the corpus (first: {missing[0]})")
    return [represent(records_by_id[rid], repr_kind) for rid in lset.ids], [y for _, y in lset.items]


def ckpt_stem(rc) -> Path:
    model = "bow" if rc.model in ("bow", "logistic") else rc.model
    return Path(rc.checkpoints_dir) / f"{rc.task}.{model}.{rc.repr_kind}"


def cmd_train(args):
    from .models import TrainedModel, save_checkpoint, train_model
    from .vocab import build_vocab, encode

    rc = _run_config(args)
    kind = MODEL_ALIASES[rc.model]
    records = {r.id: r for r in _load_corpus(rc.corpus)}
    try:
        train_set, valid_set, _ = read_manifests(rc.splits_dir, rc.task)
    except FileNotFoundError as exc:
        raise CliError(f"split manifests missing: {exc}") from None
    tr_seqs, tr_y = _split_sequences(records, train_set, rc.repr_kind)
    va_seqs, va_y = _split_sequences(records, valid_set, rc.repr_kind)
    tc = rc.train
    vocab = build_vocab(tr_seqs, tc.min_freq, tc.max_len)
    tr = [encode(s, vocab, tc.max_len, y) for s, y in zip(tr_seqs, tr_y)]
    va = [encode(s, vocab, tc.max_len, y) for s, y in zip(va_seqs, va_y)]
    _out(f"task={rc.task} model={rc.model} repr={rc.repr_kind} train={len(tr)} valid={len(va)} "
         f"vocab={len(vocab)}")
    _out(f"{'epoch':>5}{'train_loss':>12}{'valid_loss':>12}{'valid_acc':>11}")
    progress = lambda e, tl, vl, va_: _out(f"{e:>5}{tl:>12.4f}{vl:>12.4f}{va_:>11.4f}")
    final, hist = train_model(kind, tr, va, len(vocab), tc, progress)
    stem = ckpt_stem(rc)
    stem.parent.mkdir(parents=True, exist_ok=True)
    try:
        save_checkpoint(f"{stem}.ckpt", TrainedModel(hist.best_model, vocab, rc.repr_kind, rc.task, tc))
        save_checkpoint(f"{stem}.final.ckpt", TrainedModel(final, vocab, rc.repr_kind, rc.task, tc))
        Path(f"{stem}.curves.csv").write_text(hist.to_csv(), encoding="utf-8")
        vocab.save(f"{stem}.vocab")
    except OSError as exc:
        raise CliError(f"cannot write checkpoint: {exc}") from None
    last = hist.rows[-1][3] if hist.rows else float("nan")
    _out(f"final valid accuracy {last:.4f}; best epoch {hist.best_epoch}; checkpoint {stem}.ckpt")


def cmd_evaluate(args):
    from .evaluation import (align_predictions, evaluate_predictions, format_report,
                             import_external_predictions)
    from .models import predict_many

    rc = _run_config(args)
    trained = _load_ckpt(args.checkpoint)
    records = {r.id: r for r in _load_corpus(rc.corpus)}
    try:
        sets = {s.split: s for s in read_manifests(rc.splits_dir, trained.task)}
    except FileNotFoundError as exc:
        raise CliError(f"split manifests missing: {exc}") from None
    lset = sets[args.split]
    missing = [rid for rid in lset.ids if rid not in records]
    if missing:
        raise CliError(f"{len(missing)} manifest ids are not in the corpus")
    recs = [records[rid] for rid in lset.ids]
    labels = [y for _, y in lset.items]
    preds = [p.label for p in predict_many(trained, recs, args.threshold)]
    name = f"{trained.kind}/{trained.repr_kind}"
    report = evaluate_predictions(preds, labels, recs)
    rows = [(name, report)]
    if args.external:
        ext = align_predictions(import_external_predictions(args.external), lset.ids)
        rows.append(("external", evaluate_predictions(ext, labels, recs)))
    _out(f"task={trained.task} split={args.split} n={len(labels)}")
    for n, rep in rows:
        _out(format_report(n, rep))
    out_dir = Path(rc.reports_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{Path(args.checkpoint).stem}.{args.split}.jsonl"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for n, rep in rows:
            fh.write(json.dumps({"name": n, "task": trained.task, "split": args.split, **rep.to_json()},
                                sort_keys=True) + "\n")


def cmd_benchmark(args):
    from .evaluation import EmptyBenchmark, benchmark_run, format_report

    trained = _load_ckpt(args.checkpoint)
    try:
        rep = benchmark_run(trained, args.labeled)
    except (EmptyBenchmark, FileNotFoundError) as exc:
        raise CliError(str(exc)) from None
    _out(format_report(f"{trained.kind}/{trained.repr_kind}", rep))


def cmd_predict(args):
    from .models.predict import threshold

    trained = _load_ckpt(args.checkpoint)
    tau = args.threshold if args.threshold is not None else trained.config.threshold
    for path in args.files:
        snippets = _snippets(path)
        probs = trained.predict_proba_tokens([represent(s.code_text, trained.repr_kind) for s in snippets])
        for s, p in zip(snippets, probs):
            _out(f"{path}:{s.line}\t{threshold(float(p), tau)}\t{float(p):.4f}")


def cmd_explain(args):
    from .explain import explain, explanation_json, format_explanation

    trained = _load_ckpt(args.checkpoint)
    snippets = _snippets(args.file)
    chosen = snippets[0]
    if args.line is not None:
        match = [s for s in snippets if s.line == args.line]
        if not match:
            raise CliError(f"{args.file}: no loop starts at line {args.line}")
        chosen = match[0]
    seed = args.seed if args.seed is not None else 0
    exp = explain(trained, chosen.code_text, n_samples=args.samples, seed=seed)
    _out(f"{args.file}:{chosen.line}")
    _out(format_explanation(exp, args.top_k))
    if args.json_out:
        Path(args.json_out).write_text(explanation_json(exp, args.top_k) + "\n", encoding="utf-8")


def cmd_represent(args):
    for s in _snippets(args.file):
        _out(" ".join(represent(s.code_text, args.kind)))


# -- parser -------------------------------------------------------------------

def _train_flags(p):
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", "--lr", dest="learning_rate", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--d-model", type=int)
    p.add_argument("--n-heads", type=int)
    p.add_argument("--n-layers", type=int)
    p.add_argument("--d-ff", type=int)
    p.add_argument("--d-head", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--min-freq", type=int)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ompadvisor", description="Predict whether C for-loops want an "
                                  "OpenMP parallel-for directive.")
    top.add_argument("--config", help="flat key = value run configuration file")
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", help="collect loop records from C source trees")
    p.add_argument("dirs", nargs="+")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-dedup", action="store_true")
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("stats", help="print corpus statistics")
    p.add_argument("corpus_file", nargs="?")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a generated corpus with a known labelling rule")
    p.add_argument("--out")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int)
    p.add_argument("--ambiguous-rate", type=float, default=0.3)
    p.add_argument("--naming-signal", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="balanced train/validation/test manifests")
    p.add_argument("--corpus")
    p.add_argument("--task", choices=("directive", "private", "reduction"))
    p.add_argument("--seed", type=int)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--out-dir", dest="splits_dir")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a classifier on one task and representation")
    p.add_argument("--corpus")
    p.add_argument("--splits-dir")
    p.add_argument("--checkpoints-dir", "--out-dir", dest="checkpoints_dir")
    p.add_argument("--task", choices=("directive", "private", "reduction"))
    p.add_argument("--model", choices=("bow", "transformer"))
    p.add_argument("--repr", choices=REPR_KINDS)
    p.add_argument("--seed", type=int)
    _train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on a split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test", choices=("train", "validation", "test"))
    p.add_argument("--corpus")
    p.add_argument("--splits-dir")
    p.add_argument("--reports-dir")
    p.add_argument("--external", help="record_id,label predictions of an external tool")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="score a checkpoint on a labeled tree or corpus file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("labeled")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("predict", help="label every for-loop in C files")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="token influence for one loop")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("file")
    p.add_argument("--line", type=int, help="explain the loop starting at this line")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("represent", help="print a representation of each loop in a file")
    p.add_argument("file")
    p.add_argument("--kind", choices=REPR_KINDS, default="text")
    p.set_defaults(func=cmd_represent)
    return top


def main(argv=None) -> int:
    from .models import CheckpointError, NonFiniteLoss

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NonFiniteLoss as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LexError, ParseError) as exc:
        print(f"error: parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CheckpointError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
