"""Task datasets (directive, private, reduction) and balanced 80/10/10 splits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TASKS = ("directive", "private", "reduction")
SPLITS = ("train", "validation", "test")


class DegenerateDataset(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSet:
    task: str
    split: str
    items: tuple[tuple[str, int], ...]

    def __len__(self):
        return len(self.items)

    @property
    def ids(self) -> list[str]:
        return [rid for rid, _ in self.items]

    def counts(self) -> tuple[int, int]:
        pos = sum(lbl for _, lbl in self.items)
        return len(self.items) - pos, pos


def make_directive_dataset(corpus) -> list[tuple[str, int]]:
    return [(r.id, int(r.directive is not None)) for r in corpus]


def make_clause_dataset(corpus, clause: str) -> list[tuple[str, int]]:
    if clause == "private":
        has = lambda d: bool(d.private_vars)
    elif clause == "reduction":
        has = lambda d: bool(d.reduction_clauses)
    else:
        raise ValueError(f"unknown clause {clause!r}")
    return [(r.id, int(has(r.directive))) for r in corpus if r.directive is not None]


def make_dataset(corpus, task: str) -> list[tuple[str, int]]:
    if task == "directive":
        return make_directive_dataset(corpus)
    if task in ("private", "reduction"):
        return make_clause_dataset(corpus, task)
    raise ValueError(f"unknown task {task!r}")


def split_sizes(total: int, ratios) -> tuple[int, int, int]:
    """Validation and test get ``round(total * r)`` (half up); train the rest."""
    n_val = math.floor(total * ratios[1] + 0.5)
    n_test = math.floor(total * ratios[2] + 0.5)
    return total - n_val - n_test, n_val, n_test


def split_and_balance(items, ratios=(0.8, 0.1, 0.1), seed: int = 0, task: str = "directive"):
    """Downsample the majority class, then cut balanced train/validation/test sets."""
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    seen, pos, neg = set(), [], []
    for rid, label in items:
        if rid in seen:
            continue
        seen.add(rid)
        (pos if label else neg).append((rid, int(bool(label))))
    if not pos or not neg:
        raise DegenerateDataset(f"need both classes, got {len(pos)} positive / {len(neg)} negative")

    rng = np.random.default_rng(seed)
    pos = [pos[i] for i in rng.permutation(len(pos))]
    neg = [neg[i] for i in rng.permutation(len(neg))]
    m = min(len(pos), len(neg))
    pos, neg = pos[:m], neg[:m]

    sizes = split_sizes(2 * m, ratios)
    out, pi, ni, odd_turn = [], 0, 0, 0
    for split, size in zip(SPLITS, sizes):
        n_pos = size // 2
        if size % 2:
            # odd splits alternate which class gets the extra example
            n_pos += odd_turn == 0
            odd_turn ^= 1
        n_neg = size - n_pos
        chunk = pos[pi:pi + n_pos] + neg[ni:ni + n_neg]
        pi += n_pos
        ni += n_neg
        chunk = [chunk[i] for i in rng.permutation(len(chunk))]
        out.append(LabeledSet(task, split, tuple(chunk)))
    return tuple(out)


def manifest_path(directory, task: str, split: str) -> Path:
    return Path(directory) / f"{task}.{split}.tsv"


def write_manifests(directory, sets) -> list[Path]:
    Path(directory).mkdir(parents=True, exist_ok=True)
    paths = []
    for s in sets:
        p = manifest_path(directory, s.task, s.split)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            for rid, label in s.items:
                fh.write(f"{rid}\t{label}\t{s.split}\n")
        paths.append(p)
    return paths


def read_manifest(path, task: str | None = None) -> LabeledSet:
    p = Path(path)
    if task is None:
        task = p.name.split(".")[0]
    items, split = [], None
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[1] not in ("0", "1") or parts[2] not in SPLITS:
                raise ValueError(f"{p}:{lineno}: malformed manifest line")
            if split is None:
                split = parts[2]
            elif parts[2] != split:
                raise ValueError(f"{p}:{lineno}: mixed splits in one manifest")
            items.append((parts[0], int(parts[1])))
    if split is None:
        split = p.name.split(".")[1] if p.name.count(".") >= 2 else "train"
    return LabeledSet(task, split, tuple(items))


def read_manifests(directory, task: str):
    return tuple(read_manifest(manifest_path(directory, task, s), task) for s in SPLITS)
