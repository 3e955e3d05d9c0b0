"""Single-file checkpoints: magic line, header length, JSON header, raw '<f8' tensors.

Byte-identical for identical models (no timestamps, sorted JSON keys).
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from ..representation import ReprKind, represent
from ..vocab import Vocabulary, encode, stack
from .config import TrainConfig
from .logistic import LogisticModel
from .transformer import TransformerClassifier

MAGIC = b"OMPADVISOR-CHECKPOINT\n"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class TrainedModel:
    """A model together with everything needed to feed it: vocab, view, task."""

    model: object
    vocab: Vocabulary
    repr_kind: str
    task: str
    config: TrainConfig

    @property
    def kind(self) -> str:
        return self.model.kind

    def encode_sequences(self, seqs, labels=None):
        labels = labels if labels is not None else [0] * len(seqs)
        return [encode(s, self.vocab, self.config.max_len, y) for s, y in zip(seqs, labels)]

    def predict_proba_tokens(self, seqs) -> np.ndarray:
        seqs = list(seqs)
        if not seqs:
            return np.zeros(0)
        ids, lengths, _ = stack(self.encode_sequences(seqs))
        return self.model.predict_proba(ids, lengths)

    def predict_proba_records(self, records) -> np.ndarray:
        return self.predict_proba_tokens([represent(r, self.repr_kind) for r in records])


def save_checkpoint(path, trained: TrainedModel) -> None:
    model = trained.model
    table, blobs, offset = [], [], 0
    for name, arr in model.params.items():
        data = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        table.append({"name": name, "shape": list(arr.shape), "offset": offset, "nbytes": len(data)})
        blobs.append(data)
        offset += len(data)
    header = {
        "format_version": FORMAT_VERSION,
        "task": trained.task,
        "repr_kind": ReprKind(trained.repr_kind).value,
        "model": model.meta(),
        "vocab_hash": trained.vocab.digest(),
        "vocab": {"tokens": list(trained.vocab.tokens), "min_freq": trained.vocab.min_freq,
                  "max_len": trained.vocab.max_len},
        "config": trained.config.to_dict(),
        "tensors": table,
    }
    hbytes = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(hbytes)))
        fh.write(hbytes)
        for b in blobs:
            fh.write(b)


def load_checkpoint(path) -> TrainedModel:
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.startswith(MAGIC):
        raise CheckpointError(f"{path}: not a checkpoint file")
    pos = len(MAGIC)
    try:
        (hlen,) = struct.unpack_from("<Q", raw, pos)
        header = json.loads(raw[pos + 8:pos + 8 + hlen].decode("utf-8"))
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: corrupt header: {exc}") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version")
    base = pos + 8 + hlen
    params = {}
    for t in header["tensors"]:
        start = base + t["offset"]
        if start + t["nbytes"] > len(raw):
            raise CheckpointError(f"{path}: truncated tensor {t['name']}")
        arr = np.frombuffer(raw, dtype="<f8", count=t["nbytes"] // 8, offset=start)
        params[t["name"]] = arr.reshape(t["shape"]).astype(np.float64)
    v = header["vocab"]
    vocab = Vocabulary(v["tokens"], v["min_freq"], v["max_len"])
    if vocab.digest() != header["vocab_hash"]:
        raise CheckpointError(f"{path}: vocabulary hash mismatch")
    meta = header["model"]
    if meta["kind"] == "transformer":
        model = TransformerClassifier(params, meta["n_heads"])
    elif meta["kind"] == "logistic":
        model = LogisticModel(params["weights"], params["bias"])
    else:
        raise CheckpointError(f"{path}: unknown model kind {meta['kind']!r}")
    return TrainedModel(model, vocab, header["repr_kind"], header["task"],
                        TrainConfig.from_dict(header["config"]))
