from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..vocab import stack
from .config import TrainConfig
from .logistic import LogisticModel
from .losses import NonFiniteLoss, bce_loss
from .optim import AdamW
from .transformer import TransformerClassifier

log = logging.getLogger(__name__)

CURVE_COLUMNS = ("epoch", "train_loss", "valid_loss", "valid_acc")


@dataclass
class History:
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)
    best_epoch: int = 0
    best_model: object = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CURVE_COLUMNS) + "\n")
        for epoch, tl, vl, va in self.rows:
            buf.write(f"{epoch},{tl:.17g},{vl:.17g},{va:.17g}\n")
        return buf.getvalue()

    @property
    def valid_acc(self) -> list[float]:
        return [r[3] for r in self.rows]


def _arrays(data):
    if isinstance(data, tuple) and len(data) == 3:
        return tuple(np.asarray(a) for a in data)
    return stack(data)


def evaluate_loss(model, data, threshold=0.5) -> tuple[float, float]:
    """Mean BCE and accuracy at ``threshold`` (label 1 iff p > threshold)."""
    ids, lengths, y = _arrays(data)
    if len(y) == 0:
        return math.nan, math.nan
    p = model.predict_proba(ids, lengths)
    return float(np.mean(bce_loss(p, y))), float(np.mean((p > threshold).astype(int) == y))


def train_model(kind: str, train, valid, vocab_size: int, config: TrainConfig, progress=None):
    """Mini-batch AdamW on mean BCE. Returns ``(final_model, History)``.

    The history keeps a copy of the lowest-validation-loss model as
    ``best_model``; one RNG seeded from ``config.seed`` drives init,
    shuffling and dropout, so equal seeds give equal runs.
    """
    rng = np.random.default_rng(config.seed)
    if kind == "transformer":
        model = TransformerClassifier.init(vocab_size, config, rng)
    elif kind == "logistic":
        model = LogisticModel.init(vocab_size)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    ids, lengths, y = _arrays(train)
    if len(y) == 0:
        raise ValueError("empty training set")
    opt = AdamW(model.params, config.lr_for(kind), config.beta1, config.beta2, config.eps,
                config.weight_decay)
    hist = History(best_model=model.copy())
    best_loss = math.inf
    bs = config.batch_size
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(y))
        total, seen = 0.0, 0
        for b, s in enumerate(range(0, len(y), bs)):
            idx = order[s:s + bs]
            loss, grads = model.loss_and_grads(ids[idx], lengths[idx], y[idx], config.dropout, rng)
            if not math.isfinite(loss):
                big = max(float(np.abs(v).max()) for v in model.params.values())
                raise NonFiniteLoss(f"epoch {epoch} batch {b}: loss={loss}, max |param|={big:.3g}")
            opt.step(model.params, grads)
            total += loss * len(idx)
            seen += len(idx)
        vl, va = evaluate_loss(model, valid, config.threshold)
        hist.rows.append((epoch, total / seen, vl, va))
        if math.isnan(vl) or vl < best_loss:
            best_loss = vl if not math.isnan(vl) else best_loss
            hist.best_epoch = epoch
            hist.best_model = model.copy()
        log.info("epoch %d train_loss=%.4f valid_loss=%.4f valid_acc=%.4f", epoch, total / seen, vl, va)
        if progress:
            progress(epoch, total / seen, vl, va)
    return model, hist


def train_transformer(train, valid, vocab_size: int, config: TrainConfig, progress=None):
    return train_model("transformer", train, valid, vocab_size, config, progress)


def train_logistic(train, valid, vocab_size: int, config: TrainConfig, progress=None):
    return train_model("logistic", train, valid, vocab_size, config, progress)
