"""Bag-of-words counts fed to a logistic regression."""
from __future__ import annotations

import numpy as np

from ..vocab import CLS, PAD
from .losses import bce_grad_logit, bce_loss, sigmoid


def bow_featurize(tokens, vocab) -> np.ndarray:
    """Occurrence counts over the vocabulary; unknown tokens count at UNK."""
    idx = [vocab.id_of(t) for t in tokens]
    return np.bincount(np.asarray(idx, dtype=np.int64), minlength=len(vocab)).astype(np.float64)


def bow_from_ids(ids, lengths, vocab_size: int) -> np.ndarray:
    """Count matrix from encoded rows; CLS and the padded tail are ignored."""
    ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
    lengths = np.asarray(lengths, dtype=np.int64).reshape(-1)
    live = np.arange(ids.shape[1])[None, :] < lengths[:, None]
    live &= (ids != CLS) & (ids != PAD)
    rows = np.broadcast_to(np.arange(ids.shape[0])[:, None], ids.shape)[live]
    X = np.zeros((ids.shape[0], vocab_size))
    np.add.at(X, (rows, ids[live]), 1.0)
    return X


class LogisticModel:
    kind = "logistic"

    def __init__(self, weights: np.ndarray, bias: float | np.ndarray):
        self.params = {"weights": np.asarray(weights, dtype=np.float64),
                       "bias": np.asarray(bias, dtype=np.float64).reshape(1)}

    @classmethod
    def init(cls, vocab_size: int, config=None, rng=None) -> LogisticModel:
        return cls(np.zeros(vocab_size), 0.0)

    @property
    def weights(self) -> np.ndarray:
        return self.params["weights"]

    @property
    def bias(self) -> float:
        return float(self.params["bias"][0])

    @property
    def vocab_size(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> LogisticModel:
        return LogisticModel(self.weights.copy(), self.params["bias"].copy())

    def meta(self) -> dict:
        return {"kind": self.kind}

    def logit_features(self, X) -> np.ndarray:
        return X @ self.weights + self.params["bias"][0]

    def proba_features(self, X) -> np.ndarray:
        return sigmoid(self.logit_features(X))

    def predict_proba(self, ids, lengths=None, batch_size: int = 0) -> np.ndarray:
        ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
        if lengths is None:
            lengths = np.full(ids.shape[0], ids.shape[1])
        return self.proba_features(bow_from_ids(ids, lengths, self.vocab_size))

    def loss_and_grads(self, ids, lengths, labels, rate=0.0, rng=None):
        X = bow_from_ids(ids, lengths, self.vocab_size)
        y = np.asarray(labels, dtype=np.float64)
        p = self.proba_features(X)
        loss = float(np.mean(bce_loss(p, y)))
        d = bce_grad_logit(p, y) / len(y)
        return loss, {"weights": X.T @ d, "bias": np.array([d.sum()])}
