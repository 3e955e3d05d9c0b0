from __future__ import annotations

from dataclasses import dataclass

from ..representation import ReprKind
from .checkpoint import TrainedModel


class ModelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PredictionResult:
    probability: float
    label: int


def threshold(p: float, tau: float = 0.5) -> int:
    """Strict: a tie at tau is negative."""
    return int(p > tau)


def predict(trained: TrainedModel, record, repr_kind=None, vocab=None, tau=None) -> PredictionResult:
    if repr_kind is not None and ReprKind(repr_kind).value != trained.repr_kind:
        raise ModelMismatch(f"model was trained on {trained.repr_kind!r}, not {ReprKind(repr_kind).value!r}")
    if vocab is not None and vocab.digest() != trained.vocab.digest():
        raise ModelMismatch("vocabulary does not match the checkpoint")
    tau = trained.config.threshold if tau is None else tau
    p = float(trained.predict_proba_records([record])[0])
    return PredictionResult(p, threshold(p, tau))


def predict_many(trained: TrainedModel, records, tau=None) -> list[PredictionResult]:
    tau = trained.config.threshold if tau is None else tau
    probs = trained.predict_proba_records(list(records))
    return [PredictionResult(float(p), threshold(float(p), tau)) for p in probs]
