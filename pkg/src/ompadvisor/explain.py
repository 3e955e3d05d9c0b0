"""Token-drop local surrogate explanations of a single prediction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .representation import ReprKind, represent, token_spans

RIDGE_ALPHA = 1.0


class SequenceTooShort(ValueError):
    pass


@dataclass
class Explanation:
    tokens: list[tuple[int, str]]
    weights: np.ndarray
    predicted_p: float
    n_samples: int
    intercept: float = 0.0
    r2: float = 0.0
    spans: list | None = None


def kernel_weights(masks: np.ndarray) -> np.ndarray:
    """sqrt(exp(-d^2 / w^2)) on Hamming distance from the full mask, w = sqrt(L).

    Rescaled to mean 1 so the fixed ridge strength means the same thing for
    short and long sequences.
    """
    L = masks.shape[1]
    d = L - masks.sum(axis=1)
    logk = -0.5 * d.astype(np.float64) ** 2 / L
    k = np.exp(logk - logk.max())
    return k / k.mean()


def weighted_ridge(X, y, sw, alpha=RIDGE_ALPHA):
    """Ridge with an unpenalized intercept. Returns ``(coef, intercept, r2)``."""
    wsum = sw.sum()
    xm = (sw[:, None] * X).sum(0) / wsum
    ym = float((sw * y).sum() / wsum)
    Xc, yc = X - xm, y - ym
    A = Xc.T @ (sw[:, None] * Xc) + alpha * np.eye(X.shape[1])
    coef = np.linalg.solve(A, Xc.T @ (sw * yc))
    resid = yc - Xc @ coef
    ss_tot = float((sw * yc * yc).sum())
    r2 = 1.0 - float((sw * resid * resid).sum()) / ss_tot if ss_tot > 0 else 1.0
    return coef, ym - float(xm @ coef), r2


def explain(trained, record, repr_kind=None, vocab=None, n_samples: int = 500, seed: int = 0,
            predict_fn=None) -> Explanation:
    """Fit a kernel-weighted ridge surrogate from keep-masks to model probabilities.

    ``predict_fn`` maps a list of token lists to probabilities; by default the
    trained model's own pipeline is used.
    """
    from .models.predict import ModelMismatch

    kind = ReprKind(repr_kind or trained.repr_kind).value
    if trained is not None and kind != trained.repr_kind:
        raise ModelMismatch(f"model was trained on {trained.repr_kind!r}, not {kind!r}")
    if vocab is not None and vocab.digest() != trained.vocab.digest():
        raise ModelMismatch("vocabulary does not match the checkpoint")
    if n_samples < 50:
        raise ValueError("n_samples must be at least 50")
    tokens = represent(record, kind) if not isinstance(record, list) else list(record)
    L = len(tokens)
    if L < 2:
        raise SequenceTooShort("need at least 2 tokens to explain")
    predict_fn = predict_fn or trained.predict_proba_tokens
    rng = np.random.default_rng(seed)
    masks = (rng.random((n_samples, L)) < 0.5).astype(np.float64)
    seqs = [[t for t, keep in zip(tokens, m) if keep] for m in masks]
    probs = np.asarray(predict_fn(seqs), dtype=np.float64)
    p0 = float(np.asarray(predict_fn([tokens]))[0])
    coef, intercept, r2 = weighted_ridge(masks, probs, kernel_weights(masks))
    spans = None
    if not isinstance(record, list):
        spans = token_spans(record, kind)
    return Explanation(list(enumerate(tokens)), coef, p0, n_samples, intercept, r2, spans)


def render_explanation(exp: Explanation, top_k: int = 10) -> list[dict]:
    """Top positions by |weight|; ties go to the earlier position."""
    order = sorted(range(len(exp.tokens)), key=lambda i: (-abs(float(exp.weights[i])), i))
    rows = []
    for rank, i in enumerate(order[:max(0, top_k)], start=1):
        pos, lexeme = exp.tokens[i]
        span = exp.spans[i] if exp.spans else None
        rows.append({"rank": rank, "position": pos, "token": lexeme,
                     "weight": float(exp.weights[i]), "span": list(span) if span else None})
    return rows


def format_explanation(exp: Explanation, top_k: int = 10) -> str:
    lines = [f"p(directive) = {exp.predicted_p:.4f}   samples = {exp.n_samples}   surrogate R^2 = {exp.r2:.3f}",
             f"{'rank':>4}  {'pos':>4}  {'weight':>10}  {'span':<11} token"]
    for row in render_explanation(exp, top_k):
        span = f"{row['span'][0]}-{row['span'][1]}" if row["span"] else "-"
        lines.append(f"{row['rank']:>4}  {row['position']:>4}  {row['weight']:>+10.4f}  {span:<11} {row['token']}")
    return "\n".join(lines)


def explanation_json(exp: Explanation, top_k: int = 10) -> str:
    return json.dumps({"predicted_p": exp.predicted_p, "n_samples": exp.n_samples,
                       "r2": exp.r2 if math.isfinite(exp.r2) else None,
                       "rows": render_explanation(exp, top_k)}, sort_keys=True)
