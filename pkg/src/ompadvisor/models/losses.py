from __future__ import annotations

import numpy as np

EPS_P = 1e-7


def bce_loss(p, y):
    """Binary cross-entropy with the probability clamped to [1e-7, 1 - 1e-7]."""
    p = np.clip(np.asarray(p, dtype=np.float64), EPS_P, 1.0 - EPS_P)
    y = np.asarray(y, dtype=np.float64)
    out = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return float(out) if out.ndim == 0 else out


def bce_grad_logit(p, y):
    """d bce / d logit for p = sigmoid(logit); zero where the clamp is active."""
    p = np.asarray(p, dtype=np.float64)
    live = (p > EPS_P) & (p < 1.0 - EPS_P)
    return np.where(live, p - y, 0.0)


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax(z, axis=-1):
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


class NonFiniteLoss(FloatingPointError):
    pass
