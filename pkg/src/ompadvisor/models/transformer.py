"""Transformer-encoder classifier in float64 numpy with hand-written backprop.

Post-norm encoder layers (attention, add & norm, GELU feed-forward, add & norm),
learned positions, CLS pooling, then dense -> ReLU -> dense -> 2-way softmax.
"""
from __future__ import annotations

import math

import numpy as np

from .losses import EPS_P, bce_grad_logit, bce_loss, softmax

LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


OUT_GAIN = 0.1


class IdOutOfRange(IndexError):
    pass


def _uniform(rng, shape, fan_in, gain=1.0):
    bound = gain / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def _dropout(x, rate, rng):
    if not rate or rng is None:
        return x, None
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * keep, keep


def _ln_fwd(x, g, b):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(-1, keepdims=True) + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)


def _ln_bwd(dy, cache, g):
    xhat, inv = cache
    dg = (dy * xhat).sum(axis=(0, 1))
    db = dy.sum(axis=(0, 1))
    dxh = dy * g
    dx = inv * (dxh - dxh.mean(-1, keepdims=True) - xhat * (dxh * xhat).mean(-1, keepdims=True))
    return dx, dg, db


def _gelu(u):
    # u * u * u rather than u ** 3: the float power ufunc is ~15x slower
    u2 = u * u
    t = np.tanh(_GELU_C * u * (1.0 + 0.044715 * u2))
    return 0.5 * u * (1.0 + t), t


def _gelu_grad(u, t):
    u2 = u * u
    return 0.5 * (1.0 + t) + (0.5 * _GELU_C) * u * (1.0 - t * t) * (1.0 + 3 * 0.044715 * u2)


def _mm(a, w):
    """(..., n) @ (n, m) with a 2-D BLAS call."""
    return (a.reshape(-1, a.shape[-1]) @ w).reshape(*a.shape[:-1], w.shape[1])


def _wgrad(a, d):
    return a.reshape(-1, a.shape[-1]).T @ d.reshape(-1, d.shape[-1])


LAYER_PARAMS = ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo", "ln1_g", "ln1_b",
                "w1", "b1", "w2", "b2", "ln2_g", "ln2_b")


class TransformerClassifier:
    kind = "transformer"

    def __init__(self, params: dict, n_heads: int):
        self.params = params
        self.n_heads = n_heads

    # -- construction ---------------------------------------------------------

    @classmethod
    def init(cls, vocab_size: int, config, rng=None) -> TransformerClassifier:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        D, F, Dh = config.d_model, config.d_ff, config.d_head
        p = {
            "tok_emb": _uniform(rng, (vocab_size, D), D),
            "pos_emb": _uniform(rng, (config.max_len, D), D),
        }
        for l in range(config.n_layers):
            for w, b in (("wq", "bq"), ("wk", "bk"), ("wv", "bv"), ("wo", "bo")):
                p[f"l{l}.{w}"] = _uniform(rng, (D, D), D)
                p[f"l{l}.{b}"] = _uniform(rng, (D,), D)
            p[f"l{l}.ln1_g"] = np.ones(D)
            p[f"l{l}.ln1_b"] = np.zeros(D)
            p[f"l{l}.w1"] = _uniform(rng, (D, F), D)
            p[f"l{l}.b1"] = _uniform(rng, (F,), D)
            p[f"l{l}.w2"] = _uniform(rng, (F, D), F)
            p[f"l{l}.b2"] = _uniform(rng, (D,), F)
            p[f"l{l}.ln2_g"] = np.ones(D)
            p[f"l{l}.ln2_b"] = np.zeros(D)
        p["head.w1"] = _uniform(rng, (D, Dh), D)
        p["head.b1"] = _uniform(rng, (Dh,), D)
        # small output layer: the ReLU features have a positive mean, so a full-range
        # init starts the classifier visibly off 0.5
        p["head.w2"] = _uniform(rng, (Dh, 2), Dh, OUT_GAIN)
        p["head.b2"] = _uniform(rng, (2,), Dh, OUT_GAIN)
        return cls(p, config.n_heads)

    def copy(self) -> TransformerClassifier:
        return TransformerClassifier({k: v.copy() for k, v in self.params.items()}, self.n_heads)

    @property
    def n_layers(self) -> int:
        return sum(1 for k in self.params if k.endswith(".wq"))

    @property
    def vocab_size(self) -> int:
        return self.params["tok_emb"].shape[0]

    @property
    def max_len(self) -> int:
        return self.params["pos_emb"].shape[0]

    def meta(self) -> dict:
        return {"kind": self.kind, "n_heads": self.n_heads}

    # -- forward --------------------------------------------------------------

    def _check(self, ids, lengths):
        ids = np.asarray(ids, dtype=np.int64)
        if ids.ndim == 1:
            ids = ids[None]
        if ids.size and (ids.min() < 0 or ids.max() >= self.vocab_size):
            raise IdOutOfRange(f"token id outside [0, {self.vocab_size})")
        if lengths is None:
            # leading non-PAD run
            nonpad = ids != 0
            lengths = np.where(nonpad.all(1), ids.shape[1], np.argmin(nonpad, axis=1))
        lengths = np.clip(np.asarray(lengths, dtype=np.int64).reshape(-1), 1, ids.shape[1])
        if lengths.max() > self.max_len:
            raise IdOutOfRange(f"sequence longer than max_len={self.max_len}")
        return ids, lengths

    def _forward(self, ids, lengths, rate=0.0, rng=None):
        P = self.params
        T = int(lengths.max())
        # positions >= true length never reach the CLS row, so cutting the
        # batch at its longest sequence is exact
        ids = ids[:, :T]
        B = ids.shape[0]
        H = self.n_heads
        D = P["tok_emb"].shape[1]
        dh = D // H
        keep = np.arange(T)[None, :] < lengths[:, None]
        bias = np.where(keep, 0.0, -np.inf)[:, None, None, :]
        x = P["tok_emb"][ids] + P["pos_emb"][:T]
        x, emb_mask = _dropout(x, rate, rng)
        caches = []
        scale = 1.0 / math.sqrt(dh)
        for l in range(self.n_layers):
            g = lambda n: P[f"l{l}.{n}"]
            q = (_mm(x, g("wq")) + g("bq")).reshape(B, T, H, dh).transpose(0, 2, 1, 3)
            k = (_mm(x, g("wk")) + g("bk")).reshape(B, T, H, dh).transpose(0, 2, 1, 3)
            v = (_mm(x, g("wv")) + g("bv")).reshape(B, T, H, dh).transpose(0, 2, 1, 3)
            a = softmax(q @ k.transpose(0, 1, 3, 2) * scale + bias)
            a_d, att_mask = _dropout(a, rate, rng)
            ctx = (a_d @ v).transpose(0, 2, 1, 3).reshape(B, T, D)
            h1, ln1 = _ln_fwd(x + _mm(ctx, g("wo")) + g("bo"), g("ln1_g"), g("ln1_b"))
            u = _mm(h1, g("w1")) + g("b1")
            f, t = _gelu(u)
            out, ln2 = _ln_fwd(h1 + _mm(f, g("w2")) + g("b2"), g("ln2_g"), g("ln2_b"))
            caches.append((x, q, k, v, a, a_d, att_mask, ctx, h1, ln1, u, f, t, ln2))
            x = out
        cls = x[:, 0]
        cls_d, head_mask = _dropout(cls, rate, rng)
        z = cls_d @ P["head.w1"] + P["head.b1"]
        r = np.maximum(z, 0.0)
        logits = r @ P["head.w2"] + P["head.b2"]
        cache = (ids, T, emb_mask, caches, x, cls_d, head_mask, z, r, rate)
        return logits, cache

    def logits(self, ids, lengths=None) -> np.ndarray:
        ids, lengths = self._check(ids, lengths)
        return self._forward(ids, lengths)[0]

    def predict_proba(self, ids, lengths=None, batch_size: int = 64) -> np.ndarray:
        """Positive-class probability per row; dropout off."""
        ids, lengths = self._check(ids, lengths)
        out = []
        for s in range(0, ids.shape[0], batch_size):
            out.append(softmax(self._forward(ids[s:s + batch_size], lengths[s:s + batch_size])[0])[:, 1])
        return np.concatenate(out) if out else np.zeros(0)

    # -- training -------------------------------------------------------------

    def loss_and_grads(self, ids, lengths, labels, rate=0.0, rng=None):
        """Mean BCE over the batch and its gradient for every parameter."""
        ids, lengths = self._check(ids, lengths)
        y = np.asarray(labels, dtype=np.float64)
        logits, cache = self._forward(ids, lengths, rate, rng)
        p = softmax(logits)[:, 1]
        loss = float(np.mean(bce_loss(p, y)))
        # p = sigmoid(l1 - l0)
        d = bce_grad_logit(p, y) / len(y)
        dlogits = np.stack([-d, d], axis=1)
        return loss, self._backward(cache, dlogits)

    def _backward(self, cache, dlogits):
        P = self.params
        ids, T, emb_mask, caches, x_last, cls_d, head_mask, z, r, rate = cache
        B = ids.shape[0]
        H = self.n_heads
        D = P["tok_emb"].shape[1]
        dh = D // H
        scale = 1.0 / math.sqrt(dh)
        G = {}
        G["head.w2"] = r.T @ dlogits
        G["head.b2"] = dlogits.sum(0)
        dz = (dlogits @ P["head.w2"].T) * (z > 0)
        G["head.w1"] = cls_d.T @ dz
        G["head.b1"] = dz.sum(0)
        dcls = dz @ P["head.w1"].T
        if head_mask is not None:
            dcls = dcls * head_mask
        dx = np.zeros_like(x_last)
        dx[:, 0] = dcls
        for l in reversed(range(len(caches))):
            x, q, k, v, a, a_d, att_mask, ctx, h1, ln1, u, f, t, ln2 = caches[l]
            g = lambda n: P[f"l{l}.{n}"]
            pre = f"l{l}."
            dr2, G[pre + "ln2_g"], G[pre + "ln2_b"] = _ln_bwd(dx, ln2, g("ln2_g"))
            G[pre + "w2"] = _wgrad(f, dr2)
            G[pre + "b2"] = dr2.sum(axis=(0, 1))
            du = _mm(dr2, g("w2").T) * _gelu_grad(u, t)
            G[pre + "w1"] = _wgrad(h1, du)
            G[pre + "b1"] = du.sum(axis=(0, 1))
            dh1 = dr2 + _mm(du, g("w1").T)
            dr1, G[pre + "ln1_g"], G[pre + "ln1_b"] = _ln_bwd(dh1, ln1, g("ln1_g"))
            G[pre + "wo"] = _wgrad(ctx, dr1)
            G[pre + "bo"] = dr1.sum(axis=(0, 1))
            dctx = _mm(dr1, g("wo").T).reshape(B, T, H, dh).transpose(0, 2, 1, 3)
            da = dctx @ v.transpose(0, 1, 3, 2)
            dv = a_d.transpose(0, 1, 3, 2) @ dctx
            if att_mask is not None:
                da = da * att_mask
            ds = a * (da - (da * a).sum(-1, keepdims=True)) * scale
            dq = ds @ k
            dk = ds.transpose(0, 1, 3, 2) @ q
            merge = lambda t_: t_.transpose(0, 2, 1, 3).reshape(B, T, D)
            dq, dk, dv = merge(dq), merge(dk), merge(dv)
            dx = dr1.copy()
            for name, dproj in (("q", dq), ("k", dk), ("v", dv)):
                G[pre + "w" + name] = _wgrad(x, dproj)
                G[pre + "b" + name] = dproj.sum(axis=(0, 1))
                dx += _mm(dproj, g("w" + name).T)
        if emb_mask is not None:
            dx = dx * emb_mask
        dtok = np.zeros_like(P["tok_emb"])
        np.add.at(dtok, ids.reshape(-1), dx.reshape(-1, D))
        G["tok_emb"] = dtok
        dpos = np.zeros_like(P["pos_emb"])
        dpos[:T] = dx.sum(0)
        G["pos_emb"] = dpos
        return {k: G[k] for k in P}


__all__ = ["TransformerClassifier", "IdOutOfRange", "EPS_P"]
