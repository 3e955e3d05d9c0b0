"""Finite-difference check of the analytic gradients."""
from __future__ import annotations

import numpy as np

from .logistic import LogisticModel

STEP = 1e-5
# relative error denominator floor: gradients below this are compared absolutely
DENOM_FLOOR = 1e-6


def _groups(model, ids, length):
    """Parameter groups to sample from, restricted to entries that can matter."""
    P = model.params
    if isinstance(model, LogisticModel):
        used = np.unique(ids[:length])
        return [("weights", [(i,) for i in used]), ("bias", [(0,)])]
    D = P["tok_emb"].shape[1]
    groups = []
    rows = np.unique(ids[:length])
    groups.append(("tok_emb", [(r, c) for r in rows for c in range(D)]))
    groups.append(("pos_emb", [(r, c) for r in range(length) for c in range(D)]))
    for name, arr in P.items():
        if name in ("tok_emb", "pos_emb"):
            continue
        groups.append((name, None))
    return groups


def grad_check(model, ids, length=None, label=1, n_samples=256, seed=0, step=STEP,
               analytic=None) -> float:
    """Max relative error between analytic and central-difference gradients.

    Parameters are drawn evenly across tensor groups (embeddings, attention,
    feed-forward, norms, head). ``analytic`` overrides the gradient function,
    which lets tests feed in a deliberately broken one.
    """
    ids = np.asarray(ids, dtype=np.int64).reshape(-1)
    length = int(length if length is not None else len(ids))
    batch = (ids[None], np.array([length]), np.array([label]))
    grad_fn = analytic or (lambda: model.loss_and_grads(*batch)[1])
    grads = grad_fn()
    rng = np.random.default_rng(seed)
    groups = _groups(model, ids, length)
    picks = []
    per = max(1, -(-n_samples // len(groups)))
    for name, cand in groups:
        arr = model.params[name]
        for _ in range(per):
            if cand is None:
                picks.append((name, tuple(int(i) for i in np.unravel_index(rng.integers(arr.size), arr.shape))))
            else:
                picks.append((name, tuple(int(i) for i in cand[rng.integers(len(cand))])))
    worst = 0.0
    for name, idx in picks:
        arr = model.params[name]
        orig = arr[idx]
        arr[idx] = orig + step
        lp = model.loss_and_grads(*batch)[0]
        arr[idx] = orig - step
        lm = model.loss_and_grads(*batch)[0]
        arr[idx] = orig
        num = (lp - lm) / (2 * step)
        ana = grads[name][idx]
        err = abs(ana - num) / max(abs(ana), abs(num), DENOM_FLOOR)
        worst = max(worst, err)
    return worst
