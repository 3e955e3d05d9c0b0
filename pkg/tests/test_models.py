import math

import numpy as np
import pytest

from ompadvisor.models import (AdamW, CheckpointError, LogisticModel, NonFiniteLoss, TrainConfig,
                               TrainedModel, TransformerClassifier, bce_loss,
                               grad_check, load_checkpoint, save_checkpoint, sigmoid, train_model)
from ompadvisor.models.losses import bce_grad_logit
from ompadvisor.models.logistic import bow_featurize, bow_from_ids
from ompadvisor.models.predict import ModelMismatch, predict, threshold
from ompadvisor.models.transformer import IdOutOfRange
from ompadvisor.vocab import CLS, build_vocab, encode

SMALL = TrainConfig(d_model=16, n_heads=2, n_layers=2, d_ff=24, d_head=12, max_len=24, epochs=3,
                    batch_size=8, dropout=0.1)


def toy_data(n=48, seed=0, max_len=24):
    """Label is 1 iff token 5 appears; a trivially learnable rule."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        L = int(rng.integers(3, max_len - 2))
        body = rng.integers(3, 12, size=L - 1)
        body[body == 5] = 6
        y = i % 2
        if y:
            body[rng.integers(L - 1)] = 5
        ids = np.zeros(max_len, np.int64)
        ids[0], ids[1:L] = CLS, body
        out.append((ids, L, y))
    ids = np.stack([o[0] for o in out])
    return ids, np.array([o[1] for o in out]), np.array([o[2] for o in out])


# -- loss --------------------------------------------------------------------

def test_bce_half():
    assert abs(bce_loss(0.5, 1) - math.log(2)) < 1e-9


def test_bce_symmetry():
    p = np.linspace(0.0005, 0.9995, 1000)
    assert np.max(np.abs(bce_loss(p, 1) - bce_loss(1 - p, 0))) < 1e-12


def test_bce_clamped_finite():
    assert math.isfinite(bce_loss(0.0, 1)) and math.isfinite(bce_loss(1.0, 0))
    assert abs(bce_loss(0.0, 1) + math.log(1e-7)) < 1e-9


def test_bce_grad_matches_sigmoid_derivative():
    z = np.linspace(-5, 5, 11)
    h = 1e-6
    num = (bce_loss(sigmoid(z + h), 1) - bce_loss(sigmoid(z - h), 1)) / (2 * h)
    assert np.allclose(bce_grad_logit(sigmoid(z), 1), num, atol=1e-7)


def test_sigmoid_extremes():
    assert sigmoid(np.array([-1000.0, 1000.0])).tolist() == [0.0, 1.0]


# -- optimizer ---------------------------------------------------------------

def test_adamw_first_step():
    params = {"w": np.ones((2, 2)), "b": np.ones(2)}
    opt = AdamW(params, lr=0.1, weight_decay=0.5)
    opt.step(params, {"w": np.full((2, 2), 3.0), "b": np.full(2, -2.0)})
    # first bias-corrected step is lr * sign(g); decay hits matrices only
    assert np.allclose(params["w"], 1 * (1 - 0.05) - 0.1, atol=1e-7)
    assert np.allclose(params["b"], 1.1, atol=1e-7)


# -- transformer -------------------------------------------------------------

def test_shapes_and_probabilities():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(0))
    ids, lengths, _ = toy_data(5)
    assert m.logits(ids, lengths).shape == (5, 2)
    p = m.predict_proba(ids, lengths)
    assert p.shape == (5,) and np.all((p > 0) & (p < 1))


def test_id_out_of_range():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(0))
    with pytest.raises(IdOutOfRange):
        m.logits(np.array([[2, 12, 0]]))
    with pytest.raises(IdOutOfRange):
        m.logits(np.full((1, 30), 3))


def test_pad_invariance():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(1))
    rng = np.random.default_rng(2)
    ids, lengths, _ = toy_data(20, seed=3)
    other = ids.copy()
    for i, L in enumerate(lengths):
        other[i, L:] = rng.integers(0, 12, size=len(other[i]) - L)
    assert np.max(np.abs(m.logits(ids, lengths) - m.logits(other, lengths))) < 1e-9


def test_lengths_default_to_non_pad_run():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(1))
    ids, lengths, _ = toy_data(6)
    assert np.array_equal(m.logits(ids), m.logits(ids, lengths))


def test_batch_independence():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(1))
    ids, lengths, _ = toy_data(6)
    whole = m.logits(ids, lengths)
    one = np.concatenate([m.logits(ids[i:i + 1], lengths[i:i + 1]) for i in range(6)])
    assert np.allclose(whole, one, atol=1e-12)


def test_grad_check_small_transformer():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(4))
    ids, lengths, _ = toy_data(1, seed=5)
    assert grad_check(m, ids[0], lengths[0], label=1, n_samples=256) < 1e-4


def test_grad_check_detects_corruption():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(4))
    ids, lengths, _ = toy_data(1, seed=5)
    batch = (ids[:1], lengths[:1], np.array([0]))

    def broken():
        g = m.loss_and_grads(*batch)[1]
        return {k: v * 2.0 for k, v in g.items()}

    assert grad_check(m, ids[0], lengths[0], label=0, analytic=broken) > 1e-2


def test_grad_check_logistic():
    m = LogisticModel(np.random.default_rng(0).normal(size=12), 0.3)
    ids, lengths, _ = toy_data(1)
    assert grad_check(m, ids[0], lengths[0], label=1, n_samples=200) < 1e-6


def test_dropout_changes_training_forward_only():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(1))
    ids, lengths, y = toy_data(8)
    a = m.loss_and_grads(ids, lengths, y, 0.5, np.random.default_rng(0))[0]
    b = m.loss_and_grads(ids, lengths, y, 0.5, np.random.default_rng(1))[0]
    assert a != b
    assert np.array_equal(m.predict_proba(ids, lengths), m.predict_proba(ids, lengths))


# -- logistic / BoW ----------------------------------------------------------

def test_bow_features():
    v = build_vocab([["a", "b"]])
    x = bow_featurize(["a", "a", "zz"], v)
    assert x[v.id_of("a")] == 2 and x[1] == 1 and x.sum() == 3


def test_bow_from_ids_skips_cls_and_pad():
    X = bow_from_ids(np.array([[CLS, 4, 4, 5, 0]]), np.array([4]), 6)
    assert X.tolist() == [[0, 0, 0, 0, 2, 1]]


def test_logistic_zero_init_gives_half():
    m = LogisticModel.init(12)
    ids, lengths, _ = toy_data(3, max_len=24)
    assert np.allclose(m.predict_proba(ids, lengths), 0.5)


# -- training ----------------------------------------------------------------

@pytest.mark.parametrize("kind", ["transformer", "logistic"])
def test_training_learns_toy_rule(kind):
    data = toy_data(96, seed=1)
    valid = toy_data(32, seed=2)
    cfg = SMALL.with_(epochs=12 if kind == "transformer" else 60,
                      learning_rate=3e-3 if kind == "transformer" else None)
    model, hist = train_model(kind, data, valid, 12, cfg)
    assert hist.valid_acc[-1] >= 0.9
    assert hist.rows[-1][1] < hist.rows[0][1]


def test_training_deterministic():
    data, valid = toy_data(24), toy_data(8, seed=9)
    a, ha = train_model("transformer", data, valid, 12, SMALL)
    b, hb = train_model("transformer", data, valid, 12, SMALL)
    assert ha.to_csv() == hb.to_csv()
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)


def test_zero_epochs_is_init():
    data = toy_data(8)
    model, hist = train_model("transformer", data, data, 12, SMALL.with_(epochs=0))
    init = TransformerClassifier.init(12, SMALL, np.random.default_rng(SMALL.seed))
    assert hist.rows == [] and all(np.array_equal(model.params[k], init.params[k]) for k in init.params)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises():
    data = toy_data(16)
    with pytest.raises(NonFiniteLoss):
        train_model("logistic", data, data, 12, SMALL.with_(learning_rate=1e308, epochs=2))


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(d_model=10, n_heads=3)
    with pytest.raises(ValueError):
        TrainConfig(dropout=1.0)
    with pytest.raises(ValueError):
        TrainConfig.from_dict({"bogus": 1})
    assert TrainConfig().lr_for("transformer") == 3e-4


# -- checkpoints and prediction ----------------------------------------------

def trained_pair(tmp_path, kind="transformer"):
    seqs = [["for", "i", "a"], ["for", "puts", "a"]]
    vocab = build_vocab(seqs, max_len=SMALL.max_len)
    data = [encode(s, vocab, SMALL.max_len, y) for s, y in zip(seqs, (1, 0))]
    model, _ = train_model(kind, data, data, len(vocab), SMALL)
    return TrainedModel(model, vocab, "text", "directive", SMALL)


@pytest.mark.parametrize("kind", ["transformer", "logistic"])
def test_checkpoint_roundtrip_bytes(tmp_path, kind):
    tm = trained_pair(tmp_path, kind)
    save_checkpoint(tmp_path / "a", tm)
    back = load_checkpoint(tmp_path / "a")
    save_checkpoint(tmp_path / "b", back)
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()
    assert back.vocab == tm.vocab and back.config == tm.config and back.kind == kind
    seqs = [["for", "i", "a"], ["x"]]
    assert np.array_equal(back.predict_proba_tokens(seqs), tm.predict_proba_tokens(seqs))


def test_checkpoint_rejects_garbage(tmp_path):
    (tmp_path / "x").write_bytes(b"hello")
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "x")


def test_checkpoint_truncated(tmp_path):
    save_checkpoint(tmp_path / "a", trained_pair(tmp_path))
    raw = (tmp_path / "a").read_bytes()
    (tmp_path / "a").write_bytes(raw[:-100])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "a")


def test_threshold_is_strict():
    assert threshold(0.5, 0.5) == 0 and threshold(0.5000001, 0.5) == 1


def test_predict_mismatch(tmp_path):
    tm = trained_pair(tmp_path)
    with pytest.raises(ModelMismatch):
        predict(tm, "for(i=0;i<n;i++) a[i]=0;", repr_kind="ast")
    other = build_vocab([["q"]])
    with pytest.raises(ModelMismatch):
        predict(tm, "for(i=0;i<n;i++) a[i]=0;", vocab=other)
    r = predict(tm, "for(i=0;i<n;i++) a[i]=0;")
    assert 0 < r.probability < 1 and r.label == int(r.probability > 0.5)


def test_softmax_outputs_sum_to_one():
    from ompadvisor.models.losses import softmax
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(0))
    ids, lengths, _ = toy_data(10)
    s = softmax(m.logits(ids, lengths)).sum(axis=1)
    assert np.all(np.abs(s - 1) < 1e-6)


def test_fresh_model_is_near_chance():
    m = TransformerClassifier.init(12, TrainConfig(max_len=24), np.random.default_rng(0))
    ids, lengths, _ = toy_data(100)
    assert abs(m.predict_proba(ids, lengths).mean() - 0.5) < 0.1


def test_grad_check_cls_only_instance():
    m = TransformerClassifier.init(12, SMALL, np.random.default_rng(7))
    ids = np.zeros(SMALL.max_len, np.int64)
    ids[0] = CLS
    assert grad_check(m, ids, 1, label=0, n_samples=200) < 1e-4


def test_logistic_separable_two_token_set():
    # token 3 -> positive, token 4 -> negative
    ids = np.array([[CLS, 3, 0], [CLS, 4, 0]] * 8)
    data = (ids, np.full(16, 2), np.array([1, 0] * 8))
    model, hist = train_model("logistic", data, data, 5, SMALL.with_(epochs=50))
    p = model.predict_proba(ids, np.full(16, 2))
    assert np.mean((p > 0.5) == data[2]) >= 0.99


def test_logistic_single_example_monotone():
    data = (np.array([[CLS, 3, 4]]), np.array([3]), np.array([1]))
    model = LogisticModel.init(5)
    from ompadvisor.models import AdamW
    opt = AdamW(model.params, 0.02)
    ps = []
    for _ in range(30):
        opt.step(model.params, model.loss_and_grads(*data)[1])
        ps.append(model.predict_proba(data[0], data[1])[0])
    assert all(b > a for a, b in zip(ps, ps[1:]))


def test_bow_order_invariance():
    m = LogisticModel(np.random.default_rng(1).normal(size=8), 0.1)
    a = np.array([[CLS, 3, 4, 5, 5, 7, 0]])
    b = np.array([[CLS, 5, 7, 3, 5, 4, 0]])
    assert m.predict_proba(a, [6])[0] == m.predict_proba(b, [6])[0]
