from .checkpoint import CheckpointError, TrainedModel, load_checkpoint, save_checkpoint
from .config import DEFAULT_LR, MODEL_KINDS, TrainConfig
from .gradcheck import grad_check
from .logistic import LogisticModel, bow_featurize, bow_from_ids
from .losses import EPS_P, NonFiniteLoss, bce_loss, sigmoid, softmax
from .optim import AdamW
from .predict import ModelMismatch, PredictionResult, predict, predict_many, threshold
from .training import History, evaluate_loss, train_logistic, train_model, train_transformer
from .transformer import IdOutOfRange, TransformerClassifier

__all__ = [
    "AdamW", "CheckpointError", "DEFAULT_LR", "EPS_P", "History", "IdOutOfRange", "LogisticModel",
    "MODEL_KINDS", "ModelMismatch", "NonFiniteLoss", "PredictionResult", "TrainConfig",
    "TrainedModel", "TransformerClassifier", "bce_loss", "bow_featurize", "bow_from_ids",
    "evaluate_loss", "grad_check", "load_checkpoint", "predict", "predict_many", "save_checkpoint",
    "sigmoid", "softmax", "threshold", "train_logistic", "train_model", "train_transformer",
]
