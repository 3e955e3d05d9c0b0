from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

MODEL_KINDS = ("transformer", "logistic")
# constant learning rates; the count-feature logistic model tolerates a much larger step
DEFAULT_LR = {"transformer": 3e-4, "logistic": 2e-2}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float | None = None
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    dropout: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 4
    d_ff: int = 512
    d_head: int = 128
    threshold: float = 0.5
    max_len: int = 110
    min_freq: int = 1

    def __post_init__(self):
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must be in [0, 1)")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        for name in ("d_model", "n_heads", "n_layers", "d_ff", "d_head", "batch_size", "max_len", "min_freq"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_len < 2:
            raise ValueError("max_len must be at least 2")

    def lr_for(self, kind: str) -> float:
        return self.learning_rate if self.learning_rate is not None else DEFAULT_LR[kind]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> TrainConfig:
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def with_(self, **kw) -> TrainConfig:
        return replace(self, **kw)
