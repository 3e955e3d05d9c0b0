"""Run configuration: a flat ``key = value`` file, overridden by command-line flags.

Recognised keys are the RunConfig path/selection fields plus every TrainConfig
field (``epochs``, ``learning_rate``, ``d_model``, ...). ``#`` starts a comment.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .models.config import TrainConfig

_SECTION = "run"


@dataclass
class RunConfig:
    corpus: str = "corpus.jsonl"
    splits_dir: str = "splits"
    checkpoints_dir: str = "checkpoints"
    reports_dir: str = "reports"
    repr_kind: str = "text"
    task: str = "directive"
    model: str = "transformer"
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)


_RUN_KEYS = {f.name: f for f in fields(RunConfig) if f.name != "train"}
_TRAIN_KEYS = {f.name: f for f in fields(TrainConfig)}


def _coerce(raw: str, default):
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw.strip()


def read_config_file(path) -> dict[str, object]:
    text = Path(path).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string(f"[{_SECTION}]\n{text}")
    out: dict[str, object] = {}
    defaults = RunConfig()
    tdefaults = TrainConfig()
    for key, raw in cp.items(_SECTION):
        if key in _RUN_KEYS:
            out[key] = _coerce(raw, getattr(defaults, key))
        elif key in _TRAIN_KEYS:
            d = getattr(tdefaults, key)
            out[key] = float(raw) if d is None else _coerce(raw, d)
        else:
            raise ValueError(f"{path}: unknown config key {key!r}")
    return out


def resolve(file_values: dict, flag_values: dict) -> RunConfig:
    """Defaults, then config file, then flags (``None`` flags are ignored)."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    run_kw = {k: v for k, v in merged.items() if k in _RUN_KEYS}
    train_kw = {k: v for k, v in merged.items() if k in _TRAIN_KEYS}
    if "seed" in run_kw and "seed" not in train_kw:
        train_kw["seed"] = run_kw["seed"]
    cfg = RunConfig(**run_kw)
    cfg.train = TrainConfig(**train_kw)
    return cfg
