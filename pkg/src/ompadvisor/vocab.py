"""Whole-token vocabulary, fixed-length encoding and OOV accounting."""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

PAD, UNK, CLS = 0, 1, 2
RESERVED = ("<pad>", "<unk>", "<cls>")
DEFAULT_MAX_LEN = 110
VOCAB_VERSION = 1


class EmptyTrainingSet(ValueError):
    pass


class Vocabulary:
    """Immutable token/id mapping with PAD, UNK and CLS reserved at 0, 1, 2."""

    __slots__ = ("_itos", "_stoi", "min_freq", "max_len")

    def __init__(self, tokens, min_freq: int = 1, max_len: int = DEFAULT_MAX_LEN):
        itos = list(RESERVED) + [t for t in tokens]
        stoi = {t: i for i, t in enumerate(itos)}
        if len(stoi) != len(itos):
            raise ValueError("duplicate tokens in vocabulary")
        self._itos = tuple(itos)
        self._stoi = stoi
        self.min_freq = min_freq
        self.max_len = max_len

    def __len__(self):
        return len(self._itos)

    def __contains__(self, token):
        return token in self._stoi and self._stoi[token] >= len(RESERVED)

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self._itos == other._itos

    def __hash__(self):
        return hash(self._itos)

    def id_of(self, token: str) -> int:
        i = self._stoi.get(token, UNK)
        return UNK if i < len(RESERVED) else i

    def token_of(self, idx: int) -> str:
        return self._itos[idx]

    @property
    def tokens(self) -> tuple[str, ...]:
        """Non-reserved tokens in id order."""
        return self._itos[len(RESERVED):]

    def digest(self) -> str:
        h = hashlib.sha256()
        for t in self._itos:
            h.update(t.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()[:16]

    # persistence: header line, then token<TAB>id lines with \\ \t \n \r escaped
    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            header = {"version": VOCAB_VERSION, "min_freq": self.min_freq, "max_len": self.max_len}
            fh.write(json.dumps(header) + "\n")
            for i, t in enumerate(self._itos):
                fh.write(f"{_escape(t)}\t{i}\n")

    @classmethod
    def load(cls, path) -> Vocabulary:
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("version") != VOCAB_VERSION:
                raise ValueError(f"{path}: unsupported vocabulary version")
            itos = []
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                tok, sep, idx = line.rpartition("\t")
                if not sep or int(idx) != len(itos):
                    raise ValueError(f"{path}:{lineno}: malformed vocabulary line")
                itos.append(_unescape(tok))
        if tuple(itos[: len(RESERVED)]) != RESERVED:
            raise ValueError(f"{path}: reserved ids missing")
        return cls(itos[len(RESERVED):], header.get("min_freq", 1), header.get("max_len", DEFAULT_MAX_LEN))


_ESC = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESC = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _escape(s: str) -> str:
    return "".join(_ESC.get(c, c) for c in s)


def _unescape(s: str) -> str:
    out, i = [], 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            out.append(_UNESC.get(s[i + 1], s[i + 1]))
            i += 2
        else:
            out.append(s[i])
            i += 1
    return "".join(out)


def build_vocab(train_sequences, min_freq: int = 1, max_len: int = DEFAULT_MAX_LEN) -> Vocabulary:
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    counts: Counter[str] = Counter()
    n = 0
    for seq in train_sequences:
        counts.update(seq)
        n += 1
    if n == 0:
        raise EmptyTrainingSet("cannot build a vocabulary from an empty training set")
    kept = [t for t, c in counts.items() if c >= min_freq and t not in RESERVED]
    kept.sort(key=lambda t: (-counts[t], t))
    return Vocabulary(kept, min_freq, max_len)


@dataclass(frozen=True)
class EncodedInstance:
    ids: np.ndarray
    true_length: int
    label: int = 0


def encode(sequence, vocab: Vocabulary, max_len: int | None = None, label: int = 0) -> EncodedInstance:
    max_len = vocab.max_len if max_len is None else max_len
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    ids = np.zeros(max_len, dtype=np.int64)
    ids[0] = CLS
    body = [vocab.id_of(t) for t in list(sequence)[: max_len - 1]]
    ids[1:1 + len(body)] = body
    ids.flags.writeable = False
    return EncodedInstance(ids, 1 + len(body), int(label))


def decode(instance: EncodedInstance, vocab: Vocabulary) -> list[str]:
    return [vocab.token_of(int(i)) for i in instance.ids[1:instance.true_length]]


def stack(instances) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(ids[N, max_len], lengths[N], labels[N])``."""
    instances = list(instances)
    if not instances:
        return np.zeros((0, 0), np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)
    ids = np.stack([x.ids for x in instances])
    lengths = np.array([x.true_length for x in instances], dtype=np.int64)
    labels = np.array([x.label for x in instances], dtype=np.int64)
    return ids, lengths, labels


def oov_report(vocab: Vocabulary, eval_sequences) -> tuple[int, float]:
    """Distinct out-of-vocabulary types and mean untruncated sequence length."""
    oov: set[str] = set()
    total = n = 0
    for seq in eval_sequences:
        seq = list(seq)
        oov.update(t for t in seq if t not in vocab)
        total += len(seq)
        n += 1
    return len(oov), (total / n if n else 0.0)
