"""Generated loop corpus with a known labelling rule.

Positives have independent iterations: element-wise maps, in-place updates,
reads of neighbours in arrays that the loop never writes. Negatives
either do I/O or carry a dependence between iterations. A share of the
dependent negatives is built from exactly the same token multiset as a
positive sibling (``X[i] = X[i - 1] * Y[i]`` vs ``X[i] = X[i] * Y[i - 1]``), so
an order-blind model cannot separate those pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import make_record

POS_PRAGMA = "#pragma omp parallel for"

_ARRAYS = ("a", "b", "c", "d", "x", "y", "z", "u", "w", "out", "in", "src", "dst", "tmp", "buf", "data")
# names that only show up in positives when the naming signal is on
_SIGNAL_ARRAYS = ("vec", "arr", "A", "B", "C", "result")
_INDEX = ("i", "j", "k", "idx", "ii")
_BOUNDS = ("n", "N", "len", "size", "count", "m")
_SCALARS = ("alpha", "beta", "s", "t", "scale", "factor")
_OPS = ("+", "-", "*")
_FUNCS = ("sqrt", "fabs", "exp", "sin", "cos", "log")


@dataclass(frozen=True)
class SynthConfig:
    n: int = 2000
    seed: int = 0
    # share of examples drawn from the bag-identical template pair
    ambiguous_rate: float = 0.3
    # share of the remaining negatives that carry an I/O call
    io_rate: float = 0.5
    # probability that a positive draws its array names from the signal pool
    naming_signal: float = 0.0


class _Gen:
    def __init__(self, cfg: SynthConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def arrays(self, k, signal=False):
        pool = list(_SIGNAL_ARRAYS if signal else _ARRAYS)
        idx = self.rng.permutation(len(pool))[:k]
        return [pool[i] for i in idx]

    def const(self):
        if self.rng.random() < 0.5:
            return str(int(self.rng.integers(2, 10)))
        return f"{int(self.rng.integers(1, 10))}.{int(self.rng.integers(0, 10))}"

    def header(self, i, start=None):
        b = self.pick(_BOUNDS)
        lo = start if start is not None else self.pick(("0", "0", "1"))
        style = int(self.rng.integers(4))
        if style == 0:
            return f"for ({i} = {lo}; {i} < {b}; {i}++)"
        if style == 1:
            return f"for (int {i} = {lo}; {i} < {b}; ++{i})"
        if style == 2:
            return f"for ({i} = {lo}; {i} <= {b} - 1; {i} += 1)"
        return f"for ({i} = {lo}; {i} < {b}; {i}++)"

    def wrap(self, header, stmts):
        if len(stmts) == 1 and self.rng.random() < 0.4:
            return f"{header}\n  {stmts[0]}"
        body = "\n".join("  " + s for s in stmts)
        return f"{header} {{\n{body}\n}}"

    def filler(self, i, X):
        """Independent statement that can sit in either class."""
        a, = self.arrays(1)
        while a == X:
            a, = self.arrays(1)
        return f"{a}[{i}] = {X}[{i}] {self.pick(_OPS)} {self.const()};"

    # -- positives ------------------------------------------------------------

    def positive(self, ambiguous):
        i = self.pick(_INDEX)
        signal = self.rng.random() < self.cfg.naming_signal
        X, Y, Z = self.arrays(3, signal)
        op = self.pick(_OPS)
        helpers = []
        if ambiguous:
            stmts = [f"{X}[{i}] = {X}[{i}] {op} {Y}[{i} - 1];"]
            header = self.header(i, start="1")
        else:
            kind = int(self.rng.integers(6))
            header = self.header(i)
            if kind == 0:
                stmts = [f"{X}[{i}] = {Y}[{i}] {op} {Z}[{i}];"]
            elif kind == 1:
                stmts = [f"{X}[{i}] = {self.pick(_SCALARS)} * {Y}[{i}] + {Z}[{i}];"]
            elif kind == 2:
                stmts = [f"{X}[{i}] = {X}[{i}] {op} {self.const()};"]
            elif kind == 3:
                stmts = [f"{X}[{i}] = {self.pick(_FUNCS)}({Y}[{i}]);"]
            elif kind == 4:
                t = self.pick(_SCALARS)
                stmts = [f"{t} = {Y}[{i}] * {self.const()};", f"{X}[{i}] = {t} {op} {Z}[{i}];"]
            else:
                j = self.pick([v for v in _INDEX if v != i])
                inner = f"for ({j} = 0; {j} < {self.pick(_BOUNDS)}; {j}++)"
                stmts = [f"{inner}\n    {X}[{i}][{j}] = {Y}[{i}][{j}] {op} {self.const()};"]
            if kind == 3 and self.rng.random() < 0.3:
                g = "helper_" + self.pick(_FUNCS)
                stmts = [f"{X}[{i}] = {g}({Y}[{i}]);"]
                helpers.append(f"double {g}(double v)\n{{\n  return v * v + 1.0;\n}}")
        if self.rng.random() < 0.25:
            stmts.append(self.filler(i, X))
        return self.wrap(header, stmts), helpers

    # -- negatives ------------------------------------------------------------

    def negative(self, ambiguous):
        i = self.pick(_INDEX)
        X, Y, Z = self.arrays(3)
        op = self.pick(_OPS)
        if ambiguous:
            stmts = [f"{X}[{i}] = {X}[{i} - 1] {op} {Y}[{i}];"]
            header = self.header(i, start="1")
        elif self.rng.random() < self.cfg.io_rate:
            header = self.header(i)
            kind = int(self.rng.integers(4))
            if kind == 0:
                stmts = [f'printf("%d\\n", {X}[{i}]);']
            elif kind == 1:
                stmts = [f'fprintf(stderr, "%f ", {X}[{i}] {op} {Y}[{i}]);']
            elif kind == 2:
                stmts = [f'scanf("%lf", &{X}[{i}]);']
            else:
                stmts = [f"{X}[{i}] = {Y}[{i}] {op} {Z}[{i}];", f'printf("%g\\n", {X}[{i}]);']
        else:
            kind = int(self.rng.integers(4))
            if kind == 0:
                header = self.header(i)
                stmts = [f"{X}[{i} + 1] = {X}[{i}] {op} {self.const()};"]
            elif kind == 1:
                header = self.header(i, start="1")
                stmts = [f"{X}[{i}] = {X}[{i} - 1] {op} {Y}[{i} - 1];"]
            elif kind == 2:
                header = self.header(i)
                stmts = [f"if ({X}[{i}] == {self.const()}) break;", f"{Y}[{i}] = {X}[{i}];"]
            else:
                header = self.header(i, start="1")
                s = self.pick(_SCALARS)
                stmts = [f"{s} = {X}[{s} > 0 ? {i} - 1 : {i}];", f"{X}[{i}] = {s} {op} {Y}[{i}];"]
        if self.rng.random() < 0.25:
            stmts.append(self.filler(i, X))
        return self.wrap(header, stmts), []


def generate_corpus(cfg: SynthConfig | None = None, **kw):
    """``cfg.n`` unique records, half labelled positive, in generation order."""
    cfg = cfg or SynthConfig(**kw)
    gen = _Gen(cfg)
    records, seen = [], set()
    n_pos = cfg.n // 2
    counts = [cfg.n - n_pos, n_pos]
    k = 0
    attempts = 0
    while counts[0] or counts[1]:
        attempts += 1
        if attempts > 50 * cfg.n + 1000:
            raise RuntimeError("generator cannot produce enough distinct loops")
        label = int(gen.rng.integers(2))
        if not counts[label]:
            label = 1 - label
        ambiguous = gen.rng.random() < cfg.ambiguous_rate
        loop, helpers = gen.positive(ambiguous) if label else gen.negative(ambiguous)
        code = "\n".join([loop] + helpers)
        rec = make_record(code, (f"synthetic/loop{k:05d}.c", 1), loop.count("\n") + 1,
                          POS_PRAGMA if label else None)
        if rec.id in seen:
            continue
        seen.add(rec.id)
        records.append(rec)
        counts[label] -= 1
        k += 1
    return records
