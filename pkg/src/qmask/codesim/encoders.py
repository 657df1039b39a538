"""Encoders: the binning scheme and custom letterwise maps.

A bound code exposes what the simulator and the leakage enumerator need:
``n``, ``n_messages``, ``codebook`` (decoder view), ``metric`` p(y|x) for ML
decoding and ``encode_batch(ms, S) -> (inputs, k, covering_failed)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, SizeLimitError
from . import kernels
from .codebook import Codebook, generate_codebook
from .model import ClassicalStrategy, induced_output_pmf


class BinningCode:
    """Gel'fand-Pinsker style binning: covering search inside the message's bin."""

    name = "binning"

    def __init__(self, strategy: ClassicalStrategy, W, q, n, R, Rtilde, delta, seed):
        self.strategy = strategy
        self.p_sx = strategy.joint(q)
        self.delta = float(delta)
        self.codebook = generate_codebook(self.p_sx.sum(axis=0), n, R, Rtilde, seed)
        self.metric = induced_output_pmf(W, q, strategy)

    @property
    def n(self) -> int:
        return self.codebook.n

    @property
    def n_messages(self) -> int:
        return self.codebook.n_messages

    def encode_batch(self, ms, S):
        k, failed = kernels.bin_encode(np.ascontiguousarray(S, dtype=np.int64),
                                       np.asarray(ms, dtype=np.int64), self.codebook.codewords,
                                       self.codebook.bin_size, self.p_sx, self.delta)
        inputs = self.strategy.input_map[self.codebook.codewords[k]]
        return inputs, k, failed


@dataclass(frozen=True, eq=False)
class LetterwiseEncoder:
    """Custom encoder: message digits b^n(m) (MSB first), channel input ``table[b_i, s_i]``."""

    name: str
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64)
        if t.ndim != 2 or t.min() < 0:
            raise DimensionError("table must be a nonnegative integer matrix indexed [b, s]")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def digits(self) -> int:
        return self.table.shape[0]

    def words(self, n: int, n_messages: int) -> np.ndarray:
        base = self.digits
        if n_messages > base ** n:
            raise SizeLimitError(f"{n_messages} messages do not fit in {base}^{n} letterwise words")
        m = np.arange(n_messages, dtype=np.int64)
        powers = base ** np.arange(n - 1, -1, -1, dtype=np.int64)
        return (m[:, None] // powers[None, :]) % base

    def strategy(self, n_states: int) -> ClassicalStrategy:
        """Equivalent single-letter strategy: X = (b, s) with b uniform and input table[b, s]."""
        base = self.digits
        pmf = np.zeros((n_states, base * n_states))
        inputs = np.zeros(base * n_states, dtype=np.int64)
        for s in range(n_states):
            for b in range(base):
                x = s * base + b
                pmf[s, x] = 1.0 / base
                inputs[x] = self.table[b, s]
        return ClassicalStrategy(pmf, inputs)

    def bind(self, W, q, n: int, n_messages: int) -> "LetterwiseCode":
        if self.table.shape[1] != W.shape[1]:
            raise DimensionError(f"table has {self.table.shape[1]} state columns, |S| = {W.shape[1]}")
        if self.table.max() >= W.shape[0]:
            raise DimensionError("table refers to input letters outside the channel alphabet")
        return LetterwiseCode(self, W, np.asarray(q, dtype=float), n, n_messages)


class LetterwiseCode:
    def __init__(self, encoder: LetterwiseEncoder, W, q, n, n_messages):
        self.encoder = encoder
        self.name = encoder.name
        words = encoder.words(n, n_messages)
        words.setflags(write=False)
        self.codebook = Codebook(words, n_messages, 1, np.full(encoder.digits, 1.0 / encoder.digits), 0)
        table = encoder.table
        self.metric = np.einsum("s,bsy->by", q, W[table, np.arange(table.shape[1])[None, :]])

    @property
    def n(self) -> int:
        return self.codebook.n

    @property
    def n_messages(self) -> int:
        return self.codebook.n_messages

    def encode_batch(self, ms, S):
        ms = np.asarray(ms, dtype=np.int64)
        S = np.asarray(S, dtype=np.int64)
        digits = self.codebook.codewords[ms]
        return self.encoder.table[digits, S], ms.copy(), np.zeros(ms.size, dtype=bool)
