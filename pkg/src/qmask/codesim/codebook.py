"""Binned random codebooks and the encode/decode steps of the binning scheme."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SizeLimitError
from . import kernels
from .rng import STAGE_CODEBOOK, check_seed, letters_from_uniforms, stream

MAX_CODEWORDS = 2**20


def message_count(n: int, R: float) -> int:
    m = int(round(2.0 ** (n * R)))
    if m < 1:
        raise ValueError(f"2^(nR) must round to an integer >= 1 (n={n}, R={R})")
    return m


def bin_count(n: int, R: float, Rtilde: float) -> int:
    if Rtilde < R:
        raise ValueError(f"Rtilde = {Rtilde} must be at least R = {R}")
    b = int(round(2.0 ** (n * (Rtilde - R))))
    if b < 1:
        raise ValueError("2^(n(Rtilde - R)) must round to an integer >= 1")
    return b


@dataclass(frozen=True, eq=False)
class Codebook:
    """Codewords x^n(k) with bins B(m) = [m * bin_size, (m + 1) * bin_size)."""

    codewords: np.ndarray
    n_messages: int
    bin_size: int
    pmf: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.codewords.shape[1]

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    def bin_range(self, m: int) -> range:
        return range(m * self.bin_size, (m + 1) * self.bin_size)

    def bin_of(self, k):
        return np.asarray(k) // self.bin_size


def generate_codebook(p_x, n: int, R: float, Rtilde: float, seed: int) -> Codebook:
    """i.i.d. codewords from p_x; bin m is drawn from its own stream.

    Because each bin is a prefix-stable draw, raising Rtilde only appends
    codewords to every bin.
    """
    seed = check_seed(seed)
    p_x = np.asarray(p_x, dtype=float)
    if n < 1:
        raise ValueError("block length must be positive")
    m_count = message_count(n, R)
    b = bin_count(n, R, Rtilde)
    total = m_count * b
    if total > MAX_CODEWORDS:
        raise SizeLimitError(f"codebook of {total} words exceeds the cap of 2^20 codewords")
    words = np.empty((total, n), dtype=np.int64)
    for m in range(m_count):
        u = stream(seed, m, STAGE_CODEBOOK).random(b * n)
        words[m * b:(m + 1) * b] = letters_from_uniforms(u, p_x).reshape(b, n)
    words.setflags(write=False)
    return Codebook(words, m_count, b, p_x, seed)


def _typical_counts(counts, n, p, delta) -> bool:
    zero = p == 0
    if np.any(counts[zero] > 0):
        return False
    return bool(np.all(np.abs(counts[~zero] / n - p[~zero]) <= delta))


def typical_check(x, p, delta: float) -> bool:
    """Strong delta-typicality: |freq(a) - p(a)| <= delta and no letter with p(a) = 0."""
    x = np.asarray(x, dtype=np.int64).ravel()
    p = np.asarray(p, dtype=float).ravel()
    if x.size == 0:
        return True
    if x.min() < 0 or x.max() >= p.size:
        return False
    return _typical_counts(np.bincount(x, minlength=p.size), x.size, p, delta)


def jointly_typical_check(s, x, p_sx, delta: float) -> bool:
    """Typicality of the pair sequence (s^n, x^n) under the joint pmf p_sx[s, x]."""
    p_sx = np.asarray(p_sx, dtype=float)
    s = np.asarray(s, dtype=np.int64).ravel()
    x = np.asarray(x, dtype=np.int64).ravel()
    if s.size != x.size:
        raise ValueError("sequences must have equal length")
    if s.size and (s.min() < 0 or s.max() >= p_sx.shape[0] or x.min() < 0 or x.max() >= p_sx.shape[1]):
        return False
    return typical_check(s * p_sx.shape[1] + x, p_sx.ravel(), delta)


def encode_binning(m: int, s, codebook: Codebook, p_sx, delta: float):
    """First k in B(m) with (s^n, x^n(k)) jointly typical; else (first index of B(m), True)."""
    if not 0 <= m < codebook.n_messages:
        raise ValueError(f"message {m} outside [0, {codebook.n_messages})")
    S = np.asarray(s, dtype=np.int64).reshape(1, -1)
    k, failed = kernels.bin_encode(S, np.array([m], dtype=np.int64), codebook.codewords,
                                   codebook.bin_size, np.asarray(p_sx, dtype=float), float(delta))
    return int(k[0]), bool(failed[0])


def log_metric(p_y_given_x) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(p_y_given_x, dtype=float))


def decode(y, codebook: Codebook, p_y_given_x):
    """ML message estimate(s): bin of argmax_k prod_i p(y_i | x_i(k)), lowest k on ties."""
    Y = np.asarray(y, dtype=np.int64)
    single = Y.ndim == 1
    Y = Y.reshape(1, -1) if single else Y
    k = kernels.ml_decode(Y, codebook.codewords, log_metric(p_y_given_x))
    m = codebook.bin_of(k)
    return int(m[0]) if single else m


def wilson_halfwidth(errors: int, trials: int, z: float = 1.959963984540054) -> float:
    p = errors / trials
    denom = 1 + z * z / trials
    return z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
