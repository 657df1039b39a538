"""Exact per-letter leakage I(S^n; Y^n)/n of a code by full enumeration."""

from __future__ import annotations

import numpy as np

from ..errors import SizeLimitError

MAX_LEAKAGE_CELLS = 2**26


def leakage_cells(n_states: int, n_outputs: int, n: int, n_messages: int) -> int:
    return n_states**n * n_outputs**n * n_messages


def _state_sequences(n_states: int, n: int) -> np.ndarray:
    """All s^n in lexicographic order (first letter most significant)."""
    idx = np.arange(n_states**n, dtype=np.int64)
    powers = n_states ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % n_states


def exact_leakage(code, W, q) -> float:
    """(1/n) I(S^n; Y^n) with uniform messages, q-i.i.d. states and the code's encoder.

    p(y^n | s^n) = (1/M) sum_m prod_i W[a_i(m, s^n), s_i, y_i]; the mutual
    information is accumulated as sum_s p(s) D(p(.|s) || p(.)) in a fixed order.
    """
    W = np.asarray(W, dtype=float)
    q = np.asarray(q, dtype=float)
    n, M = code.n, code.n_messages
    n_s, n_y = W.shape[1], W.shape[2]
    cells = leakage_cells(n_s, n_y, n, M)
    if cells > MAX_LEAKAGE_CELLS:
        raise SizeLimitError(
            f"exact leakage needs |S|^n |Y|^n M = {cells} cells, above the cap of 2^26")
    seqs = _state_sequences(n_s, n)
    p_seq = np.prod(q[seqs], axis=1)
    ms = np.tile(np.arange(M, dtype=np.int64), seqs.shape[0])
    S_all = np.repeat(seqs, M, axis=0)
    inputs, _, _ = code.encode_batch(ms, S_all)
    inputs = inputs.reshape(seqs.shape[0], M, n)

    cond = np.empty((seqs.shape[0], n_y**n))
    for j, s in enumerate(seqs):
        prob = np.ones((M, 1))
        for i in range(n):
            prob = (prob[:, :, None] * W[inputs[j, :, i], s[i], :][:, None, :]).reshape(M, -1)
        cond[j] = prob.sum(axis=0) / M
    p_y = np.zeros(n_y**n)
    for j in range(seqs.shape[0]):
        p_y += p_seq[j] * cond[j]
    total = 0.0
    for j in range(seqs.shape[0]):
        if p_seq[j] == 0.0:
            continue
        c = cond[j]
        nz = c > 0
        total += p_seq[j] * float(np.sum(c[nz] * np.log2(c[nz] / p_y[nz])))
    return total / n
