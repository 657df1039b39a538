"""Hot loops of the simulator: ML decoding and the binning encoder's covering search.

Each kernel has a numba version and a pure-numpy version with the same
floating-point operation order, so both backends return identical arrays.
``QMASK_DISABLE_NUMBA=1`` selects the numpy versions.
"""

import numpy as np

from .._accel import USE_NUMBA, njit


def ml_decode_numpy(Y, codewords, logp):
    """argmax_k sum_i logp[codewords[k, i], Y[t, i]] per row t; ties go to the lowest k."""
    T, n = Y.shape
    K = codewords.shape[0]
    out = np.empty(T, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(K, 1))
    for t0 in range(0, T, chunk):
        y = Y[t0:t0 + chunk]
        scores = np.zeros((y.shape[0], K))
        for i in range(n):
            scores += logp[codewords[:, i][None, :], y[:, i][:, None]]
        out[t0:t0 + chunk] = np.argmax(scores, axis=1)
    return out


def bin_encode_numpy(S, ms, codewords, bin_size, pmf_sx, delta):
    """First index in bin ms[t] jointly typical with S[t]; (index, failed) per row."""
    T, n = S.shape
    n_x = pmf_sx.shape[1]
    flat = pmf_sx.ravel()
    cells = np.arange(flat.size)
    zero = flat == 0
    k_out = np.empty(T, dtype=np.int64)
    failed = np.zeros(T, dtype=np.bool_)
    for t in range(T):
        start = ms[t] * bin_size
        block = codewords[start:start + bin_size]
        idx = S[t][None, :] * n_x + block
        counts = (idx[:, :, None] == cells).sum(axis=1)
        freq = counts / n
        ok = ~np.any(zero & (counts > 0), axis=1) & ~np.any(~zero & (np.abs(freq - flat) > delta), axis=1)
        if ok.any():
            k_out[t] = start + int(np.argmax(ok))
        else:
            k_out[t] = start
            failed[t] = True
    return k_out, failed


def _ml_decode_loop(Y, codewords, logp):
    T, n = Y.shape
    K = codewords.shape[0]
    out = np.empty(T, dtype=np.int64)
    for t in range(T):
        best = -np.inf
        best_k = 0
        for k in range(K):
            s = 0.0
            for i in range(n):
                s += logp[codewords[k, i], Y[t, i]]
                if s == -np.inf:
                    break
            if s > best:
                best = s
                best_k = k
        out[t] = best_k
    return out


def _bin_encode_loop(S, ms, codewords, bin_size, pmf_sx, delta):
    T, n = S.shape
    n_s, n_x = pmf_sx.shape
    flat = pmf_sx.ravel()
    k_out = np.empty(T, dtype=np.int64)
    failed = np.zeros(T, dtype=np.bool_)
    counts = np.zeros(n_s * n_x, dtype=np.int64)
    for t in range(T):
        start = ms[t] * bin_size
        k_out[t] = start
        failed[t] = True
        for j in range(bin_size):
            k = start + j
            counts[:] = 0
            for i in range(n):
                counts[S[t, i] * n_x + codewords[k, i]] += 1
            ok = True
            for c in range(flat.size):
                if flat[c] == 0.0:
                    if counts[c] > 0:
                        ok = False
                        break
                elif abs(counts[c] / n - flat[c]) > delta:
                    ok = False
                    break
            if ok:
                k_out[t] = k
                failed[t] = False
                break
    return k_out, failed


if USE_NUMBA:
    ml_decode_numba = njit(nogil=True, cache=False)(_ml_decode_loop)
    bin_encode_numba = njit(nogil=True, cache=False)(_bin_encode_loop)
    ml_decode = ml_decode_numba
    bin_encode = bin_encode_numba
else:
    ml_decode_numba = None
    bin_encode_numba = None
    ml_decode = ml_decode_numpy
    bin_encode = bin_encode_numpy
