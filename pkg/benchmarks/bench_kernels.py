"""Time the codebook kernels: numba vs numpy.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Also checks that both backends return identical arrays on every input.
"""

import argparse
import time

import numpy as np

from qmask.codesim import kernels


def timed(func, args, repeat):
    func(*args)  # warm up (and jit-compile)
    start = time.perf_counter()
    for _ in range(repeat):
        out = func(*args)
    return (time.perf_counter() - start) / repeat * 1000, out


def decode_case(rng, T, K, n):
    Y = rng.integers(0, 2, size=(T, n))
    words = rng.integers(0, 2, size=(K, n))
    logp = np.log(rng.dirichlet([1.0, 1.0], size=2))
    return Y, words, logp


def encode_case(rng, T, M, bin_size, n):
    S = rng.integers(0, 2, size=(T, n))
    ms = rng.integers(0, M, size=T)
    words = rng.integers(0, 2, size=(M * bin_size, n))
    p_sx = np.array([[0.375, 0.375], [0.125, 0.125]])
    return S, ms, words, bin_size, p_sx, 0.25


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if kernels.ml_decode_numba is None:
        print("numba unavailable or disabled; nothing to compare")
        return

    rng = np.random.default_rng(0)
    rows = []
    for T, K, n in [(500, 16, 8), (500, 256, 12), (2000, 1024, 16)]:
        case = decode_case(rng, T, K, n)
        t_np, a = timed(kernels.ml_decode_numpy, case, args.repeat)
        t_nb, b = timed(kernels.ml_decode_numba, case, args.repeat)
        assert np.array_equal(a, b)
        rows.append((f"ml_decode T={T} K={K} n={n}", t_np, t_nb))
    for T, M, bin_size, n in [(500, 16, 4, 8), (500, 64, 16, 12), (2000, 256, 16, 16)]:
        case = encode_case(rng, T, M, bin_size, n)
        t_np, a = timed(kernels.bin_encode_numpy, case, args.repeat)
        t_nb, b = timed(kernels.bin_encode_numba, case, args.repeat)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        rows.append((f"bin_encode T={T} M={M} bin={bin_size} n={n}", t_np, t_nb))

    print(f"{'kernel':<40}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, t_np, t_nb in rows:
        print(f"{name:<40}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
