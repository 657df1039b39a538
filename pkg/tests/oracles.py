"""Independent reference computations, written without the library's helpers."""

import itertools
import math


def shannon_mi(joint):
    """I(A;B) in bits from a dict {(a, b): p}."""
    pa, pb = {}, {}
    for (a, b), p in joint.items():
        pa[a] = pa.get(a, 0.0) + p
        pb[b] = pb.get(b, 0.0) + p
    return sum(p * math.log2(p / (pa[a] * pb[b])) for (a, b), p in joint.items() if p > 0)


def shannon_entropy(pmf):
    return -sum(p * math.log2(p) for p in pmf if p > 0)


def naive_leakage(code, W, q):
    """(1/n) I(S^n; Y^n) by a plain loop over s^n, m and y^n."""
    n, M = code.n, code.n_messages
    n_s, n_y = len(W[0]), len(W[0][0])
    joint = {}
    for s in itertools.product(range(n_s), repeat=n):
        p_s = 1.0
        for letter in s:
            p_s *= float(q[letter])
        if p_s == 0.0:
            continue
        for m in range(M):
            inputs, _, _ = code.encode_batch([m], [list(s)])
            a = [int(v) for v in inputs[0]]
            for y in itertools.product(range(n_y), repeat=n):
                p = p_s / M
                for i in range(n):
                    p *= float(W[a[i]][s[i]][y[i]])
                if p > 0.0:
                    joint[(s, y)] = joint.get((s, y), 0.0) + p
    return shannon_mi(joint) / n
