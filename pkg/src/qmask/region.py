"""Single-letter and small-n rate-leakage evaluation.

For an encoder strategy (CSI measurement on E0, conditional pmf p(x|s), input
states phi^x) the induced states are

    rho_ECSXA = sum_{s,x} p(x|s) Tr_E0[(Lambda^s (x) 1) phi_E0EC] (x) |s,x><s,x| (x) phi^x
    rho_BCSX  = N_EA->B(rho_ECSXA)

and the strategy achieves ``R = max(0, I(X;B) - I(X;S))`` at leakage
``L = I(CS;XB)``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    MeasurementChannel,
    RandomParameterChannel,
    StateSource,
    apply,
    apply_measurement,
    product_channel,
    product_source,
)
from .errors import DimensionError, InvalidStateError, SizeLimitError
from .qstate import (
    DensityOperator,
    HybridState,
    Povm,
    Register,
    kron_all,
    matrix_from_json,
    matrix_to_json,
    mutual_information,
    validate,
)

TOL_PMF = 1e-10


def cardinality_cap(dim_a: int, dim_e0: int) -> int:
    """Auxiliary alphabet size that suffices: (dim_A^2 + 1) * dim_E0."""
    return (dim_a * dim_a + 1) * dim_e0


@dataclass(frozen=True, eq=False)
class Strategy:
    """Encoder design: CSI POVM on E0, p(x|s) (rows s, columns x), input states phi^x."""

    csi_povm: Povm
    cond_pmf: np.ndarray
    input_states: tuple
    allow_large_alphabet: bool = False

    def __post_init__(self):
        p = np.array(self.cond_pmf, dtype=float)
        if p.ndim != 2:
            raise DimensionError(f"cond_pmf must be a matrix, got shape {p.shape}")
        p.setflags(write=False)
        object.__setattr__(self, "cond_pmf", p)
        states = tuple(s if isinstance(s, DensityOperator) else DensityOperator(s)
                       for s in self.input_states)
        object.__setattr__(self, "input_states", states)
        if p.shape[0] != len(self.csi_povm):
            raise DimensionError(
                f"cond_pmf has {p.shape[0]} rows, CSI POVM has {len(self.csi_povm)} outcomes")
        if len(states) != p.shape[1]:
            raise DimensionError(f"{len(states)} input states for |X| = {p.shape[1]}")
        if np.any(p < -TOL_PMF):
            raise InvalidStateError("cond_pmf has negative entries")
        resid = float(np.max(np.abs(p.sum(axis=1) - 1.0)))
        if resid > TOL_PMF:
            raise InvalidStateError(f"cond_pmf rows do not sum to one (residual {resid:.3e})")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionError(f"input states have mixed dimensions {sorted(dims)}")
        cap = cardinality_cap(self.dim_a, self.csi_povm.dim)
        if self.alphabet_size > cap and not self.allow_large_alphabet:
            raise SizeLimitError(
                f"|X| = {self.alphabet_size} exceeds the cardinality cap {cap}; "
                "pass allow_large_alphabet=True to override")

    @property
    def alphabet_size(self) -> int:
        return self.cond_pmf.shape[1]

    @property
    def dim_a(self) -> int:
        return self.input_states[0].dim

    def fingerprint(self) -> str:
        """Stable hash of the serialised strategy (used for tie-breaking)."""
        return hashlib.sha256(strategy_to_json(self).encode()).hexdigest()


@dataclass(frozen=True)
class RateLeakagePoint:
    """Rate and leakage in bits per channel use."""

    R: float
    L: float
    provenance: str = ""
    n: int = 1
    raw_rate: float = float("nan")
    diagnostics: dict = field(default_factory=dict, compare=False)


def _validate_triple(source: StateSource, strategy: Strategy, channel):
    if strategy.csi_povm.dim != source.dim_e0:
        raise DimensionError(f"CSI POVM dim {strategy.csi_povm.dim} != source E0 dim {source.dim_e0}")
    if channel.dim_e != source.dim_e:
        raise DimensionError(f"channel E dim {channel.dim_e} != source E dim {source.dim_e}")
    if channel.dim_a != strategy.dim_a:
        raise DimensionError(f"channel A dim {channel.dim_a} != input state dim {strategy.dim_a}")


def post_measurement_states(source: StateSource, povm: Povm):
    """``[(label, p(s), Tr_E0[(Lambda^s (x) 1) phi] / p(s))]`` on E (x) C."""
    d0, dec = source.dim_e0, source.dim_e * source.dim_c
    m = source.vector.reshape(d0, dec)
    out = []
    for label, lam in povm.elements:
        # Tr_E0[(Lambda (x) 1)|v><v|] = M^T Lambda^T conj(M) in row-major E0|EC split
        block = m.T @ lam.T @ m.conj()
        p = float(np.real(np.trace(block)))
        out.append((label, p, block / p if p > 0 else block))
    return out


def induced_joint_state(source: StateSource, strategy: Strategy, channel):
    """Pre-channel state over (S, X, E, C, A) and post-channel state over (S, X, B|Y, C).

    Zero-probability CSI outcomes and zero entries of p(x|s) are dropped.
    """
    if isinstance(channel, RandomParameterChannel):
        raise TypeError("lift random-parameter channels with lift_random_parameter first")
    _validate_triple(source, strategy, channel)
    s_labels = strategy.csi_povm.labels
    x_labels = tuple(range(strategy.alphabet_size))
    regs = [Register.classical("S", s_labels), Register.classical("X", x_labels),
            Register.quantum("E", source.dim_e), Register.quantum("C", source.dim_c),
            Register.quantum("A", strategy.dim_a)]
    branches = []
    for i, (s, ps, sigma) in enumerate(post_measurement_states(source, strategy.csi_povm)):
        if ps <= 0:
            continue
        for x in x_labels:
            pxs = strategy.cond_pmf[i, x]
            if pxs <= 0:
                continue
            # sigma on (E, C), input on A: register order E, C, A matches kron order
            branches.append(((s, x), ps * pxs, np.kron(sigma, strategy.input_states[x].matrix)))
    pre = HybridState(regs, branches)
    if isinstance(channel, MeasurementChannel):
        post = apply_measurement(channel, pre, e="E", a="A", out="Y")
    else:
        post = apply(channel, pre, e="E", a="A", out="B")
    return pre, post


def output_name(channel) -> str:
    return "Y" if isinstance(channel, MeasurementChannel) else "B"


def evaluate_strategy(source: StateSource, strategy: Strategy, channel,
                      provenance: str = "strategy") -> RateLeakagePoint:
    """``R = max(0, I(X;B) - I(X;S))`` and ``L = I(CS;XB)`` from the induced states."""
    pre, post = induced_joint_state(source, strategy, channel)
    b = output_name(channel)
    i_xb = mutual_information(post, ["X"], [b])
    i_xs = mutual_information(pre, ["X"], ["S"])
    leak = mutual_information(post, ["C", "S"], ["X", b])
    raw = i_xb - i_xs
    diag = {"I_XB": i_xb, "I_XS": i_xs, "I_CS_B": mutual_information(post, ["C", "S"], [b])}
    return RateLeakagePoint(max(0.0, raw), max(0.0, leak), provenance, 1, raw, diag)


def trivial_leakage_threshold(channel) -> float:
    """Leakage budget above which masking is vacuous: 2 log2 dim(B) (or 2 log2 |Y|)."""
    return 2.0 * math.log2(channel.dim_b)


# -- multi-letter ------------------------------------------------------------------

def product_strategy(strategy: Strategy, n: int) -> Strategy:
    """Tensor power of a single-letter strategy; labels become tuples."""
    if n == 1:
        return strategy
    elems = []
    for combo in itertools.product(strategy.csi_povm.elements, repeat=n):
        elems.append((tuple(lab for lab, _ in combo), kron_all([op for _, op in combo])))
    pmf = strategy.cond_pmf
    for _ in range(n - 1):
        pmf = np.kron(pmf, strategy.cond_pmf)
    states = [kron_all([strategy.input_states[x].matrix for x in combo])
              for combo in itertools.product(range(strategy.alphabet_size), repeat=n)]
    return Strategy(Povm(tuple(elems)), pmf, tuple(states), allow_large_alphabet=True)


def multiletter_point(source: StateSource, channel, n: int, strategy_n: Strategy) -> RateLeakagePoint:
    """Per-letter (R, L) of an n-letter strategy on the n-fold product channel (n <= 2)."""
    if n not in (1, 2):
        raise SizeLimitError(f"multi-letter evaluation supports n in {{1, 2}}, got n={n}")
    if n == 1:
        return evaluate_strategy(source, strategy_n, channel)
    chan_n = product_channel(channel, n)
    src_n = product_source(source, n)
    pt = evaluate_strategy(src_n, strategy_n, chan_n, provenance=f"strategy n={n}")
    return RateLeakagePoint(pt.R / n, pt.L / n, pt.provenance, n, pt.raw_rate / n, pt.diagnostics)


# -- serialisation ------------------------------------------------------------------

def _label_out(x):
    return [_label_out(v) for v in x] if isinstance(x, tuple) else x


def _label_in(x):
    return tuple(_label_in(v) for v in x) if isinstance(x, list) else x


def strategy_to_dict(strategy: Strategy) -> dict:
    return {
        "csi_povm": {"labels": [_label_out(x) for x in strategy.csi_povm.labels],
                     "elements": [matrix_to_json(op) for _, op in strategy.csi_povm.elements]},
        "cond_pmf": [[float(v) for v in row] for row in strategy.cond_pmf],
        "input_states": [matrix_to_json(s.matrix) for s in strategy.input_states],
    }


def strategy_to_json(strategy: Strategy) -> str:
    return json.dumps(strategy_to_dict(strategy), sort_keys=True, indent=1) + "\n"


def strategy_from_json(document) -> Strategy:
    doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    povm = Povm.from_operators([matrix_from_json(m) for m in doc["csi_povm"]["elements"]],
                               [_label_in(x) for x in doc["csi_povm"]["labels"]])
    rep = validate(povm)
    if not rep.ok:
        raise InvalidStateError(f"CSI POVM invalid: {rep}", rep.violations)
    states = tuple(DensityOperator(matrix_from_json(m)) for m in doc["input_states"])
    for x, st in enumerate(states):
        rep = validate(st)
        if not rep.ok:
            raise InvalidStateError(f"input state {x} invalid: {rep}", rep.violations)
    return Strategy(povm, np.array(doc["cond_pmf"], dtype=float), states,
                    allow_large_alphabet=True)
