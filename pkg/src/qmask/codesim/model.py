"""Classical channel analogs and encoder strategies for simulation.

A channel analog is a stochastic tensor ``W[a, s, y]`` (input letter, state,
output). A strategy picks the auxiliary letter x from p(x|s) and sends the
channel input ``input_map[x]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channels import MeasurementChannel, StateSource
from ..errors import DimensionError, SpecError
from ..qstate import Povm, mutual_information
from ..region import RateLeakagePoint, Strategy, evaluate_strategy, induced_joint_state

TOL_NEG = 1e-12
TOL_ROW = 1e-9
MAX_LETTERS = 4


def check_channel_tensor(W) -> np.ndarray:
    """Validate and return W as float array (|A|, |S|, |Y|) with rows summing to one."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 3:
        raise DimensionError(f"channel tensor must have shape (|A|, |S|, |Y|), got {W.shape}")
    worst = float(W.min())
    if worst < -TOL_NEG:
        raise SpecError(f"channel tensor has negative probability {worst:.3e}")
    resid = float(np.max(np.abs(W.sum(axis=2) - 1.0)))
    if resid > TOL_ROW:
        raise SpecError(f"channel tensor rows do not sum to one (residual {resid:.3e})")
    return np.clip(W, 0.0, None)


def check_pmf(q, what="pmf") -> np.ndarray:
    q = np.asarray(q, dtype=float).ravel()
    if q.size == 0 or q.min() < -TOL_NEG or abs(q.sum() - 1.0) > TOL_ROW:
        raise SpecError(f"{what} must be a probability vector, got {q.tolist()}")
    return np.clip(q, 0.0, None)


@dataclass(frozen=True, eq=False)
class ClassicalStrategy:
    """p(x|s) (rows s) and the channel input letter sent for each x."""

    cond_pmf: np.ndarray
    input_map: np.ndarray

    def __post_init__(self):
        p = np.array(self.cond_pmf, dtype=float)
        m = np.array(self.input_map, dtype=np.int64).ravel()
        if p.ndim != 2 or p.shape[1] != m.size:
            raise DimensionError(f"cond_pmf shape {p.shape} does not match {m.size} input letters")
        if p.min() < -TOL_NEG or np.max(np.abs(p.sum(axis=1) - 1.0)) > TOL_ROW:
            raise SpecError("cond_pmf rows must be probability vectors")
        p.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "cond_pmf", p)
        object.__setattr__(self, "input_map", m)

    @property
    def alphabet_size(self) -> int:
        return self.cond_pmf.shape[1]

    def joint(self, q) -> np.ndarray:
        """p(s, x) = q(s) p(x|s)."""
        return np.asarray(q)[:, None] * self.cond_pmf


def mutual_information_sx(p_sx) -> float:
    p_sx = np.asarray(p_sx, dtype=float)
    ps, px = p_sx.sum(axis=1), p_sx.sum(axis=0)
    nz = p_sx > 0
    return float(np.sum(p_sx[nz] * np.log2(p_sx[nz] / np.outer(ps, px)[nz])))


def induced_output_pmf(W, q, strategy: ClassicalStrategy) -> np.ndarray:
    """Decoder metric p(y|x) = sum_s p(s|x) W[input_map[x], s, y]."""
    p_sx = strategy.joint(q)
    px = p_sx.sum(axis=0)
    out = np.empty((strategy.alphabet_size, W.shape[2]))
    for x in range(strategy.alphabet_size):
        post = p_sx[:, x] / px[x] if px[x] > 0 else np.asarray(q, dtype=float)
        out[x] = post @ W[strategy.input_map[x]]
    return out


def check_sizes(W, q, strategy: ClassicalStrategy | None):
    n_a, n_s, n_y = W.shape
    if q.size != n_s:
        raise DimensionError(f"state pmf has {q.size} letters, channel has |S| = {n_s}")
    sizes = {"|S|": n_s, "|Y|": n_y, "|A|": n_a}
    if strategy is not None:
        sizes["|X|"] = strategy.alphabet_size
        if strategy.cond_pmf.shape[0] != n_s:
            raise DimensionError(f"strategy has {strategy.cond_pmf.shape[0]} state rows, |S| = {n_s}")
        if strategy.input_map.min() < 0 or strategy.input_map.max() >= n_a:
            raise DimensionError("strategy input_map refers to letters outside the channel input alphabet")
    for name, v in sizes.items():
        if v > MAX_LETTERS:
            raise DimensionError(f"{name} = {v} exceeds the simulator limit {MAX_LETTERS}")


# -- bridge to the single-letter formula ---------------------------------------------

def embed_measurement_channel(W) -> MeasurementChannel:
    """W as a measurement channel on E (x) A with E = |S| and diagonal POVM elements."""
    n_a, n_s, n_y = W.shape
    ops = []
    for y in range(n_y):
        diag = np.array([W[a, s, y] for s in range(n_s) for a in range(n_a)])
        ops.append(np.diag(diag).astype(np.complex128))
    return MeasurementChannel(n_s, n_a, Povm.from_operators(ops))


def embed_strategy(strategy: ClassicalStrategy, n_a: int) -> Strategy:
    n_s = strategy.cond_pmf.shape[0]
    states = tuple(np.diag(np.eye(n_a)[a]).astype(np.complex128) for a in strategy.input_map)
    return Strategy(Povm.computational(n_s), strategy.cond_pmf, states, allow_large_alphabet=True)


def single_letter_prediction(W, q, strategy: ClassicalStrategy) -> RateLeakagePoint:
    """(R, L) bound of the strategy from the region formula (classical CSI copy source)."""
    chan = embed_measurement_channel(W)
    return evaluate_strategy(StateSource.classical_copy(q), embed_strategy(strategy, W.shape[0]), chan,
                             provenance="single-letter prediction")


def single_letter_leakage_bound(W, q, strategy: ClassicalStrategy) -> float:
    """I(CS;XY) of the induced state."""
    chan = embed_measurement_channel(W)
    _, post = induced_joint_state(StateSource.classical_copy(q), embed_strategy(strategy, W.shape[0]), chan)
    return mutual_information(post, ["C", "S"], ["X", "Y"])
