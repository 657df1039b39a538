"""Reference configurations for the simulator."""

from __future__ import annotations

import numpy as np

from .encoders import LetterwiseEncoder
from .model import ClassicalStrategy


def modadd_channel() -> np.ndarray:
    """Binary additive channel W(y | a, s) = 1{y = a XOR s}."""
    W = np.zeros((2, 2, 2))
    for a in range(2):
        for s in range(2):
            W[a, s, a ^ s] = 1.0
    return W


def modadd_state_pmf(p_s: float = 0.25) -> np.ndarray:
    if not 0.0 <= p_s <= 1.0:
        raise ValueError("p_s must lie in [0, 1]")
    return np.array([1.0 - p_s, p_s])


def modadd_binning_strategy() -> ClassicalStrategy:
    """X = (u, s') with s' = s and u uniform; input u XOR s'. Here I(X;S) = H(S)."""
    pmf = np.zeros((2, 4))
    inputs = np.zeros(4, dtype=np.int64)
    for s_copy in range(2):
        for u in range(2):
            x = 2 * s_copy + u
            inputs[x] = u ^ s_copy
    for s in range(2):
        pmf[s, 2 * s] = pmf[s, 2 * s + 1] = 0.5
    return ClassicalStrategy(pmf, inputs)


def modadd_correction_encoder() -> LetterwiseEncoder:
    """Send b XOR s: the state flip is undone before it happens."""
    return LetterwiseEncoder("modadd-correction", np.array([[0, 1], [1, 0]]))


def projection_channel_tensor() -> np.ndarray:
    """Classical analog of the projection channel measured in its own basis.

    State 0 passes the input bit, state 1 outputs 0.
    """
    W = np.zeros((2, 2, 2))
    for a in range(2):
        W[a, 0, a] = 1.0
        W[a, 1, 0] = 1.0
    return W


def projection_state_pmf(eps: float) -> np.ndarray:
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return np.array([1.0 - eps, eps])


def projection_sim_strategy(alpha: float) -> ClassicalStrategy:
    """p(x|s=0) = (1 - alpha, alpha), x = 0 when s = 1; input x."""
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    return ClassicalStrategy(np.array([[1 - alpha, alpha], [1.0, 0.0]]), np.array([0, 1]))


def stateless_strategy(p_x, n_states: int) -> ClassicalStrategy:
    """x ~ p_x independent of the state; input x."""
    p_x = np.asarray(p_x, dtype=float)
    return ClassicalStrategy(np.tile(p_x, (n_states, 1)), np.arange(p_x.size))
