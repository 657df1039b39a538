"""Built-in channels: random Pauli (depolarizing) and random projection.

The projection channel leaves the qubit alone with probability 1 - eps and
replaces it by |psi><psi| with probability eps. With the encoder strategy
"X = V ~ Bernoulli(alpha) when S = 0, X = 0 when S = 1" and inputs
{|psi>, |psi_perp>} it achieves

    R(alpha) = (1 - eps) h(alpha)
    L(alpha) = h((1 - eps) alpha) - (1 - eps) h(alpha)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import RandomParameterChannel, lift_random_parameter, measure_output
from .qstate import Povm, binary_entropy
from .region import RateLeakagePoint, Strategy

I2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (I2, PAULI_X, PAULI_Y, PAULI_Z)


def _check_eps(eps: float):
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")


def _qubit_basis(psi):
    if psi is None:
        psi = np.array([1.0, 0.0])
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("psi must be a unit vector in C^2")
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    return psi, perp


def build_depolarizing(eps: float) -> RandomParameterChannel:
    """Pauli s in {I, X, Y, Z} applied with q = (1 - 3eps/4, eps/4, eps/4, eps/4)."""
    _check_eps(eps)
    q = [1 - 3 * eps / 4, eps / 4, eps / 4, eps / 4]
    return RandomParameterChannel((0, 1, 2, 3), q, {s: PAULIS[s][None] for s in range(4)})


def build_projection(eps: float, psi=None) -> RandomParameterChannel:
    """Identity with probability 1 - eps, replacement by |psi><psi| with probability eps."""
    _check_eps(eps)
    psi, _ = _qubit_basis(psi)
    reset = np.stack([np.outer(psi, np.eye(2)[j]) for j in range(2)])
    return RandomParameterChannel((0, 1), [1 - eps, eps], {0: I2[None], 1: reset})


def projection_measurement_channel(eps: float, psi=None):
    """Projection channel followed by a measurement in the {psi, psi_perp} basis.

    Returns ``(MeasurementChannel, StateSource)`` with classical CSI (E0 = E = C = S).
    """
    psi, perp = _qubit_basis(psi)
    chan, src = lift_random_parameter(build_projection(eps, psi))
    basis = Povm.from_operators([np.outer(psi, psi.conj()), np.outer(perp, perp.conj())])
    return measure_output(chan, basis), src


def projection_strategy(alpha: float, psi=None) -> Strategy:
    """p(x|s=0) = (1 - alpha, alpha), p(x|s=1) = (1, 0); inputs psi, psi_perp."""
    _check_alpha(alpha)
    psi, perp = _qubit_basis(psi)
    pmf = np.array([[1 - alpha, alpha], [1.0, 0.0]])
    states = (np.outer(psi, psi.conj()), np.outer(perp, perp.conj()))
    return Strategy(Povm.computational(2), pmf, states)


def projection_analytic(eps: float, alpha: float) -> RateLeakagePoint:
    _check_eps(eps)
    _check_alpha(alpha)
    r = (1 - eps) * binary_entropy(alpha)
    leak = binary_entropy((1 - eps) * alpha) - r
    return RateLeakagePoint(r, leak, f"analytic projection eps={eps} alpha={alpha}")


@dataclass(frozen=True)
class AnalyticCurve:
    eps: float
    alpha: np.ndarray
    R: np.ndarray
    L: np.ndarray

    def best_rate(self, budget: float) -> float:
        """Largest analytic rate with L(alpha) <= budget (L is increasing in alpha)."""
        ok = self.L <= budget
        return float(self.R[ok].max()) if ok.any() else 0.0


def projection_curve(eps: float, alphas=None) -> AnalyticCurve:
    if alphas is None:
        alphas = np.linspace(0.0, 0.5, 501)
    alphas = np.asarray(alphas, dtype=float)
    pts = [projection_analytic(eps, a) for a in alphas]
    return AnalyticCurve(eps, alphas, np.array([p.R for p in pts]), np.array([p.L for p in pts]))


def projection_rate_at_budget(eps: float, budget: float, tol: float = 1e-13) -> float:
    """Analytic inner-bound rate for a leakage budget, by bisection on alpha."""
    if budget >= projection_analytic(eps, 0.5).L:
        return 1.0 - eps
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if projection_analytic(eps, mid).L <= budget:
            lo = mid
        else:
            hi = mid
    return projection_analytic(eps, lo).R


def depolarizing_correction_strategy() -> Strategy:
    """X = (b, s) with b uniform; input sigma_s |b><b| sigma_s (undoes the Pauli)."""
    labels = [(b, s) for s in range(4) for b in range(2)]
    pmf = np.zeros((4, 8))
    states = []
    for x, (b, s) in enumerate(labels):
        pmf[s, x] = 0.5
        ket = np.eye(2)[b]
        states.append(PAULIS[s] @ np.outer(ket, ket) @ PAULIS[s].conj().T)
    return Strategy(Povm.computational(4), pmf, tuple(states))


def depolarizing_correction_encoder():
    """Letterwise encoder for the mod-2 additive analog: input = b XOR s."""
    from .codesim.encoders import LetterwiseEncoder

    return LetterwiseEncoder("modadd-correction", np.array([[0, 1], [1, 0]]))


def depolarizing_lifted(eps: float):
    """``(StateDependentChannel, StateSource)`` for the random Pauli channel."""
    return lift_random_parameter(build_depolarizing(eps))


__all__ = [
    "AnalyticCurve", "build_depolarizing",
    "build_projection", "depolarizing_correction_encoder", "depolarizing_correction_strategy",
    "depolarizing_lifted", "projection_analytic", "projection_curve",
    "projection_measurement_channel", "projection_rate_at_budget", "projection_strategy",
]
