import numpy as np
import pytest

from qmask.channels import MeasurementChannel, StateSource, lift_random_parameter
from qmask.errors import InfeasibleBudgetError
from qmask.examples import build_projection, projection_measurement_channel, projection_rate_at_budget
from qmask.optimize import (
    FEASIBILITY_SLACK,
    OptimizerOptions,
    RateLeakageObjective,
    optimize_rate,
    region_boundary,
    region_boundary_with_strategies,
)
from qmask.qstate import Povm
from qmask.region import Strategy, evaluate_strategy, strategy_to_json

from conftest import random_povm_ops

FAST = OptimizerOptions(restarts=4, iterations=20, seed=3)


def random_problem(seed, nx=3):
    rng = np.random.default_rng(seed)
    chan = MeasurementChannel(2, 2, Povm.from_operators(random_povm_ops(rng, 4, 2)))
    src = StateSource.classical_copy(rng.dirichlet([1, 1]))
    P = rng.dirichlet(np.ones(nx), size=2)
    V = rng.normal(size=(nx, 2)) + 1j * rng.normal(size=(nx, 2))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return rng, chan, src, P, V


@pytest.mark.parametrize("seed", range(5))
def test_objective_matches_evaluate_strategy(seed):
    _, chan, src, P, V = random_problem(seed)
    obj = RateLeakageObjective(src, chan, Povm.computational(2))
    ev = obj.evaluate(P, V, grad=False)
    s = Strategy(Povm.computational(2), P, tuple(np.outer(v, v.conj()) for v in V))
    pt = evaluate_strategy(src, s, chan)
    assert ev.R_raw == pytest.approx(pt.raw_rate, abs=1e-10)
    assert ev.L == pytest.approx(pt.L, abs=1e-10)


def test_objective_matches_on_quantum_output():
    chan, src = lift_random_parameter(build_projection(0.35))
    rng = np.random.default_rng(8)
    P = rng.dirichlet(np.ones(4), size=2)
    V = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    ev = RateLeakageObjective(src, chan, Povm.computational(2)).evaluate(P, V, grad=False)
    s = Strategy(Povm.computational(2), P, tuple(np.outer(v, v.conj()) for v in V))
    pt = evaluate_strategy(src, s, chan)
    assert ev.R_raw == pytest.approx(pt.raw_rate, abs=1e-10)
    assert ev.L == pytest.approx(pt.L, abs=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_gradients_match_finite_differences(seed):
    rng, chan, src, P, V = random_problem(seed)
    obj = RateLeakageObjective(src, chan, Povm.computational(2))
    ev = obj.evaluate(P, V)
    h = 1e-6
    for s in range(2):
        for x in range(P.shape[1]):
            d = np.zeros_like(P)
            d[s, x] = h
            hi, lo = obj.evaluate(P + d, V, grad=False), obj.evaluate(P - d, V, grad=False)
            # w = p(s) P, so dF/dP = p(s) dF/dw
            assert (hi.R_raw - lo.R_raw) / (2 * h) == pytest.approx(obj.p_s[s] * ev.dR_w[s, x], rel=1e-5, abs=1e-7)
            assert (hi.L - lo.L) / (2 * h) == pytest.approx(obj.p_s[s] * ev.dL_w[s, x], rel=1e-5, abs=1e-7)
    dv = rng.normal(size=V.shape) + 1j * rng.normal(size=V.shape)
    hi = obj.evaluate(P, V + h * dv, grad=False)
    lo = obj.evaluate(P, V - h * dv, grad=False)
    dphi = dv[:, :, None] * V.conj()[:, None, :] + V[:, :, None] * dv.conj()[:, None, :]
    pred_r = sum(np.real(np.trace(ev.dR_phi[x] @ dphi[x])) for x in range(V.shape[0]))
    pred_l = sum(np.real(np.trace(ev.dL_phi[x] @ dphi[x])) for x in range(V.shape[0]))
    assert (hi.R_raw - lo.R_raw) / (2 * h) == pytest.approx(pred_r, rel=1e-5, abs=1e-7)
    assert (hi.L - lo.L) / (2 * h) == pytest.approx(pred_l, rel=1e-5, abs=1e-7)


def test_options_validation():
    with pytest.raises(ValueError):
        OptimizerOptions(restarts=0).check()
    with pytest.raises(ValueError):
        OptimizerOptions(seed=-1).check()
    with pytest.raises(ValueError):
        OptimizerOptions(alphabet_size=0).check()
    chan, src = projection_measurement_channel(0.5)
    with pytest.raises(ValueError):
        optimize_rate(src, chan, -0.1, FAST)


@pytest.mark.parametrize("budget", [0.05, 0.2])
def test_matches_analytic_projection_curve(budget):
    chan, src = projection_measurement_channel(0.5)
    pt, strategy = optimize_rate(src, chan, budget, FAST)
    assert pt.L <= budget + FEASIBILITY_SLACK
    assert pt.R == pytest.approx(projection_rate_at_budget(0.5, budget), abs=1e-6)
    assert strategy.alphabet_size == 10


def test_unconstrained_budget():
    chan, src = projection_measurement_channel(0.5)
    pt, _ = optimize_rate(src, chan, 2.0, FAST)
    assert pt.R == pytest.approx(0.5, abs=1e-6)


def test_deterministic_across_threads():
    chan, src = projection_measurement_channel(0.3)
    a = optimize_rate(src, chan, 0.1, FAST)
    b = optimize_rate(src, chan, 0.1, OptimizerOptions(restarts=4, iterations=20, seed=3, threads=3))
    assert strategy_to_json(a[1]) == strategy_to_json(b[1])
    assert a[0].R == b[0].R and a[0].L == b[0].L


def test_infeasible_budget():
    # the output reveals the state whatever the input, so I(CS;Y) = H(S) = 1
    ops = [np.kron(np.diag(np.eye(2)[e]), np.eye(2)) for e in range(2)]
    chan = MeasurementChannel(2, 2, Povm.from_operators(ops))
    src = StateSource.classical_copy([0.5, 0.5])
    with pytest.raises(InfeasibleBudgetError):
        optimize_rate(src, chan, 0.5, FAST)
    pt, _ = optimize_rate(src, chan, 1.0, FAST)
    assert pt.R == pytest.approx(0.0, abs=1e-9)


def test_region_boundary_monotone():
    chan, src = projection_measurement_channel(0.5)
    grid = [0.0, 0.1, 0.1, 0.3, 0.5]
    pts = region_boundary(src, chan, grid, OptimizerOptions(restarts=2, iterations=10, seed=1))
    rates = [p.R for p in pts]
    assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))
    assert pts[1] == pts[2]
    for p, b in zip(pts, grid):
        assert p.L <= b + FEASIBILITY_SLACK
        assert p.diagnostics["budget"] == b
    assert rates[-1] == pytest.approx(0.5, abs=1e-6)


def test_region_boundary_grid_checks():
    chan, src = projection_measurement_channel(0.5)
    with pytest.raises(ValueError):
        region_boundary(src, chan, [0.2, 0.1])
    with pytest.raises(ValueError):
        region_boundary(src, chan, [-0.1, 0.1])
    assert region_boundary_with_strategies(src, chan, []) == []
