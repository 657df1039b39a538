"""Acceptance checks, one test per criterion. Each prints a PASS/FAIL line."""

import math
import time
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmask.channels import (
    MeasurementChannel,
    StateDependentChannel,
    StateSource,
    lift_random_parameter,
    measure_output,
    validate_channel,
)
from qmask.cli import main
from qmask.codesim import SimConfig, exact_leakage, simulate
from qmask.codesim.configs import (
    modadd_binning_strategy,
    modadd_channel,
    modadd_correction_encoder,
    modadd_state_pmf,
    projection_channel_tensor,
    projection_sim_strategy,
    projection_state_pmf,
)
from qmask.codesim.encoders import BinningCode
from qmask.codesim.model import mutual_information_sx
from qmask.codesim.pilot import COVERING_SETUP, COVERING_THRESHOLD
from qmask.errors import InfeasibleBudgetError
from qmask.examples import (
    PAULIS,
    build_depolarizing,
    build_projection,
    projection_measurement_channel,
    projection_strategy,
)
from qmask.optimize import OptimizerOptions, optimize_rate
from qmask.qstate import (
    HybridState,
    Povm,
    Register,
    entropy_of,
    mutual_information,
    validate,
    von_neumann_entropy,
)
from qmask.region import Strategy, evaluate_strategy, multiletter_point, product_strategy

from conftest import random_density, random_kraus, random_povm_ops, random_unitary
from oracles import naive_leakage, shannon_entropy, shannon_mi

CASES = 1000
unbounded_seeds = st.integers(min_value=0, max_value=2**63 - 1)
thousand = settings(max_examples=CASES, database=None, deadline=None)


def h2(x):
    """Binary entropy written out directly (independent of the library)."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def fixture(name):
    return str(resources.files("qmask").joinpath("fixtures", name))


# 1 ------------------------------------------------------------------------------------

def test_criterion_01_projection_closed_form(criterion):
    with criterion(1, "projection example closed form on the 9x5 grid within 1e-9, < 5 s") as notes:
        t0 = time.perf_counter()
        worst = 0.0
        for eps in [round(0.1 * i, 1) for i in range(1, 10)]:
            chan, src = lift_random_parameter(build_projection(eps))
            for alpha in (0.0, 0.1, 0.25, 0.4, 0.5):
                pt = evaluate_strategy(src, projection_strategy(alpha), chan)
                r = (1 - eps) * h2(alpha)
                leak = h2((1 - eps) * alpha) - r
                worst = max(worst, abs(pt.R - r), abs(pt.L - leak))
        elapsed = time.perf_counter() - t0
        notes.append(f"worst deviation {worst:.2e}, {elapsed:.2f}s")
        assert worst <= 1e-9
        assert elapsed < 5.0


# 2 ------------------------------------------------------------------------------------

def test_criterion_02_endpoint_anchors(criterion):
    with criterion(2, "alpha = 0 gives (0, 0); eps = alpha = 1/2 gives (0.5, 0.3112781245)") as notes:
        for eps in (0.1, 0.5, 0.9):
            for measured in (False, True):
                chan, src = (projection_measurement_channel(eps) if measured
                             else lift_random_parameter(build_projection(eps)))
                pt = evaluate_strategy(src, projection_strategy(0.0), chan)
                assert pt.R == 0.0 and pt.L == 0.0, (eps, measured, pt.R, pt.L)
        chan, src = lift_random_parameter(build_projection(0.5))
        pt = evaluate_strategy(src, projection_strategy(0.5), chan)
        notes.append(f"R={pt.R:.12f} L={pt.L:.12f}")
        assert abs(pt.R - 0.5) <= 1e-9
        assert abs(pt.L - 0.3112781245) <= 1e-9


# 3 ------------------------------------------------------------------------------------

def test_criterion_03_pauli_cancellation(criterion):
    with criterion(3, "Pauli pre-correction cancels; average channel is (1-eps) rho + eps pi") as notes:
        worst_cancel = worst_avg = 0.0
        basis = [np.array(m, dtype=complex) for m in
                 ([[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [1, 0]], [[0, 0], [0, 1]])]
        for eps in (0.1, 0.5, 1.0):
            ch = build_depolarizing(eps)
            for s in range(4):
                for b in range(2):
                    ket = np.diag(np.eye(2)[b]).astype(complex)
                    out = ch.apply_branch(s, PAULIS[s] @ ket @ PAULIS[s].conj().T)
                    worst_cancel = max(worst_cancel, float(np.max(np.abs(out - ket))))
            for e in basis:
                expected = (1 - eps) * e + eps * np.trace(e) * np.eye(2) / 2
                worst_avg = max(worst_avg, float(np.max(np.abs(ch.average(e) - expected))))
        notes.append(f"cancellation {worst_cancel:.1e}, average {worst_avg:.1e}")
        assert worst_cancel <= 1e-12
        assert worst_avg <= 1e-12


# 4 ------------------------------------------------------------------------------------

def test_criterion_04_correction_encoder(criterion):
    with criterion(4, "mod-add correction encoder, n=8, R=7/8: 0 errors in 500 trials, leakage 0") as notes:
        t0 = time.perf_counter()
        cfg = SimConfig(8, 0.875, 500, seed=2024, encoder=modadd_correction_encoder())
        res = simulate(cfg, modadd_channel(), modadd_state_pmf(0.25))
        elapsed = time.perf_counter() - t0
        notes.append(f"errors {res.error_rate}, leakage {res.leakage_bits_per_letter:.1e}, {elapsed:.1f}s")
        assert res.n_messages == 128
        assert res.error_rate == 0.0
        assert abs(res.leakage_bits_per_letter) <= 1e-12
        assert elapsed < 30.0


# 5 ------------------------------------------------------------------------------------

def test_criterion_05_trivial_budget(criterion):
    with criterion(5, "budget 2 log2|Y| on the measurement analog equals the unconstrained optimum") as notes:
        eps = 0.5
        chan, src = projection_measurement_channel(eps)
        opts = OptimizerOptions(restarts=8, seed=11)
        at_threshold, _ = optimize_rate(src, chan, 2 * math.log2(len(chan.povm)), opts)
        free, _ = optimize_rate(src, chan, math.inf, opts)
        # the stuck-at channel: capacity with encoder state knowledge is 1 - eps
        notes.append(f"R(2)={at_threshold.R:.10f}, R(inf)={free.R:.10f}, 1-eps={1 - eps}")
        assert abs(at_threshold.R - free.R) <= 1e-6
        assert abs(at_threshold.R - (1 - eps)) <= 1e-6


# 6 ------------------------------------------------------------------------------------

def test_criterion_06_covering_decay(criterion):
    s = COVERING_SETUP
    with criterion(6, "covering failure nonincreasing in Rtilde - R, final point <= pilot threshold") as notes:
        t0 = time.perf_counter()
        q = modadd_state_pmf(s["p_s"])
        strategy = modadd_binning_strategy()
        i_xs = mutual_information_sx(strategy.joint(q))
        rates = []
        for extra in s["extras"]:
            cfg = SimConfig(s["n"], s["R"], 500, seed=7, delta=s["delta"], Rtilde=s["R"] + i_xs + extra)
            rates.append(simulate(cfg, modadd_channel(), q, strategy, leakage=False).covering_failure_rate)
        elapsed = time.perf_counter() - t0
        notes.append(f"rates {rates}, threshold {COVERING_THRESHOLD:.4f}, {elapsed:.1f}s")
        assert all(b <= a for a, b in zip(rates, rates[1:]))
        assert rates[-1] <= COVERING_THRESHOLD
        assert elapsed < 60.0


# 7 ------------------------------------------------------------------------------------

def random_binary_measurement_channel(rng):
    chan = MeasurementChannel(2, 2, Povm.from_operators(random_povm_ops(rng, 4, 2)))
    return chan, StateSource.classical_copy(rng.dirichlet([1.0, 1.0]))


def best_rate(src, chan, budget, k, seed):
    try:
        pt, _ = optimize_rate(src, chan, budget, OptimizerOptions(restarts=6, seed=seed, alphabet_size=k))
    except InfeasibleBudgetError:
        return None
    return pt.R


@pytest.mark.slow
def test_criterion_07_cardinality_bound(criterion):
    with criterion(7, "|X| = 10 vs |X| = 13 optima agree within 1e-4 on 20 random channels, < 10 min") as notes:
        t0 = time.perf_counter()
        rng = np.random.default_rng(20240607)
        worst = 0.0
        for j in range(20):
            chan, src = random_binary_measurement_channel(rng)
            free, _ = optimize_rate(src, chan, math.inf, OptimizerOptions(restarts=6, seed=j))
            for budget in (math.inf, 0.5 * free.L):
                a = best_rate(src, chan, budget, 10, j)
                b = best_rate(src, chan, budget, 13, j)
                assert (a is None) == (b is None), (j, budget, a, b)
                if a is not None:
                    worst = max(worst, abs(a - b))
        elapsed = time.perf_counter() - t0
        notes.append(f"worst difference {worst:.2e}, {elapsed:.0f}s")
        assert worst <= 1e-4
        assert elapsed < 600.0


# 8 ------------------------------------------------------------------------------------

def _run_property(check):
    """Run ``check(rng)`` on CASES hypothesis-drawn seeds; return the number of cases run."""
    seen = []

    @thousand
    @given(unbounded_seeds)
    def prop(seed):
        seen.append(seed)
        check(np.random.default_rng(seed))

    prop()
    return len(seen)


def _entropy_bounds(rng):
    d = int(rng.integers(1, 6))
    h = von_neumann_entropy(random_density(rng, d, rank=int(rng.integers(1, d + 1))))
    assert -1e-12 <= h <= math.log2(d) + 1e-12


def _unitary_invariance(rng):
    d = int(rng.integers(2, 5))
    rho = random_density(rng, d)
    u = random_unitary(rng, d)
    assert abs(von_neumann_entropy(u @ rho @ u.conj().T) - von_neumann_entropy(rho)) <= 1e-9


def _subadditivity(rng):
    da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    s = HybridState.quantum_state(random_density(rng, da * db), [("A", da), ("B", db)])
    assert entropy_of(s, ["A", "B"]) <= entropy_of(s, "A") + entropy_of(s, "B") + 1e-10


def _mi_nonnegative(rng):
    nx, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    w = rng.dirichlet(np.ones(nx))
    regs = [Register.classical("X", tuple(range(nx))), Register.quantum("B", db), Register.quantum("R", 2)]
    s = HybridState(regs, [((x,), w[x], random_density(rng, 2 * db)) for x in range(nx)])
    assert mutual_information(s, ["X"], ["B"]) >= -1e-10
    assert mutual_information(s, ["X", "R"], ["B"]) >= -1e-10
    assert mutual_information(s, ["B"], ["R"]) >= -1e-10


def _trace_preservation(rng):
    k, db = int(rng.integers(1, 4)), int(rng.integers(2, 4))
    kraus = random_kraus(rng, db, 4, k)
    if kraus is None:
        kraus = random_kraus(rng, db, 4, 4)
    ch = StateDependentChannel(2, 2, db, kraus)
    assert validate_channel(ch).ok
    out = ch(random_density(rng, 4))
    assert abs(np.trace(out) - 1.0) <= 1e-10
    assert np.linalg.eigvalsh(0.5 * (out + out.conj().T)).min() >= -1e-10


def _povm_completeness(rng):
    d, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    povm = Povm.from_operators(random_povm_ops(rng, d, n))
    assert validate(povm).ok
    ch = StateDependentChannel(1, 2, d, random_kraus(rng, d, 2, 2))
    assert validate(measure_output(ch, povm).povm).ok


INVARIANTS = [
    ("entropy bounds", _entropy_bounds),
    ("unitary invariance", _unitary_invariance),
    ("subadditivity", _subadditivity),
    ("MI nonnegativity", _mi_nonnegative),
    ("trace preservation", _trace_preservation),
    ("POVM completeness", _povm_completeness),
]


def test_criterion_08_invariant_suites(criterion):
    with criterion(8, "invariant suites, 1000 randomized cases each, no violations") as notes:
        for name, check in INVARIANTS:
            count = _run_property(check)
            notes.append(f"{name} {count}")
            assert count >= CASES, (name, count)


# 9 ------------------------------------------------------------------------------------

def _shannon_oracle_case(rng):
    na, nb = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    p = rng.dirichlet(np.ones(na * nb)).reshape(na, nb)
    if rng.random() < 0.3:
        p[rng.integers(na), rng.integers(nb)] = 0.0
        p /= p.sum()
    regs = [Register.classical("A", tuple(range(na))), Register.classical("B", tuple(range(nb)))]
    s = HybridState.classical_state({(a, b): float(p[a, b]) for a in range(na) for b in range(nb)}, regs)
    joint = {(a, b): float(p[a, b]) for a in range(na) for b in range(nb)}
    err_h = abs(entropy_of(s, ["A", "B"]) - shannon_entropy(p.ravel()))
    err_ha = abs(entropy_of(s, "A") - shannon_entropy(p.sum(axis=1)))
    err_mi = abs(mutual_information(s, ["A"], ["B"]) - shannon_mi(joint))
    return max(err_h, err_ha, err_mi)


def _leakage_oracle_case(rng, n):
    if rng.random() < 0.5:
        W, q, strat = modadd_channel(), modadd_state_pmf(rng.uniform(0.05, 0.5)), modadd_binning_strategy()
    else:
        W, q = projection_channel_tensor(), projection_state_pmf(rng.uniform(0.1, 0.9))
        strat = projection_sim_strategy(rng.uniform(0.0, 0.5))
    W = 0.7 * W + 0.3 * rng.dirichlet(np.ones(2), size=(2, 2))
    R = int(rng.integers(0, n + 1)) / n
    code = BinningCode(strat, W, q, n, R, R + int(rng.integers(0, 3)) / n, rng.uniform(0.1, 0.5),
                       seed=int(rng.integers(2**32)))
    return abs(exact_leakage(code, W, q) - naive_leakage(code, W, q))


def _product_case(rng):
    nx = int(rng.integers(1, 4))
    if rng.random() < 0.5:
        chan, src = random_binary_measurement_channel(rng)
    else:
        chan, src = lift_random_parameter(build_projection(rng.uniform(0.05, 1.0)))
    pmf = rng.dirichlet(np.ones(nx), size=2)
    s = Strategy(Povm.computational(2), pmf, tuple(random_density(rng, 2) for _ in range(nx)))
    one = evaluate_strategy(src, s, chan)
    two = multiletter_point(src, chan, 2, product_strategy(s, 2))
    return max(abs(one.R - two.R), abs(one.L - two.L), abs(one.raw_rate - two.raw_rate))


def test_criterion_09_oracles(criterion):
    with criterion(9, "Shannon oracle 1e-10; naive leakage enumerator 1e-12; n=2 product 1e-9") as notes:
        rng = np.random.default_rng(99)
        shannon = max(_shannon_oracle_case(rng) for _ in range(300))
        leak = max(_leakage_oracle_case(rng, n) for n in (1, 2, 3, 4) for _ in range(6))
        prod = max(_product_case(rng) for _ in range(12))
        notes.append(f"shannon {shannon:.1e}, leakage {leak:.1e}, product {prod:.1e}")
        assert shannon <= 1e-10
        assert leak <= 1e-12
        assert prod <= 1e-9


# 10 -----------------------------------------------------------------------------------

def test_criterion_10_determinism(criterion, tmp_path, capsys):
    with criterion(10, "stochastic commands give byte-identical files across thread counts") as notes:
        outputs = {}
        for threads in (1, 4, 1):
            sim = tmp_path / f"sim-{threads}.json"
            code = main(["simulate", "--config", "projection", "--epsilon", "0.3", "--alpha", "0.4",
                         "--n", "6", "--rate", "0.5", "--trials", "700", "--seed", "31",
                         "--threads", str(threads), "--out", str(sim)])
            assert code == 0
            reg = tmp_path / f"region-{threads}.csv"
            code = main(["region", "--channel", fixture("example3_meas.json"), "--budgets", "0:0.3:0.15",
                         "--restarts", "3", "--iterations", "10", "--seed", "5",
                         "--threads", str(threads), "--out", str(reg)])
            assert code == 0
            strat = tmp_path / f"strategy-{threads}.json"
            code = main(["capacity", "--channel", fixture("example1.json"), "--budget", "1.2",
                         "--restarts", "3", "--iterations", "10", "--seed", "5",
                         "--threads", str(threads), "--strategy-out", str(strat)])
            assert code == 0
            stdout = capsys.readouterr().out
            run = (sim.read_bytes(), reg.read_bytes(), strat.read_bytes(), stdout)
            if threads in outputs:
                assert outputs[threads] == run
            outputs[threads] = run
        assert outputs[1] == outputs[4]
        notes.append("simulate, region and capacity outputs identical for threads 1 and 4")
