import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmask.errors import DimensionError, InvalidStateError, RegisterError
from qmask.qstate import (
    DensityOperator,
    HybridState,
    Povm,
    Register,
    binary_entropy,
    conditional_entropy,
    entropy_of,
    matrix_from_json,
    matrix_to_json,
    mutual_information,
    partial_trace,
    ptrace,
    purify,
    shannon_entropy,
    validate,
    von_neumann_entropy,
)

from conftest import random_density, random_unitary, seeds

H_QUARTER = 0.8112781244591328  # -(3/4) log2(3/4) - (1/4) log2(1/4)


def bell_state():
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return HybridState.quantum_state(np.outer(v, v), [("A", 2), ("B", 2)])


def test_binary_entropy_value():
    assert binary_entropy(0.25) == pytest.approx(H_QUARTER, abs=1e-12)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_von_neumann_diagonal_matches_binary_entropy():
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(H_QUARTER, abs=1e-12)


def test_von_neumann_rejects_invalid_state():
    with pytest.raises(InvalidStateError):
        von_neumann_entropy(np.diag([0.6, 0.6]))


def test_bell_marginal_and_mutual_information():
    s = bell_state()
    marg = partial_trace(s, ["A"])
    assert np.allclose(marg.branches[0][2].matrix, np.eye(2) / 2, atol=1e-14)
    assert mutual_information(s, ["A"], ["B"]) == pytest.approx(2.0, abs=1e-12)
    assert conditional_entropy(s, ["A"], ["B"]) == pytest.approx(-1.0, abs=1e-12)


def test_classical_quantum_entropy():
    regs = [Register.classical("X", (0, 1)), Register.quantum("B", 2)]
    st_ = HybridState(regs, [((0,), 0.5, np.diag([1.0, 0.0])), ((1,), 0.5, np.eye(2) / 2)])
    assert entropy_of(st_, ["X"]) == pytest.approx(1.0)
    assert entropy_of(st_, ["X", "B"]) == pytest.approx(1.5)
    # B marginal is diag(3/4, 1/4)
    assert entropy_of(st_, ["B"]) == pytest.approx(H_QUARTER, abs=1e-12)


def test_branch_order_is_canonical():
    regs = [Register.classical("X", ("a", "b"))]
    one = HybridState(regs, [(("b",), 0.3, np.ones((1, 1))), (("a",), 0.7, np.ones((1, 1)))])
    two = HybridState(regs, [(("a",), 0.7, np.ones((1, 1))), (("b",), 0.3, np.ones((1, 1)))])
    assert [b[0] for b in one.branches] == [("a",), ("b",)]
    assert np.array_equal(one.to_dense(), two.to_dense())


def test_unknown_and_duplicate_registers():
    s = bell_state()
    with pytest.raises(RegisterError):
        entropy_of(s, ["Z"])
    with pytest.raises(RegisterError):
        mutual_information(s, ["A"], ["A"])
    with pytest.raises(RegisterError):
        HybridState([Register.quantum("A", 2), Register.quantum("A", 2)], [((), 1.0, np.eye(4) / 4)])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        HybridState.quantum_state(np.eye(3) / 3, [("A", 2)])


def test_purify_diagonal():
    v = purify(np.diag([0.75, 0.25]))
    expected = np.zeros(4)
    expected[0] = math.sqrt(0.75)
    expected[3] = math.sqrt(0.25)
    assert np.allclose(v, expected, atol=1e-14)


@given(seeds, st.integers(2, 4))
def test_purify_reduces_to_input(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, d)
    v = purify(rho)
    assert np.allclose(ptrace(np.outer(v, v.conj()), [d, d], [0]), rho, atol=1e-10)


def test_validate_reports_trace_residual():
    rep = validate(DensityOperator(np.diag([0.51, 0.5])))
    assert not rep.ok
    (viol,) = rep.violations
    assert viol.invariant == "unit trace"
    assert viol.residual == pytest.approx(0.01, abs=1e-12)


def test_validate_reports_povm_completeness():
    rep = validate(Povm.from_operators([0.6 * np.eye(2), 0.6 * np.eye(2)]))
    assert [v.invariant for v in rep.violations] == ["POVM completeness"]
    assert rep.violations[0].residual == pytest.approx(0.2, abs=1e-12)


def test_validate_flags_non_hermitian_and_negative():
    m = np.array([[0.5, 0.6], [0.0, 0.5]])
    names = {v.invariant for v in validate(DensityOperator(m)).violations}
    assert "hermiticity" in names
    names = {v.invariant for v in validate(DensityOperator(np.diag([1.5, -0.5]))).violations}
    assert names == {"positivity"}


def test_validate_never_raises_on_garbage():
    assert not validate("not a state").ok


def test_partial_trace_composes():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 8)
    s = HybridState.quantum_state(rho, [("A", 2), ("B", 2), ("C", 2)])
    direct = partial_trace(s, ["A"])
    stepwise = partial_trace(partial_trace(s, ["A", "B"]), ["A"])
    assert np.allclose(direct.branches[0][2].matrix, stepwise.branches[0][2].matrix, atol=1e-14)


def test_partial_trace_of_classical_register_sums_weights():
    regs = [Register.classical("X", (0, 1)), Register.classical("Y", (0, 1))]
    s = HybridState.classical_state({(0, 0): 0.1, (0, 1): 0.2, (1, 0): 0.3, (1, 1): 0.4}, regs)
    m = partial_trace(s, ["Y"])
    assert m.pmf() == pytest.approx({(0,): 0.4, (1,): 0.6})


def test_matrix_json_round_trip():
    rng = np.random.default_rng(0)
    m = random_density(rng, 3)
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)


# -- properties ---------------------------------------------------------------------

@given(seeds, st.integers(1, 5))
def test_entropy_bounds(seed, d):
    rho = random_density(np.random.default_rng(seed), d)
    h = von_neumann_entropy(rho)
    assert -1e-12 <= h <= math.log2(d) + 1e-12


@given(seeds, st.integers(2, 4))
def test_unitary_invariance(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, d)
    u = random_unitary(rng, d)
    assert von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


@given(seeds, st.integers(2, 3), st.integers(2, 3))
def test_subadditivity_and_araki_lieb(seed, da, db):
    rho = random_density(np.random.default_rng(seed), da * db)
    s = HybridState.quantum_state(rho, [("A", da), ("B", db)])
    ha, hb, hab = entropy_of(s, "A"), entropy_of(s, "B"), entropy_of(s, ["A", "B"])
    assert hab <= ha + hb + 1e-10
    assert hab >= abs(ha - hb) - 1e-10


@given(seeds, st.integers(1, 3))
def test_classical_entropy_matches_shannon(seed, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(2 * k))
    regs = [Register.classical("X", tuple(range(2 * k)))]
    s = HybridState.classical_state({(i,): float(v) for i, v in enumerate(p)}, regs)
    assert entropy_of(s, "X") == pytest.approx(-np.sum(p * np.log2(p)), abs=1e-10)
    assert shannon_entropy(p) == pytest.approx(-np.sum(p * np.log2(p)), abs=1e-12)
