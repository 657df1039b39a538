"""Finite-dimensional classical-quantum state algebra.

Density operators, POVMs, and hybrid (classically labelled) states over named
registers, together with entropy and mutual-information functionals. All
information quantities are in bits.

A :class:`HybridState` stores a classical-quantum state

    rho = sum_b  w_b |labels_b><labels_b| (x) rho_b

where ``labels_b`` is a tuple over the classical registers and ``rho_b`` acts
on the tensor product of the quantum registers (in register order). A purely
quantum state is a hybrid state with a single branch and no classical
registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidStateError, RegisterError

TOL_HERM = 1e-10
TOL_PSD = 1e-9
TOL_TRACE = 1e-10
TOL_POVM = 1e-9
TOL_WEIGHT = 1e-10

# Unnormalised blocks below this trace are dropped when building hybrid states.
_NEGLIGIBLE_WEIGHT = 1e-15
# entropy sums carry ~1e-15 cancellation noise; information below this is zero
MI_ROUNDOFF = 1e-13


def _as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A dense density matrix. Invariants are checked by :func:`validate`."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector) -> "DensityOperator":
        v = np.asarray(vector, dtype=np.complex128).ravel()
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    @classmethod
    def diagonal(cls, probs) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)))

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Povm:
    """A labelled POVM ``{(label, Lambda_label)}`` on a ``dim``-dimensional space."""

    elements: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        elems = tuple((label, _as_matrix(op)) for label, op in self.elements)
        if not elems:
            raise InvalidStateError("POVM needs at least one element")
        dims = {op.shape[0] for _, op in elems}
        if len(dims) != 1:
            raise DimensionError(f"POVM elements have mixed dimensions {sorted(dims)}")
        labels = [label for label, _ in elems]
        if len(set(labels)) != len(labels):
            raise InvalidStateError(f"POVM labels are not unique: {labels}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "dim", dims.pop())

    @classmethod
    def from_operators(cls, operators, labels=None) -> "Povm":
        operators = list(operators)
        if labels is None:
            labels = range(len(operators))
        return cls(tuple(zip(labels, operators)))

    @classmethod
    def computational(cls, dim: int, labels=None) -> "Povm":
        """Projective measurement in the standard basis."""
        ops = []
        for j in range(dim):
            p = np.zeros((dim, dim))
            p[j, j] = 1.0
            ops.append(p)
        return cls.from_operators(ops, labels)

    @classmethod
    def trivial(cls, dim: int, label=0) -> "Povm":
        return cls(((label, np.eye(dim)),))

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.elements)

    @property
    def operators(self) -> np.ndarray:
        return np.stack([op for _, op in self.elements])

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class Register:
    """A named classical (finite alphabet) or quantum (dimension) register."""

    name: str
    kind: str
    alphabet: tuple = ()
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("classical", "quantum"):
            raise ValueError(f"register kind must be 'classical' or 'quantum', got {self.kind!r}")
        if self.kind == "classical":
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
            if not self.alphabet:
                raise InvalidStateError(f"classical register {self.name} has an empty alphabet")
            if len(set(self.alphabet)) != len(self.alphabet):
                raise InvalidStateError(f"classical register {self.name} repeats alphabet symbols")
        elif int(self.dim) < 1:
            raise DimensionError(f"quantum register {self.name} needs dim >= 1")

    @classmethod
    def classical(cls, name: str, alphabet: Iterable) -> "Register":
        return cls(name, "classical", alphabet=tuple(alphabet))

    @classmethod
    def quantum(cls, name: str, dim: int) -> "Register":
        return cls(name, "quantum", dim=int(dim))

    @property
    def is_classical(self) -> bool:
        return self.kind == "classical"


class HybridState:
    """Classically labelled mixture of density operators over named registers.

    Branches are kept sorted by the alphabet positions of their labels, so two
    states built from the same data compare equal regardless of input order.
    Construction does not enforce the numeric invariants; use :func:`validate`.
    """

    __slots__ = ("registers", "branches", "_label_index")

    def __init__(self, registers: Sequence[Register], branches: Iterable):
        registers = tuple(registers)
        names = [r.name for r in registers]
        if len(set(names)) != len(names):
            raise RegisterError(f"register names are not unique: {names}")
        self.registers = registers
        classical = [r for r in registers if r.is_classical]
        index = [{sym: i for i, sym in enumerate(r.alphabet)} for r in classical]
        self._label_index = index
        dim = int(np.prod([r.dim for r in registers if not r.is_classical], dtype=np.int64))

        out = []
        for labels, weight, state in branches:
            labels = tuple(labels)
            if len(labels) != len(classical):
                raise DimensionError(
                    f"branch label {labels} does not match classical registers "
                    f"{[r.name for r in classical]}")
            for sym, reg, idx in zip(labels, classical, index):
                if sym not in idx:
                    raise RegisterError(f"label {sym!r} not in alphabet of register {reg.name}")
            if not isinstance(state, DensityOperator):
                state = DensityOperator(state)
            if state.dim != dim:
                raise DimensionError(f"branch {labels} has dim {state.dim}, expected {dim}")
            out.append((labels, float(weight), state))
        out.sort(key=lambda b: self._sort_key(b[0]))
        keys = [b[0] for b in out]
        if len(set(keys)) != len(keys):
            raise InvalidStateError("classical label tuples repeat across branches")
        self.branches = tuple(out)

    def _sort_key(self, labels):
        return tuple(idx[sym] for sym, idx in zip(labels, self._label_index))

    @classmethod
    def from_blocks(cls, registers: Sequence[Register], blocks) -> "HybridState":
        """Build from ``{labels: unnormalised operator}``; the trace becomes the weight.

        Blocks sharing a label are summed; negligible blocks are dropped.
        """
        acc: dict = {}
        for labels, op in (blocks.items() if isinstance(blocks, dict) else blocks):
            labels = tuple(labels)
            op = np.asarray(op, dtype=np.complex128)
            acc[labels] = acc[labels] + op if labels in acc else op
        branches = []
        for labels, op in acc.items():
            w = float(np.real(np.trace(op)))
            if w <= _NEGLIGIBLE_WEIGHT:
                continue
            branches.append((labels, w, op / w))
        return cls(registers, branches)

    @classmethod
    def quantum_state(cls, rho, names_dims: Sequence[tuple]) -> "HybridState":
        """Single-branch state over quantum registers ``[(name, dim), ...]``."""
        regs = [Register.quantum(n, d) for n, d in names_dims]
        return cls(regs, [((), 1.0, rho)])

    @classmethod
    def classical_state(cls, pmf: dict, registers: Sequence[Register]) -> "HybridState":
        """Fully classical state from ``{label tuple: probability}``."""
        return cls(registers, [(k, p, np.ones((1, 1))) for k, p in pmf.items() if p > 0])

    # -- structure ---------------------------------------------------------
    @property
    def names(self) -> tuple:
        return tuple(r.name for r in self.registers)

    @property
    def classical_registers(self) -> tuple:
        return tuple(r for r in self.registers if r.is_classical)

    @property
    def quantum_registers(self) -> tuple:
        return tuple(r for r in self.registers if not r.is_classical)

    @property
    def quantum_dims(self) -> tuple:
        return tuple(r.dim for r in self.quantum_registers)

    @property
    def dim(self) -> int:
        return int(np.prod(self.quantum_dims, dtype=np.int64))

    def register(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise RegisterError(f"unknown register {name!r}; have {list(self.names)}")

    def weights(self) -> np.ndarray:
        return np.array([w for _, w, _ in self.branches])

    def pmf(self) -> dict:
        return {labels: w for labels, w, _ in self.branches}

    def to_dense(self) -> np.ndarray:
        """Full block-diagonal matrix over (classical registers) (x) (quantum registers)."""
        csizes = [len(r.alphabet) for r in self.classical_registers]
        ncl = int(np.prod(csizes, dtype=np.int64)) if csizes else 1
        d = self.dim
        out = np.zeros((ncl * d, ncl * d), dtype=np.complex128)
        for labels, w, st in self.branches:
            pos = np.ravel_multi_index(self._sort_key(labels), csizes) if csizes else 0
            out[pos * d:(pos + 1) * d, pos * d:(pos + 1) * d] = w * st.matrix
        return out

    def __repr__(self):
        regs = ", ".join(
            f"{r.name}:{'c' + str(len(r.alphabet)) if r.is_classical else 'q' + str(r.dim)}"
            for r in self.registers)
        return f"HybridState([{regs}], {len(self.branches)} branches)"


# -- tensor helpers ------------------------------------------------------------

def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for op in ops:
        out = np.kron(out, op)
    return out


def permute_subsystems(matrix: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``i`` is old factor ``perm[i]``."""
    k = len(dims)
    if k <= 1 or list(perm) == list(range(k)):
        return matrix
    t = matrix.reshape(tuple(dims) * 2)
    t = t.transpose(list(perm) + [k + p for p in perm])
    d = matrix.shape[0]
    return t.reshape(d, d)


def ptrace(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace keeping the factors at indices ``keep`` (in ascending order)."""
    dims = list(dims)
    k = len(dims)
    keep = sorted(keep)
    if keep == list(range(k)):
        return matrix
    t = matrix.reshape(dims * 2)
    traced = [i for i in range(k) if i not in keep]
    # einsum with explicit subscripts: kept ket/bra axes stay, traced pairs share a letter
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    ket = list(letters[:k])
    bra = list(letters[k:2 * k])
    for i in traced:
        bra[i] = ket[i]
    out = "".join(ket[i] for i in keep) + "".join(bra[i] for i in keep)
    r = np.einsum("".join(ket) + "".join(bra) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64)) if keep else 1
    return r.reshape(dk, dk)


# -- entropies -----------------------------------------------------------------

def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    """h(x) = -(1-x) log2(1-x) - x log2 x, with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-(1.0 - x) * np.log2(1.0 - x) - x * np.log2(x))


def _spectrum(matrix: np.ndarray, check: bool = True) -> np.ndarray:
    lam = np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))
    if check and lam.size and lam[0] < -TOL_PSD:
        raise InvalidStateError(f"operator is not PSD (min eigenvalue {lam[0]:.3e})")
    return np.clip(lam, 0.0, None)


def _entropy_of_matrix(matrix: np.ndarray) -> float:
    lam = _spectrum(matrix)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho) -> float:
    """H(rho) = -Tr rho log2 rho for a valid density operator."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    report = validate(rho)
    if not report.ok:
        raise InvalidStateError(f"invalid density operator: {report}", report.violations)
    return _entropy_of_matrix(rho.matrix)


def _check_names(state: HybridState, names) -> list:
    names = [names] if isinstance(names, str) else list(names)
    for n in names:
        state.register(n)
    return names


def partial_trace(state: HybridState, keep) -> HybridState:
    """Marginal of ``state`` on the registers named in ``keep``.

    Classical registers are marginalised by summing branch weights, quantum
    ones by the operator partial trace. Register order is preserved.
    """
    keep = set(_check_names(state, keep))
    regs = [r for r in state.registers if r.name in keep]
    classical = state.classical_registers
    quantum = state.quantum_registers
    cpos = [i for i, r in enumerate(classical) if r.name in keep]
    qkeep = [i for i, r in enumerate(quantum) if r.name in keep]
    qdims = [r.dim for r in quantum]
    if len(cpos) == len(classical) and len(qkeep) == len(quantum):
        return state
    blocks: dict = {}
    for labels, w, st in state.branches:
        key = tuple(labels[i] for i in cpos)
        red = ptrace(st.matrix, qdims, qkeep) * w
        blocks[key] = blocks[key] + red if key in blocks else red
    branches = []
    for key, op in blocks.items():
        tr = float(np.real(np.trace(op)))
        if tr <= 0.0:
            continue
        branches.append((key, tr, op / tr))
    return HybridState(regs, branches)


def entropy_of(state: HybridState, group) -> float:
    """Entropy (bits) of the marginal on ``group``.

    For a classical-quantum marginal ``sum_b w_b |b><b| (x) rho_b`` this is
    ``H(w) + sum_b w_b H(rho_b)``.
    """
    group = _check_names(state, group)
    if not group:
        raise RegisterError("entropy_of needs a non-empty register group")
    marg = partial_trace(state, group)
    w = marg.weights()
    h = shannon_entropy(w)
    if marg.dim > 1:
        h += float(sum(wb * _entropy_of_matrix(st.matrix) for _, wb, st in marg.branches))
    return h


def conditional_entropy(state: HybridState, group, given) -> float:
    """H(group | given) = H(group, given) - H(given)."""
    group = _check_names(state, group)
    given = _check_names(state, given)
    return entropy_of(state, list(group) + list(given)) - entropy_of(state, given)


def mutual_information(state: HybridState, group_a, group_b) -> float:
    """I(A;B) = H(A) + H(B) - H(AB) in bits."""
    a = _check_names(state, group_a)
    b = _check_names(state, group_b)
    if not a or not b:
        raise RegisterError("mutual_information needs two non-empty groups")
    overlap = set(a) & set(b)
    if overlap:
        raise RegisterError(f"groups overlap on {sorted(overlap)}")
    value = entropy_of(state, a) + entropy_of(state, b) - entropy_of(state, a + b)
    return 0.0 if abs(value) <= MI_ROUNDOFF else value


def purify(rho) -> np.ndarray:
    """Purification ``sum_i sqrt(lambda_i) |e_i> (x) |i>`` on system (x) ancilla.

    Eigenvalues are taken in decreasing order and each eigenvector's largest
    component is made real-positive, so the output is deterministic.
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    report = validate(rho)
    if not report.ok:
        raise InvalidStateError(f"cannot purify invalid state: {report}", report.violations)
    lam, vecs = np.linalg.eigh(0.5 * (rho.matrix + rho.matrix.conj().T))
    order = np.argsort(-lam, kind="stable")
    lam = np.clip(lam[order], 0.0, None)
    vecs = vecs[:, order]
    d = rho.dim
    out = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        v = vecs[:, i]
        j = int(np.argmax(np.abs(v)))
        v = v * (abs(v[j]) / v[j])
        anc = np.zeros(d)
        anc[i] = 1.0
        out += np.sqrt(lam[i]) * np.kron(v, anc)
    return out


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    invariant: str
    residual: float
    tolerance: float
    where: str = ""

    def __str__(self):
        loc = f" [{self.where}]" if self.where else ""
        return f"{self.invariant}{loc}: residual {self.residual:.3e} > tol {self.tolerance:.0e}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "all invariants satisfied"
        return "; ".join(str(v) for v in self.violations)


def _operator_checks(m: np.ndarray, where: str, trace_one: bool) -> list:
    out = []
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if herm > TOL_HERM:
        out.append(Violation("hermiticity", herm, TOL_HERM, where))
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lam_min < -TOL_PSD:
        out.append(Violation("positivity", -lam_min, TOL_PSD, where))
    if trace_one:
        tr = abs(complex(np.trace(m)) - 1.0)
        if tr > TOL_TRACE:
            out.append(Violation("unit trace", tr, TOL_TRACE, where))
    return out


def validate(obj) -> ValidationReport:
    """List every violated invariant with its residual. Never raises."""
    v: list = []
    try:
        if isinstance(obj, DensityOperator):
            v += _operator_checks(obj.matrix, "", True)
        elif isinstance(obj, Povm):
            for label, op in obj.elements:
                v += [x for x in _operator_checks(op, f"element {label}", False)]
            resid = float(np.max(np.abs(sum(op for _, op in obj.elements) - np.eye(obj.dim))))
            if resid > TOL_POVM:
                v.append(Violation("POVM completeness", resid, TOL_POVM))
        elif isinstance(obj, HybridState):
            w = obj.weights()
            if np.any(w < 0):
                v.append(Violation("nonnegative weights", float(-w.min()), 0.0))
            resid = abs(float(w.sum()) - 1.0)
            if resid > TOL_WEIGHT:
                v.append(Violation("weights sum to one", resid, TOL_WEIGHT))
            for labels, _, st in obj.branches:
                v += _operator_checks(st.matrix, f"branch {labels}", True)
        else:
            v.append(Violation(f"unsupported object {type(obj).__name__}", float("nan"), 0.0))
    except Exception as exc:  # validation reports, it does not throw
        v.append(Violation(f"unevaluable ({exc})", float("nan"), 0.0))
    return ValidationReport(tuple(v))


# -- serialisation ---------------------------------------------------------------

def matrix_to_json(m) -> list:
    """Row-major nested list of ``[re, im]`` pairs (negative zeros normalised)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in m]
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.shape[-1] != 2:
        raise ValueError(f"expected trailing [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]
