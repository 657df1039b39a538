"""State-dependent channels, measurement channels, random-parameter channels.

Conventions: the channel input space is ``E (x) A`` in that order; a channel
state source lives on ``E0 (x) E (x) C``. Register names default to
``E0, E, C, A, B`` (``Y`` for classical measurement outcomes).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidStateError, RegisterError, SizeLimitError, SpecError
from .qstate import (
    DensityOperator,
    HybridState,
    Povm,
    Register,
    ValidationReport,
    Violation,
    matrix_from_json,
    matrix_to_json,
    permute_subsystems,
    purify,
    validate,
)

TOL_TP = 1e-9
TOL_NORM = 1e-10
TOL_Q = 1e-10

MAX_BLOCK_QUANTUM = 2
MAX_BLOCK_MEASUREMENT = 10
MAX_DENSE_DIM = 256


def _kraus_stack(kraus, rows: int, cols: int) -> np.ndarray:
    k = np.array(kraus, dtype=np.complex128)
    if k.ndim == 2:
        k = k[None]
    if k.ndim != 3 or k.shape[1:] != (rows, cols):
        raise DimensionError(f"Kraus operators must have shape (*, {rows}, {cols}), got {k.shape}")
    k.setflags(write=False)
    return k


def _tp_residual(kraus: np.ndarray) -> float:
    d = kraus.shape[2]
    s = np.einsum("kba,kbc->ac", kraus.conj(), kraus)
    return float(np.max(np.abs(s - np.eye(d))))


@dataclass(frozen=True, eq=False)
class StateDependentChannel:
    """CPTP map ``E (x) A -> B`` in operator-sum form."""

    dim_e: int
    dim_a: int
    dim_b: int
    kraus: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "kraus", _kraus_stack(self.kraus, self.dim_b, self.dim_e * self.dim_a))

    @classmethod
    def stateless(cls, kraus_a, dim_e: int = 1) -> "StateDependentChannel":
        """Channel acting on A only; E (if any) is traced out."""
        ka = np.array(kraus_a, dtype=np.complex128)
        if ka.ndim == 2:
            ka = ka[None]
        ops = [np.kron(np.eye(dim_e)[e:e + 1], k) for e in range(dim_e) for k in ka]
        return cls(dim_e, ka.shape[2], ka.shape[1], np.stack(ops))

    @classmethod
    def identity(cls, dim: int) -> "StateDependentChannel":
        return cls(1, dim, dim, np.eye(dim)[None])

    def trace_residual(self) -> float:
        return _tp_residual(self.kraus)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        return np.einsum("kbi,ij,kcj->bc", self.kraus, rho, self.kraus.conj())


@dataclass(frozen=True, eq=False)
class MeasurementChannel:
    """q-c channel ``rho_EA -> sum_y Tr(Lambda_y rho) |y><y|``."""

    dim_e: int
    dim_a: int
    povm: Povm

    def __post_init__(self):
        if self.povm.dim != self.dim_e * self.dim_a:
            raise DimensionError(
                f"POVM acts on dim {self.povm.dim}, channel input is {self.dim_e}x{self.dim_a}")

    @property
    def output_labels(self) -> tuple:
        return self.povm.labels

    @property
    def dim_b(self) -> int:
        return len(self.povm)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        ops = self.povm.operators
        return np.real(np.einsum("yij,ji->y", ops, np.asarray(rho)))

    def to_kraus_channel(self) -> StateDependentChannel:
        """Equivalent channel with output ``sum_y p(y)|y><y|`` on a |Y|-dim space."""
        ny = len(self.povm)
        din = self.dim_e * self.dim_a
        ops = []
        for y, (_, lam) in enumerate(self.povm.elements):
            mu, vec = np.linalg.eigh(0.5 * (lam + lam.conj().T))
            for r in range(din):
                if mu[r] <= 1e-15:
                    continue
                k = np.zeros((ny, din), dtype=np.complex128)
                k[y] = np.sqrt(mu[r]) * vec[:, r].conj()
                ops.append(k)
        return StateDependentChannel(self.dim_e, self.dim_a, ny, np.stack(ops))


@dataclass(frozen=True, eq=False)
class StateSource:
    """Pure channel-state vector on ``E0 (x) E (x) C``."""

    dim_e0: int
    dim_e: int
    dim_c: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=np.complex128).ravel()
        if v.size != self.dim_e0 * self.dim_e * self.dim_c:
            raise DimensionError(
                f"source vector has {v.size} entries, expected "
                f"{self.dim_e0}*{self.dim_e}*{self.dim_c}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @classmethod
    def trivial(cls) -> "StateSource":
        return cls(1, 1, 1, np.ones(1))

    @classmethod
    def classical_copy(cls, q) -> "StateSource":
        """``sum_s sqrt(q(s)) |s>_E0 |s>_E |s>_C``."""
        q = np.asarray(q, dtype=float)
        d = q.size
        v = np.zeros(d ** 3)
        for s in range(d):
            v[s * d * d + s * d + s] = np.sqrt(q[s])
        return cls(d, d, d, v)

    def norm_residual(self) -> float:
        return abs(float(np.linalg.norm(self.vector)) - 1.0)

    def density(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def to_state(self, names=("E0", "E", "C")) -> HybridState:
        return HybridState.quantum_state(
            self.density(), list(zip(names, (self.dim_e0, self.dim_e, self.dim_c))))


@dataclass(frozen=True, eq=False)
class RandomParameterChannel:
    """Classically selected channel: with probability ``q[s]`` apply ``branches[s]``.

    ``branches`` maps each state label to a Kraus stack of shape (K, dB, dA).
    """

    alphabet: tuple
    q: np.ndarray
    branches: dict
    dim_a: int = field(init=False)
    dim_b: int = field(init=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        q = np.array(self.q, dtype=float)
        if q.shape != (len(alphabet),):
            raise DimensionError(f"q has shape {q.shape}, alphabet has {len(alphabet)} symbols")
        if set(self.branches) != set(alphabet):
            raise RegisterError("branch labels must match the state alphabet")
        first = np.array(self.branches[alphabet[0]], dtype=np.complex128)
        if first.ndim == 2:
            first = first[None]
        db, da = first.shape[1:]
        br = {s: _kraus_stack(self.branches[s], db, da) for s in alphabet}
        q.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "branches", br)
        object.__setattr__(self, "dim_a", int(da))
        object.__setattr__(self, "dim_b", int(db))

    def apply_branch(self, s, rho) -> np.ndarray:
        k = self.branches[s]
        return np.einsum("kbi,ij,kcj->bc", k, np.asarray(rho, dtype=np.complex128), k.conj())

    def average(self, rho) -> np.ndarray:
        return sum(qs * self.apply_branch(s, rho) for s, qs in zip(self.alphabet, self.q))


# -- validation -------------------------------------------------------------------

def validate_channel(obj) -> ValidationReport:
    """Invariant report for channels and sources (never raises)."""
    v: list = []
    try:
        if isinstance(obj, StateDependentChannel):
            r = obj.trace_residual()
            if r > TOL_TP:
                v.append(Violation("trace preservation", r, TOL_TP))
        elif isinstance(obj, MeasurementChannel):
            v += list(validate(obj.povm).violations)
        elif isinstance(obj, RandomParameterChannel):
            r = abs(float(obj.q.sum()) - 1.0)
            if r > TOL_Q:
                v.append(Violation("q sums to one", r, TOL_Q))
            if np.any(obj.q < 0):
                v.append(Violation("q nonnegative", float(-obj.q.min()), 0.0))
            for s in obj.alphabet:
                r = _tp_residual(obj.branches[s])
                if r > TOL_TP:
                    v.append(Violation("trace preservation", r, TOL_TP, f"branch {s}"))
        elif isinstance(obj, StateSource):
            r = obj.norm_residual()
            if r > TOL_NORM:
                v.append(Violation("unit norm", r, TOL_NORM, "source"))
        else:
            v += list(validate(obj).violations)
    except Exception as exc:
        v.append(Violation(f"unevaluable ({exc})", float("nan"), 0.0))
    return ValidationReport(tuple(v))


# -- application to hybrid states --------------------------------------------------

def _locate(state: HybridState, name, dim: int):
    """Index of quantum register ``name`` or None when absent and dim == 1."""
    qnames = [r.name for r in state.quantum_registers]
    if name is not None and name in qnames:
        i = qnames.index(name)
        if state.quantum_registers[i].dim != dim:
            raise DimensionError(
                f"register {name} has dim {state.quantum_registers[i].dim}, channel expects {dim}")
        return i
    if name is not None and name in state.names:
        raise RegisterError(f"register {name} is classical, channel needs it quantum")
    if dim != 1:
        raise RegisterError(f"state has no quantum register {name!r} of dim {dim}")
    return None


def _split_input(state: HybridState, e, a, dim_e, dim_a):
    ie = _locate(state, e, dim_e)
    ia = _locate(state, a, dim_a)
    qdims = list(state.quantum_dims)
    front = [i for i in (ie, ia) if i is not None]
    rest = [i for i in range(len(qdims)) if i not in front]
    perm = front + rest
    d_in = dim_e * dim_a
    d_rest = int(np.prod([qdims[i] for i in rest], dtype=np.int64)) if rest else 1
    return ie, ia, qdims, perm, rest, d_in, d_rest


def _output_registers(state: HybridState, e, a, ie, ia, new_reg: Register):
    """Register list with E (or A when E is absent) replaced by ``new_reg``, A removed."""
    present = [nm for nm, i in ((e, ie), (a, ia)) if i is not None]
    regs = []
    for r in state.registers:
        if present and r.name == present[0]:
            regs.append(new_reg)
        elif r.name not in present:
            regs.append(r)
    if not present:
        regs.append(new_reg)
    if len({r.name for r in regs}) != len(regs):
        raise RegisterError(f"output register name {new_reg.name!r} collides with the state")
    return regs


def apply(channel: StateDependentChannel, state: HybridState, e="E", a="A", out="B") -> HybridState:
    """Apply ``channel`` to registers ``(e, a)`` of every branch; they become ``out``.

    A channel with ``dim_e == 1`` may be applied to a state without an ``e`` register.
    """
    if isinstance(channel, MeasurementChannel):
        return apply_measurement(channel, state, e=e, a=a, out=out)
    ie, ia, qdims, perm, rest, d_in, d_rest = _split_input(
        state, e, a, channel.dim_e, channel.dim_a)
    regs = _output_registers(state, e, a, ie, ia, Register.quantum(out, channel.dim_b))
    qout = [r.name for r in regs if not r.is_classical]
    order_now = [out] + [state.quantum_registers[i].name for i in rest]
    dims_now = [channel.dim_b] + [qdims[i] for i in rest]
    back = [order_now.index(nm) for nm in qout]
    k = channel.kraus
    branches = []
    for labels, w, st in state.branches:
        m = permute_subsystems(st.matrix, qdims, perm).reshape(d_in, d_rest, d_in, d_rest)
        o = np.einsum("kbi,irjs,kcj->brcs", k, m, k.conj(), optimize=True)
        o = o.reshape(channel.dim_b * d_rest, channel.dim_b * d_rest)
        o = permute_subsystems(o, dims_now, back)
        branches.append((labels, w, o))
    return HybridState(regs, branches)


def apply_measurement(channel: MeasurementChannel, state: HybridState, e="E", a="A",
                      out="Y") -> HybridState:
    """Measure registers ``(e, a)``; outcomes land in a new classical register ``out``.

    The conditional state of the remaining quantum registers is
    ``Tr_EA[(Lambda_y (x) 1) rho] / p(y)``, which equals the square-root
    sandwich rule for any Kraus decomposition of ``Lambda_y``.
    """
    ie, ia, qdims, perm, rest, d_in, d_rest = _split_input(
        state, e, a, channel.dim_e, channel.dim_a)
    yreg = Register.classical(out, channel.output_labels)
    regs = _output_registers(state, e, a, ie, ia, yreg)
    new_classical = [r.name for r in regs if r.is_classical]
    old_classical = [r.name for r in state.classical_registers]
    ops = channel.povm.operators
    blocks = []
    for labels, w, st in state.branches:
        m = permute_subsystems(st.matrix, qdims, perm).reshape(d_in, d_rest, d_in, d_rest)
        cond = np.einsum("yji,irjs->yrs", ops, m, optimize=True)
        for y, lab in enumerate(channel.output_labels):
            lab_map = dict(zip(old_classical, labels))
            lab_map[out] = lab
            blocks.append((tuple(lab_map[nm] for nm in new_classical), w * cond[y]))
    return HybridState.from_blocks(regs, blocks)


# -- constructions -----------------------------------------------------------------

def lift_random_parameter(rpc: RandomParameterChannel):
    """State-dependent channel and GHZ-like source reproducing ``rpc``.

    The channel applies branch ``s`` controlled on ``|s>_E`` and discards E.
    """
    d = len(rpc.alphabet)
    ops = []
    for i, s in enumerate(rpc.alphabet):
        bra = np.zeros((1, d))
        bra[0, i] = 1.0
        for k in rpc.branches[s]:
            ops.append(np.kron(bra, k))
    chan = StateDependentChannel(d, rpc.dim_a, rpc.dim_b, np.stack(ops))
    return chan, StateSource.classical_copy(rpc.q)


def measure_output(channel: StateDependentChannel, povm_b: Povm) -> MeasurementChannel:
    """Measurement channel obtained by measuring the output of ``channel`` with ``povm_b``."""
    if povm_b.dim != channel.dim_b:
        raise DimensionError(f"output POVM dim {povm_b.dim} != channel output dim {channel.dim_b}")
    k = channel.kraus
    elems = [(lab, np.einsum("kbi,bc,kcj->ij", k.conj(), m, k)) for lab, m in povm_b.elements]
    return MeasurementChannel(channel.dim_e, channel.dim_a, Povm(tuple(elems)))


def _group_columns(op: np.ndarray, n: int, de: int, da: int) -> np.ndarray:
    """Reorder the input axis of ``op`` from (E1 A1 E2 A2 ...) to (E1..En A1..An)."""
    rows = op.shape[0]
    t = op.reshape([rows] + [de, da] * n)
    order = [0] + [1 + 2 * i for i in range(n)] + [2 + 2 * i for i in range(n)]
    return t.transpose(order).reshape(rows, (de * da) ** n)


def _check_block(n: int, cap: int, what: str):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"block length must be a positive integer, got {n!r}")
    if n > cap:
        raise SizeLimitError(f"block length n={n} exceeds the limit {cap} for {what}")


def product_channel(channel, n: int):
    """n-fold tensor power of a channel, with inputs regrouped as ``E^n (x) A^n``."""
    if isinstance(channel, MeasurementChannel):
        _check_block(n, MAX_BLOCK_MEASUREMENT, "measurement channels")
    else:
        _check_block(n, MAX_BLOCK_QUANTUM, "quantum-output channels")
    if n == 1:
        return channel
    if isinstance(channel, StateDependentChannel):
        de, da = channel.dim_e, channel.dim_a
        if (de * da) ** n > MAX_DENSE_DIM:
            raise SizeLimitError(f"input dimension {(de * da) ** n} exceeds MAX_DENSE_DIM={MAX_DENSE_DIM}")
        ops = []
        for combo in itertools.product(channel.kraus, repeat=n):
            full = combo[0]
            for c in combo[1:]:
                full = np.kron(full, c)
            ops.append(_group_columns(full, n, de, da))
        return StateDependentChannel(de ** n, da ** n, channel.dim_b ** n, np.stack(ops))
    if isinstance(channel, MeasurementChannel):
        de, da = channel.dim_e, channel.dim_a
        d = (de * da) ** n
        if d > MAX_DENSE_DIM:
            raise SizeLimitError(f"POVM dimension {d} exceeds MAX_DENSE_DIM={MAX_DENSE_DIM}")
        elems = []
        for combo in itertools.product(channel.povm.elements, repeat=n):
            full = combo[0][1]
            for _, c in combo[1:]:
                full = np.kron(full, c)
            perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
            full = permute_subsystems(full, [de, da] * n, perm)
            elems.append((tuple(lab for lab, _ in combo), full))
        return MeasurementChannel(de ** n, da ** n, Povm(tuple(elems)))
    if isinstance(channel, RandomParameterChannel):
        alphabet = list(itertools.product(channel.alphabet, repeat=n))
        q = [float(np.prod([channel.q[channel.alphabet.index(s)] for s in tup])) for tup in alphabet]
        branches = {}
        for tup in alphabet:
            ops = []
            for combo in itertools.product(*[channel.branches[s] for s in tup]):
                full = combo[0]
                for c in combo[1:]:
                    full = np.kron(full, c)
                ops.append(full)
            branches[tup] = np.stack(ops)
        return RandomParameterChannel(tuple(alphabet), q, branches)
    raise TypeError(f"cannot take product of {type(channel).__name__}")


def product_source(source: StateSource, n: int) -> StateSource:
    """n copies of the source, regrouped as ``E0^n (x) E^n (x) C^n``."""
    _check_block(n, MAX_BLOCK_MEASUREMENT, "sources")
    if n == 1:
        return source
    v = source.vector
    for _ in range(n - 1):
        v = np.kron(v, source.vector)
    dims = [source.dim_e0, source.dim_e, source.dim_c] * n
    t = v.reshape(dims)
    order = [3 * i for i in range(n)] + [3 * i + 1 for i in range(n)] + [3 * i + 2 for i in range(n)]
    v = t.transpose(order).ravel()
    return StateSource(source.dim_e0 ** n, source.dim_e ** n, source.dim_c ** n, v)


# -- JSON channel specs --------------------------------------------------------------

@dataclass(frozen=True)
class ChannelSpec:
    """Parsed channel document: a channel and (optionally) an explicit source."""

    channel: object
    source: StateSource | None = None

    def lifted(self):
        """``(channel, source)`` usable by the region module."""
        if isinstance(self.channel, RandomParameterChannel):
            return lift_random_parameter(self.channel)
        src = self.source if self.source is not None else StateSource(
            1, self.channel.dim_e, 1, np.eye(self.channel.dim_e)[0])
        return self.channel, src


def _req(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SpecError(f"missing field {where}{key!r}")
    return doc[key]


def _matrix(data, where: str) -> np.ndarray:
    try:
        return matrix_from_json(data)
    except (ValueError, TypeError, IndexError) as exc:
        raise SpecError(f"{where}: malformed matrix ({exc})") from None


def _fold_purifier(channel, gdim: int):
    """Channel on (G E) (x) A that discards the purifying register G."""
    if isinstance(channel, MeasurementChannel):
        elems = tuple((lab, np.kron(np.eye(gdim), op)) for lab, op in channel.povm.elements)
        return MeasurementChannel(gdim * channel.dim_e, channel.dim_a, Povm(elems))
    ops = []
    for g in range(gdim):
        bra = np.eye(gdim)[g:g + 1]
        for k in channel.kraus:
            ops.append(k @ np.kron(bra, np.eye(channel.dim_e * channel.dim_a)))
    return StateDependentChannel(gdim * channel.dim_e, channel.dim_a, channel.dim_b, np.stack(ops))


def _parse_source(doc: dict, channel):
    dims = _req(doc, "dims", "source.")
    d0, de, dc = (int(_req(dims, k, "source.dims.")) for k in ("E0", "E", "C"))
    if "vector" in doc:
        return channel, StateSource(d0, de, dc, _matrix(doc["vector"], "source.vector"))
    rho = _matrix(_req(doc, "density", "source."), "source.density")
    rep = validate(DensityOperator(rho))
    if not rep.ok:
        raise SpecError(f"source density invalid: {rep}")
    vec = purify(rho)
    d = rho.shape[0]
    lam = np.linalg.eigvalsh(rho)
    rank = max(1, int(np.sum(lam > 1e-12)))
    # purify orders the ancilla by decreasing eigenvalue; drop null directions
    t = vec.reshape(d0, de, dc, d)[..., :rank]
    t = t.transpose(0, 3, 1, 2)  # E0, G, E, C
    folded = _fold_purifier(channel, rank)
    return folded, StateSource(d0, rank * de, dc, t.ravel())


def parse_channel_spec(document) -> ChannelSpec:
    """Parse a channel-spec JSON document (text or already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"not valid JSON: {exc}") from None
    else:
        doc = document
    kind = _req(doc, "type", "")
    dims = _req(doc, "dims", "")
    try:
        if kind == "kraus":
            de, da, db = (int(_req(dims, k, "dims.")) for k in ("E", "A", "B"))
            ops = [_matrix(m, f"kraus[{i}]") for i, m in enumerate(_req(doc, "kraus", ""))]
            chan = StateDependentChannel(de, da, db, np.stack(ops))
        elif kind == "measurement":
            de, da = (int(_req(dims, k, "dims.")) for k in ("E", "A"))
            pdoc = _req(doc, "povm", "")
            labels = _req(pdoc, "labels", "povm.")
            elems = [_matrix(m, f"povm.elements[{i}]") for i, m in enumerate(_req(pdoc, "elements", "povm."))]
            if len(labels) != len(elems):
                raise SpecError("povm.labels and povm.elements differ in length")
            chan = MeasurementChannel(de, da, Povm.from_operators(elems, [_label(x) for x in labels]))
        elif kind == "random_parameter":
            labels = [_label(x) for x in _req(doc, "labels", "")]
            q = _req(doc, "q", "")
            br = _req(doc, "branches", "")
            if len(br) != len(labels):
                raise SpecError("branches and labels differ in length")
            branches = {lab: np.stack([_matrix(m, f"branches[{i}]") for m in ops])
                        for i, (lab, ops) in enumerate(zip(labels, br))}
            chan = RandomParameterChannel(tuple(labels), q, branches)
            if (chan.dim_a, chan.dim_b) != (int(_req(dims, "A", "dims.")), int(_req(dims, "B", "dims."))):
                raise SpecError("dims do not match branch operator shapes")
        else:
            raise SpecError(f"unknown channel type {kind!r}")
    except (DimensionError, InvalidStateError, RegisterError) as exc:
        raise SpecError(f"schema violation: {exc}") from None

    rep = validate_channel(chan)
    if not rep.ok:
        raise SpecError(f"channel invariant violated: {rep}")
    source = None
    if doc.get("source") is not None:
        if kind == "random_parameter":
            raise SpecError("random_parameter channels carry an implicit source")
        chan, source = _parse_source(doc["source"], chan)
        rep = validate_channel(source)
        if not rep.ok:
            raise SpecError(f"source invariant violated: {rep}")
        if source.dim_e != chan.dim_e:
            raise SpecError(f"source E dim {source.dim_e} != channel E dim {chan.dim_e}")
    return ChannelSpec(chan, source)


def _label(x):
    return tuple(_label(v) for v in x) if isinstance(x, list) else x


def _label_out(x):
    return [_label_out(v) for v in x] if isinstance(x, tuple) else x


def channel_spec_to_dict(spec: ChannelSpec) -> dict:
    chan = spec.channel
    if isinstance(chan, StateDependentChannel):
        doc = {"type": "kraus", "dims": {"E": chan.dim_e, "A": chan.dim_a, "B": chan.dim_b},
               "kraus": [matrix_to_json(k) for k in chan.kraus]}
    elif isinstance(chan, MeasurementChannel):
        doc = {"type": "measurement", "dims": {"E": chan.dim_e, "A": chan.dim_a},
               "povm": {"labels": [_label_out(x) for x in chan.povm.labels],
                        "elements": [matrix_to_json(op) for _, op in chan.povm.elements]}}
    elif isinstance(chan, RandomParameterChannel):
        doc = {"type": "random_parameter", "dims": {"A": chan.dim_a, "B": chan.dim_b},
               "labels": [_label_out(x) for x in chan.alphabet],
               "q": [float(x) for x in chan.q],
               "branches": [[matrix_to_json(k) for k in chan.branches[s]] for s in chan.alphabet]}
    else:
        raise TypeError(f"cannot serialise {type(chan).__name__}")
    if spec.source is not None:
        s = spec.source
        doc["source"] = {"dims": {"E0": s.dim_e0, "E": s.dim_e, "C": s.dim_c},
                         "vector": matrix_to_json(s.vector)}
    return doc


def emit_channel_spec(spec: ChannelSpec) -> str:
    """Canonical JSON text (sorted keys, 1-space indent, trailing newline)."""
    return json.dumps(channel_spec_to_dict(spec), sort_keys=True, indent=1) + "\n"
