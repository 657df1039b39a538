"""Capacity-leakage optimisation over encoder strategies.

The objective works directly on the block structure of the induced states:
with joint weights ``w(s,x) = p(s) p(x|s)`` and conditional output states
``omega_sx = N(sigma_s (x) phi_x)`` on C (x) B,

    R_raw = H(B) - H(XB) - H(S) + H(SX)
    L     = H(CS) + H(XB) - H(CSXB)

Both are differentiable in ``w`` and in the input states, which gives cheap
analytic gradients for the alternating search:

(a) with input states fixed, exponentiated-gradient steps on p(x|s);
(b) with the pmf fixed, projected gradient steps of the pure input states on
    the unit sphere.

The leakage budget enters as an exact penalty ``lam * max(0, L - budget)``
with ``lam`` doubled until the iterate is feasible; the best feasible iterate
is then pushed toward the constraint boundary by bisection.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .channels import MeasurementChannel, StateSource
from .errors import InfeasibleBudgetError
from .qstate import Povm
from .region import (
    Strategy,
    cardinality_cap,
    evaluate_strategy,
    post_measurement_states,
    trivial_leakage_threshold,
)

LOG2E = 1.0 / math.log(2.0)
_EIG_FLOOR = 1e-14
_PMF_FLOOR = 1e-15


def _entropy_and_grad(mats: np.ndarray, grad: bool):
    """F(A) = -Tr A log2 A for a stack of PSD matrices, plus dF/dA as matrices."""
    lam, vec = np.linalg.eigh(mats)
    lam = np.clip(lam, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0), axis=-1)
    if not grad:
        return ent, None
    d = -np.log2(np.maximum(lam, _EIG_FLOOR)) - LOG2E
    g = np.einsum("...ij,...j,...kj->...ik", vec, d, vec.conj())
    return ent, g


def _scalar_entropy(w: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(w > 0, -w * np.log2(np.where(w > 0, w, 1.0)), 0.0)


@dataclass
class Evaluation:
    """R_raw and L with their gradients w.r.t. the weights w(s,x) and the states phi_x.

    State gradients are matrices G with dF = Re Tr(G dphi).
    """

    R_raw: float
    L: float
    dR_w: np.ndarray | None = None
    dL_w: np.ndarray | None = None
    dR_phi: np.ndarray | None = None
    dL_phi: np.ndarray | None = None


class RateLeakageObjective:
    """Fast rate/leakage evaluator for a fixed source, channel and CSI POVM."""

    def __init__(self, source: StateSource, channel, csi_povm: Povm):
        kchan = channel.to_kraus_channel() if isinstance(channel, MeasurementChannel) else channel
        self.csi_povm = csi_povm
        posts = post_measurement_states(source, csi_povm)
        self.p_s = np.array([p for _, p, _ in posts])
        de, dc, da, db = source.dim_e, source.dim_c, kchan.dim_a, kchan.dim_b
        self.dim_a, self.dim_b, self.dim_cb = da, db, dc * db
        k = kchan.kraus.reshape(-1, db, de, da)
        ts, tbs, hc = [], [], []
        for _, p, sig in posts:
            s4 = sig.reshape(de, dc, de, dc)
            t = np.einsum("kbea,ecfd,kgfh->cbdgah", k, s4, k.conj(), optimize=True)
            tbs.append(np.einsum("cbcgah->bgah", t))
            ts.append(t.reshape(dc * db, dc * db, da, da))
            sc = np.einsum("ecef->cf", s4)
            hc.append(float(_entropy_and_grad(sc[None], False)[0][0]) if p > 0 else 0.0)
        ns = len(posts)
        q, q2, a2 = dc * db, (dc * db) ** 2, da * da
        # rows: output matrix entries, columns: input matrix entries (a, a')
        self._T = np.stack(ts).reshape(ns, q2, a2)
        self._TB = np.stack(tbs).reshape(ns, db * db, a2)
        # adjoints act on the transposed output gradient
        self._T_adj = np.stack(ts).transpose(0, 2, 1, 3, 4).reshape(ns, q2, a2)
        self._TB_adj = np.stack(tbs).transpose(0, 2, 1, 3, 4).reshape(ns, db * db, a2)
        self._q = q
        self.H_S = float(_scalar_entropy(self.p_s).sum())
        self.H_CS = self.H_S + float(np.dot(self.p_s, hc))

    @property
    def n_states(self) -> int:
        return self.p_s.size

    def evaluate(self, P, V, grad=True) -> Evaluation:
        """``P`` is p(x|s) with shape (|S|, |X|); ``V`` holds unit input vectors (|X|, dim_A)."""
        ns, nx = P.shape
        da, db, q = self.dim_a, self.dim_b, self._q
        phi = (V[:, :, None] * V.conj()[:, None, :]).reshape(nx, da * da)
        w = self.p_s[:, None] * P
        omega = (self._T @ phi.T).transpose(0, 2, 1).reshape(ns, nx, q, q)
        beta = (self._TB @ phi.T).transpose(0, 2, 1).reshape(ns, nx, db, db)
        m = np.einsum("sx,sxbg->xbg", w, beta)
        rho_b = m.sum(axis=0)
        h_om, g_om = _entropy_and_grad(omega, grad)
        h_m, g_m = _entropy_and_grad(m, grad)
        h_b, g_b = _entropy_and_grad(rho_b[None], grad)
        fw = _scalar_entropy(w)
        h_sx = float(fw.sum())
        h_csxb = h_sx + float(np.sum(w * h_om))
        h_xb = float(h_m.sum())
        r_raw = float(h_b[0]) - h_xb - self.H_S + h_sx
        leak = self.H_CS + h_xb - h_csxb
        if not grad:
            return Evaluation(r_raw, leak)

        gbv = g_b[0].reshape(db * db)
        gmv = g_m.reshape(nx, db * db)
        d_hb = np.real(beta.reshape(ns, nx, db * db) @ g_b[0].T.reshape(db * db))
        d_hxb = np.real(np.einsum("sxk,xk->sx", beta.reshape(ns, nx, db * db),
                                  g_m.transpose(0, 2, 1).reshape(nx, db * db)))
        d_hsx = -np.log2(np.maximum(w, 1e-300)) - LOG2E
        dr_w = d_hb - d_hxb + d_hsx
        dl_w = d_hxb - d_hsx - h_om

        # adjoint maps: G_in[a', a] = sum_out G_out[j, i] T[i, j, a, a']
        adj_b = (gbv @ self._TB_adj)                                  # (S, a2)
        adj_m = np.einsum("xk,skn->sxn", gmv, self._TB_adj)
        adj_om = np.einsum("sxk,skn->sxn", g_om.reshape(ns, nx, q * q), self._T_adj)
        wm = np.einsum("sx,sxn->xn", w, adj_m)
        dr_phi = (w.T @ adj_b) - wm
        dl_phi = wm - np.einsum("sx,sxn->xn", w, adj_om)
        # stored as (x, a, a') with dF = Re sum G[a', a] dphi[a, a']  ->  transpose
        dr_phi = dr_phi.reshape(nx, da, da).transpose(0, 2, 1)
        dl_phi = dl_phi.reshape(nx, da, da).transpose(0, 2, 1)
        return Evaluation(r_raw, leak, dr_w, dl_w, dr_phi, dl_phi)


# -- search ----------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for :func:`optimize_rate`.

    ``iterations`` counts alternation sweeps; ``polish_iterations`` bounds each
    quasi-Newton refinement. ``alphabet_size`` defaults to the cardinality cap
    (dim_A^2 + 1) dim_E0.
    """

    restarts: int = 8
    iterations: int = 30
    polish_iterations: int = 400
    seed: int = 0
    alphabet_size: int | None = None
    threads: int = 1
    penalty0: float = 10.0
    outer_rounds: int = 12
    search_csi_basis: bool = False
    include_no_measurement: bool = True

    def check(self):
        for name in ("restarts", "iterations", "polish_iterations", "threads", "outer_rounds"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValueError(f"option {name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError(f"option seed must be a nonnegative integer, got {self.seed!r}")
        if self.alphabet_size is not None and (
                not isinstance(self.alphabet_size, (int, np.integer)) or self.alphabet_size < 1):
            raise ValueError(f"option alphabet_size must be a positive integer, got {self.alphabet_size!r}")
        if not self.penalty0 > 0:
            raise ValueError("option penalty0 must be positive")


@dataclass
class _Candidate:
    objective: RateLeakageObjective
    P: np.ndarray
    V: np.ndarray
    R_raw: float
    L: float

    @property
    def R(self) -> float:
        return max(0.0, self.R_raw)


class _Penalty:
    """Augmented-Lagrangian term for the constraint L <= budget.

    ``lam = mu = None`` means no constraint; ``rate_weight = 0`` turns the
    objective into plain leakage minimisation.
    """

    def __init__(self, budget=math.inf, mu=0.0, rho=0.0, rate_weight=1.0):
        self.budget, self.mu, self.rho, self.rate_weight = budget, mu, rho, rate_weight

    def value_slope(self, leak):
        if self.rate_weight == 0.0:
            return leak, 1.0
        if not math.isfinite(self.budget) or self.rho == 0.0:
            return 0.0, 0.0
        t = max(0.0, self.mu + self.rho * (leak - self.budget))
        return (t * t - self.mu * self.mu) / (2 * self.rho), t

    def combine(self, ev: Evaluation):
        pen, slope = self.value_slope(ev.L)
        J = self.rate_weight * ev.R_raw - pen
        if ev.dR_w is None:
            return J, None, None
        gw = self.rate_weight * ev.dR_w - slope * ev.dL_w
        gphi = self.rate_weight * ev.dR_phi - slope * ev.dL_phi
        return J, gw, gphi


def _normalise_rows(V):
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _haar_vectors(rng, k, d):
    v = rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d))
    return _normalise_rows(v)


def _haar_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _softmax_rows(theta):
    z = np.exp(theta - theta.max(axis=1, keepdims=True))
    return z / z.sum(axis=1, keepdims=True)


class _Tracker:
    """Best feasible iterate seen so far (largest R_raw, then smallest L)."""

    def __init__(self, objective, budget):
        self.objective = objective
        self.budget = budget
        self.best: _Candidate | None = None

    def offer(self, P, V, ev: Evaluation):
        if not ev.L <= self.budget + _FEAS_INNER:
            return
        b = self.best
        if b is None or ev.R_raw > b.R_raw or (ev.R_raw == b.R_raw and ev.L < b.L):
            self.best = _Candidate(self.objective, P.copy(), V.copy(), ev.R_raw, ev.L)


_FEAS_INNER = 0.0
FEASIBILITY_SLACK = 1e-6


def _pmf_step(obj, pen, P, V, state, eta):
    J, gw, _ = state
    g = gw * obj.p_s[:, None]
    for _ in range(25):
        logits = np.log(P) + eta * (g - g.max(axis=1, keepdims=True))
        Pn = np.maximum(_softmax_rows(logits), _PMF_FLOOR)
        Pn /= Pn.sum(axis=1, keepdims=True)
        evn = obj.evaluate(Pn, V)
        new = pen.combine(evn)
        if new[0] > J:
            return Pn, evn, new, min(eta * 1.5, 1e3)
        eta *= 0.5
    return P, None, state, max(eta, 1e-8)


def _state_step(obj, pen, P, V, state, eta):
    J, _, gphi = state
    gv = np.einsum("xab,xb->xa", gphi, V)
    radial = np.real(np.einsum("xa,xa->x", V.conj(), gv))
    tangent = gv - radial[:, None] * V
    scale = float(np.max(np.abs(tangent)))
    if scale == 0.0:
        return V, None, state, eta
    for _ in range(25):
        Vn = _normalise_rows(V + (eta / max(scale, 1.0)) * tangent)
        evn = obj.evaluate(P, Vn)
        new = pen.combine(evn)
        if new[0] > J:
            return Vn, evn, new, min(eta * 1.5, 10.0)
        eta *= 0.5
    return V, None, state, max(eta, 1e-10)


def _alternate(obj, pen, P, V, sweeps, tracker, update_pmf=True):
    """Phase (a)/(b) alternation: EG on p(x|s), sphere steps on the input states."""
    ev = obj.evaluate(P, V)
    state = pen.combine(ev)
    if tracker is not None:
        tracker.offer(P, V, ev)
    eta_p, eta_v = 1.0, 0.5
    for _ in range(sweeps):
        j0 = state[0]
        if update_pmf:
            P, evn, state, eta_p = _pmf_step(obj, pen, P, V, state, eta_p)
            if evn is not None and tracker is not None:
                tracker.offer(P, V, evn)
        V, evn, state, eta_v = _state_step(obj, pen, P, V, state, eta_v)
        if evn is not None and tracker is not None:
            tracker.offer(P, V, evn)
        if state[0] - j0 <= 1e-13 * (1.0 + abs(state[0])):
            break
    return P, V


def _quasi_newton(obj, pen, P, V, maxiter, tracker, update_pmf=True):
    """Joint L-BFGS refinement over softmax logits and unnormalised input vectors."""
    ns, nx = P.shape
    da = V.shape[1]
    fixed_p = P.copy()
    n_theta = ns * nx if update_pmf else 0

    def unpack(z):
        Pz = _softmax_rows(z[:n_theta].reshape(ns, nx)) if update_pmf else fixed_p
        u = z[n_theta:n_theta + nx * da] + 1j * z[n_theta + nx * da:]
        return Pz, u.reshape(nx, da)

    def fun(z):
        Pz, U = unpack(z)
        norms = np.linalg.norm(U, axis=1)
        Vz = U / norms[:, None]
        ev = obj.evaluate(Pz, Vz)
        if tracker is not None:
            tracker.offer(Pz, Vz, ev)
        J, gw, gphi = pen.combine(ev)
        parts = []
        if update_pmf:
            gp = gw * obj.p_s[:, None]
            parts.append((Pz * (gp - np.sum(Pz * gp, axis=1, keepdims=True))).ravel())
        gv = 2.0 * np.einsum("xab,xb->xa", gphi, Vz)
        gu = (gv - Vz * np.real(np.sum(Vz.conj() * gv, axis=1))[:, None]) / norms[:, None]
        parts += [gu.real.ravel(), gu.imag.ravel()]
        return -J, -np.concatenate(parts)

    theta = np.log(np.maximum(P, 1e-300)).ravel() if update_pmf else np.zeros(0)
    z0 = np.concatenate([theta, V.real.ravel(), V.imag.ravel()])
    res = minimize(fun, z0, jac=True, method="L-BFGS-B",
                   options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-11, "maxcor": 30})
    Pz, U = unpack(res.x)
    return Pz, _normalise_rows(U)


def _interpolate(a: _Candidate, P, V, t):
    Pt = (1 - t) * a.P + t * P
    ov = np.einsum("xa,xa->x", a.V.conj(), V)
    phase = np.where(np.abs(ov) > 0, ov / np.maximum(np.abs(ov), 1e-300), 1.0)
    Vt = (1 - t) * a.V * phase[:, None] + t * V
    norms = np.linalg.norm(Vt, axis=1)
    Vt = np.where(norms[:, None] > 1e-12, Vt, V)
    return Pt, _normalise_rows(Vt)


def _bisection_polish(obj, feasible: _Candidate, P, V, budget, steps=50):
    """Largest feasible point on the segment from ``feasible`` toward (P, V)."""
    best = feasible
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        Pt, Vt = _interpolate(feasible, P, V, mid)
        ev = obj.evaluate(Pt, Vt, grad=False)
        if ev.L <= budget + _FEAS_INNER:
            lo = mid
            if ev.R_raw > best.R_raw:
                best = _Candidate(obj, Pt, Vt, ev.R_raw, ev.L)
        else:
            hi = mid
    return best


def _min_leak_anchor(obj, alphabet_size, rng, opts):
    """Constant-input strategy (only x = 0 used) minimising the leakage I(CS;B)."""
    P = np.zeros((obj.n_states, alphabet_size))
    P[:, 0] = 1.0
    d = obj.dim_a
    starts = [np.eye(d, dtype=np.complex128)[i] for i in range(d)] + list(_haar_vectors(rng, 3, d))
    pen = _Penalty(rate_weight=0.0)
    best = None
    for v0 in starts:
        V1 = v0[None, :]
        P1 = np.ones((obj.n_states, 1))
        _, V1 = _quasi_newton(obj, pen, P1, V1, opts.polish_iterations, None, update_pmf=False)
        V = np.tile(V1[0], (alphabet_size, 1))
        ev = obj.evaluate(P, V, grad=False)
        if best is None or ev.L < best.L:
            best = _Candidate(obj, P.copy(), V, ev.R_raw, ev.L)
    return best


def _run_restart(obj, P, V, budget, opts: OptimizerOptions, anchor):
    tracker = _Tracker(obj, budget)
    if not math.isfinite(budget):
        pen = _Penalty()
        P, V = _alternate(obj, pen, P, V, opts.iterations, tracker)
        P, V = _quasi_newton(obj, pen, P, V, opts.polish_iterations, tracker)
        return tracker.best

    pen = _Penalty(budget, mu=0.0, rho=opts.penalty0)
    P, V = _alternate(obj, pen, P, V, opts.iterations, tracker)
    last_violation = math.inf
    for _ in range(opts.outer_rounds):
        P, V = _quasi_newton(obj, pen, P, V, opts.polish_iterations, tracker)
        leak = obj.evaluate(P, V, grad=False).L
        violation = max(0.0, leak - budget)
        pen.mu = max(0.0, pen.mu + pen.rho * (leak - budget))
        if violation <= 1e-8:
            break
        if violation > 0.25 * last_violation:
            pen.rho *= 4.0
        last_violation = violation

    ev = obj.evaluate(P, V, grad=False)
    if ev.L > budget + _FEAS_INNER:
        start = tracker.best
        if start is None and anchor is not None and anchor.objective is obj:
            aV = V.copy()
            aV[0] = anchor.V[0]
            start = _Candidate(obj, anchor.P.copy(), aV, anchor.R_raw, anchor.L)
        if start is not None:
            polished = _bisection_polish(obj, start, P, V, budget)
            tracker.offer(polished.P, polished.V, obj.evaluate(polished.P, polished.V, grad=False))
    return tracker.best


def _candidate_strategy(c: _Candidate) -> Strategy:
    states = tuple(np.outer(v, v.conj()) for v in c.V)
    return Strategy(c.objective.csi_povm, c.P, states, allow_large_alphabet=True)


def _init_from_strategy(strategy: Strategy, alphabet_size, rng):
    P = np.asarray(strategy.cond_pmf, dtype=float)
    vecs = []
    for st in strategy.input_states:
        lam, vec = np.linalg.eigh(st.matrix)
        vecs.append(vec[:, -1])
    V = np.array(vecs)
    k = P.shape[1]
    if k < alphabet_size:
        P = np.hstack([P, np.zeros((P.shape[0], alphabet_size - k))])
        V = np.vstack([V, _haar_vectors(rng, alphabet_size - k, V.shape[1])])
    P = np.maximum(P, _PMF_FLOOR)
    return P / P.sum(axis=1, keepdims=True), V


def optimize_rate(source: StateSource, channel, leakage_budget: float,
                  options: OptimizerOptions | None = None, warm_start: Strategy | None = None):
    """Best rate found with leakage at most ``leakage_budget`` (bits per use).

    Returns ``(RateLeakagePoint, Strategy)``. The point is recomputed from the
    returned strategy with :func:`evaluate_strategy`, so it is an achievable
    inner-bound value. Deterministic for fixed options regardless of
    ``options.threads``.
    """
    opts = options or OptimizerOptions()
    opts.check()
    if not leakage_budget >= 0:
        raise ValueError(f"leakage budget must be >= 0, got {leakage_budget}")
    threshold = trivial_leakage_threshold(channel)
    unconstrained = leakage_budget >= threshold
    budget = math.inf if unconstrained else float(leakage_budget)
    dim_e0 = source.dim_e0
    dim_a = channel.dim_a
    k = opts.alphabet_size or cardinality_cap(dim_a, dim_e0)

    objectives = {"canonical": RateLeakageObjective(source, channel, Povm.computational(dim_e0))}
    if opts.include_no_measurement and dim_e0 > 1:
        objectives["trivial"] = RateLeakageObjective(source, channel, Povm.trivial(dim_e0))
    kinds = list(objectives)

    anchors = {}
    if not unconstrained:
        anchor_rng = np.random.default_rng([opts.seed, 0xA17C])
        anchors = {name: _min_leak_anchor(obj, k, anchor_rng, opts)
                   for name, obj in objectives.items()}

    def restart(r: int):
        rng = np.random.default_rng(opts.seed ^ r)
        if opts.search_csi_basis and dim_e0 > 1 and r >= len(kinds):
            povm = Povm.from_operators(
                [np.outer(u, u.conj()) for u in _haar_unitary(rng, dim_e0).T])
            obj = RateLeakageObjective(source, channel, povm)
        else:
            obj = objectives[kinds[r % len(kinds)]]
        P = rng.dirichlet(np.ones(k), size=obj.n_states)
        P = np.maximum(P, _PMF_FLOOR)
        P /= P.sum(axis=1, keepdims=True)
        V = _haar_vectors(rng, k, dim_a)
        anchor = anchors.get(kinds[r % len(kinds)])
        return _run_restart(obj, P, V, budget, opts, anchor)

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            found = list(pool.map(restart, range(opts.restarts)))
    else:
        found = [restart(r) for r in range(opts.restarts)]

    candidates = [c for c in found if c is not None]
    for a in anchors.values():
        if a.L <= budget + FEASIBILITY_SLACK:
            candidates.append(a)
    if warm_start is not None:
        wrng = np.random.default_rng([opts.seed, 0x5741])
        if warm_start.csi_povm.dim == dim_e0:
            wobj = RateLeakageObjective(source, channel, warm_start.csi_povm)
            kw = max(k, warm_start.alphabet_size)
            P0 = np.asarray(warm_start.cond_pmf, dtype=float)
            V0 = np.array([np.linalg.eigh(st.matrix)[1][:, -1] for st in warm_start.input_states])
            ev0 = wobj.evaluate(P0, V0, grad=False)
            if ev0.L <= budget + _FEAS_INNER:
                candidates.append(_Candidate(wobj, P0, V0, ev0.R_raw, ev0.L))
            P, V = _init_from_strategy(warm_start, kw, wrng)
            ev = wobj.evaluate(P, V, grad=False)
            anchor = _Candidate(wobj, P, V, ev.R_raw, ev.L) if ev.L <= budget else None
            c = _run_restart(wobj, P, V, budget, opts, anchor)
            if c is not None:
                candidates.append(c)

    if not candidates:
        best_leak = min(a.L for a in anchors.values())
        raise InfeasibleBudgetError(
            f"no strategy meets leakage budget {leakage_budget:.6g} bits "
            f"(smallest leakage found {best_leak:.6g} bits)")

    scored = []
    for c in candidates:
        st = _candidate_strategy(c)
        scored.append((-c.R, c.L, st.fingerprint(), st))
    scored.sort(key=lambda t: t[:3])
    strategy = scored[0][3]
    point = evaluate_strategy(source, strategy, channel,
                              provenance=f"optimize_rate seed={opts.seed} budget={leakage_budget:.10g}")
    return point, strategy


def region_boundary_with_strategies(source: StateSource, channel, budget_grid,
                                    options: OptimizerOptions | None = None):
    """``[(point, strategy)]`` per budget, warm-starting each from the previous optimum.

    The unconstrained optimum is computed first; every budget at or above its
    leakage reuses it.
    """
    grid = [float(b) for b in budget_grid]
    if any(b2 < b1 for b1, b2 in zip(grid, grid[1:])):
        raise ValueError("budget grid must be sorted ascending")
    if grid and grid[0] < 0:
        raise ValueError("leakage budgets must be nonnegative")
    out = []
    if not grid:
        return out
    top = trivial_leakage_threshold(channel)
    free_point, free_strategy = optimize_rate(source, channel, top, options)
    cache: dict = {}
    prev = None
    for b in grid:
        if b in cache:
            out.append(cache[b])
            continue
        if b >= free_point.L:
            point, strategy = free_point, free_strategy
        else:
            point, strategy = optimize_rate(source, channel, b, options, warm_start=prev)
        if out and point.R < out[-1][0].R:
            # keep the previous optimum; it is feasible for the larger budget too
            strategy = out[-1][1]
            point = evaluate_strategy(source, strategy, channel, provenance=point.provenance)
        point = replace(point, diagnostics={**point.diagnostics, "budget": b})
        cache[b] = (point, strategy)
        out.append((point, strategy))
        prev = strategy
    return out


def region_boundary(source: StateSource, channel, budget_grid,
                    options: OptimizerOptions | None = None) -> list:
    """Capacity-leakage points, one per budget; rates are nondecreasing along the grid."""
    return [p for p, _ in region_boundary_with_strategies(source, channel, budget_grid, options)]
