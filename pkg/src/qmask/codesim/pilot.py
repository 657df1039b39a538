"""Pilot-run thresholds used by the simulator tests.

The constants below were produced by ``python -m qmask.codesim.pilot`` (run
it again to regenerate; it prints this block). Pilot runs use seeds disjoint
from the test seeds (PILOT_SEED_BASE and up).

* covering: exact failure probability E_s[(1 - P_typ(s^n))^bin] by
  enumerating all x^n for each state type; threshold = exact + 3 sd at 500 trials.
* error: per-codebook error rates at 500 trials over PILOT_CODEBOOKS codebooks;
  threshold = max(mean + 3 sd, largest rate). The high-rate constant is the
  smallest per-codebook rate.
* monotonicity: ensemble error rate (a fresh codebook for every trial) at
  n = 4, 6, 8 over PILOT_TRIALS trials each. nR is an integer for every n so
  the message count does not jump with rounding.
* leakage gap: exact leakage minus I(CS;XY) over PILOT_CODEBOOKS codebooks;
  gap = max(mean + 3 sd, largest pilot gap).
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .codebook import bin_count
from .configs import (
    modadd_binning_strategy,
    modadd_state_pmf,
    projection_channel_tensor,
    projection_sim_strategy,
    projection_state_pmf,
)
from .encoders import BinningCode
from .leakage import exact_leakage
from .model import mutual_information_sx
from .simulate import SimConfig, build_code, run_trials, simulate, strategy_leakage_bound

PILOT_SEED_BASE = 10_000
PILOT_TRIALS = 10_000
PILOT_CODEBOOKS = 100
TEST_TRIALS = 500

COVERING_SETUP = {"p_s": 0.25, "n": 8, "R": 0.125, "delta": 0.25, "extras": (0.1, 0.3, 0.5)}
ERROR_LOW_SETUP = {"eps": 0.1, "alpha": 0.5, "n": 8, "R": 0.25, "delta": 0.25}
ERROR_HIGH_SETUP = {"eps": 0.5, "alpha": 0.5, "n": 8, "R": 1.0, "delta": 0.25}
MONOTONE_SETUP = {"eps": 0.05, "alpha": 0.5, "ns": (4, 6, 8), "R": 0.5, "delta": 0.25}
LEAKAGE_SETUP = {"eps": 0.5, "alpha": 0.5, "n": 6, "R": 1 / 3, "delta": 0.25}

# -- generated constants (python -m qmask.codesim.pilot) --
COVERING_EXACT = (0.28074580062283894, 0.12216350539359659, 0.04514970468957627)
COVERING_THRESHOLD = 0.07300651282346637
ERROR_LOW_THRESHOLD = 0.324  # largest pilot rate 0.324
ERROR_HIGH_RATE = 0.952
MONOTONE_ENSEMBLE = (0.2124, 0.1793, 0.1542)
LEAKAGE_GAP = 0.08970448952523341  # largest pilot gap 0.0897045
# -- end generated constants --


def three_sd(p: float, trials: int = TEST_TRIALS) -> float:
    return 3.0 * math.sqrt(max(p * (1 - p), 0.0) / trials)


def exact_covering_failure(q, strategy, n: int, bin_size: int, delta: float) -> float:
    """Probability that no codeword of a bin is jointly typical with S^n."""
    p_sx = strategy.joint(q)
    p_x = p_sx.sum(axis=0)
    n_s, n_x = p_sx.shape
    flat = p_sx.ravel()
    zero = flat == 0
    xs = np.array(list(itertools.product(range(n_x), repeat=n)), dtype=np.int64)
    p_xs = np.prod(p_x[xs], axis=1)
    total = 0.0
    for counts in itertools.product(range(n + 1), repeat=n_s):
        if sum(counts) != n:
            continue
        s = np.repeat(np.arange(n_s), counts)
        p_type = math.factorial(n) / math.prod(math.factorial(c) for c in counts) * math.prod(
            q[a] ** c for a, c in enumerate(counts))
        idx = s[None, :] * n_x + xs
        joint = np.stack([(idx == c).sum(axis=1) for c in range(flat.size)], axis=1)
        ok = ~np.any(zero & (joint > 0), axis=1) & ~np.any(~zero & (np.abs(joint / n - flat) > delta), axis=1)
        p_typ = float(np.sum(p_xs[ok]))
        total += p_type * (1.0 - p_typ) ** bin_size
    return float(total)


def covering_bins(setup=COVERING_SETUP):
    q = modadd_state_pmf(setup["p_s"])
    st = modadd_binning_strategy()
    i_xs = mutual_information_sx(st.joint(q))
    return [(extra, setup["R"] + i_xs + extra,
             bin_count(setup["n"], setup["R"], setup["R"] + i_xs + extra)) for extra in setup["extras"]]


def covering_pilot(setup=COVERING_SETUP):
    q = modadd_state_pmf(setup["p_s"])
    st = modadd_binning_strategy()
    exact = [exact_covering_failure(q, st, setup["n"], b, setup["delta"]) for _, _, b in covering_bins(setup)]
    return exact, float(exact[-1] + three_sd(exact[-1]))


def _projection_error(setup, n, trials, seed):
    cfg = SimConfig(n, setup["R"], trials, seed, delta=setup["delta"])
    res = simulate(cfg, projection_channel_tensor(), projection_state_pmf(setup["eps"]),
                   projection_sim_strategy(setup["alpha"]), leakage=False)
    return res.error_rate


def error_pilot(setup, codebooks=PILOT_CODEBOOKS, trials=TEST_TRIALS):
    """Per-codebook error rates; returns (threshold, smallest rate, largest rate)."""
    rates = np.array([_projection_error(setup, setup["n"], trials, PILOT_SEED_BASE + j)
                      for j in range(codebooks)])
    thr = max(float(rates.mean() + 3 * rates.std(ddof=1)), float(rates.max()))
    return thr, float(rates.min()), float(rates.max())


def ensemble_error(setup, n: int, trials: int, seed_base: int) -> float:
    """Error rate when every trial draws its own codebook (seeds seed_base, seed_base + 1, ...)."""
    W = projection_channel_tensor()
    q = projection_state_pmf(setup["eps"])
    st = projection_sim_strategy(setup["alpha"])
    errs = 0
    for t in range(trials):
        cfg = SimConfig(n, setup["R"], 1, seed_base + t, delta=setup["delta"])
        code, _ = build_code(cfg, W, q, st)
        errs += run_trials(code, W, q, cfg.seed, 0, 1)[0]
    return errs / trials


def leakage_pilot(setup=LEAKAGE_SETUP, codebooks=PILOT_CODEBOOKS):
    W = projection_channel_tensor()
    q = projection_state_pmf(setup["eps"])
    st = projection_sim_strategy(setup["alpha"])
    bound = strategy_leakage_bound(W, q, st)
    rt = setup["R"] + mutual_information_sx(st.joint(q)) + 0.1
    gaps = []
    for j in range(codebooks):
        code = BinningCode(st, W, q, setup["n"], setup["R"], rt, setup["delta"], PILOT_SEED_BASE + j)
        gaps.append(exact_leakage(code, W, q) - bound)
    gaps = np.array(gaps)
    return max(float(gaps.mean() + 3 * gaps.std(ddof=1)), float(gaps.max())), float(gaps.max())


def main():
    exact, cov_thr = covering_pilot()
    low_thr, _, low_max = error_pilot(ERROR_LOW_SETUP)
    _, high_min, _ = error_pilot(ERROR_HIGH_SETUP)
    mono = [ensemble_error(MONOTONE_SETUP, n, PILOT_TRIALS, PILOT_SEED_BASE) for n in MONOTONE_SETUP["ns"]]
    gap, worst = leakage_pilot()
    print("# -- generated constants (python -m qmask.codesim.pilot) --")
    print(f"COVERING_EXACT = ({', '.join(repr(v) for v in exact)})")
    print(f"COVERING_THRESHOLD = {cov_thr!r}")
    print(f"ERROR_LOW_THRESHOLD = {low_thr!r}  # largest pilot rate {low_max:.6g}")
    print(f"ERROR_HIGH_RATE = {high_min!r}")
    print(f"MONOTONE_ENSEMBLE = ({', '.join(repr(v) for v in mono)})")
    print(f"LEAKAGE_GAP = {gap!r}  # largest pilot gap {worst:.6g}")
    print("# -- end generated constants --")


if __name__ == "__main__":
    main()
