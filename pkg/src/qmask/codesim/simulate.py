"""Monte Carlo simulation of the binning scheme on classical channel analogs."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import SizeLimitError
from . import kernels
from .codebook import log_metric, message_count, wilson_halfwidth
from .encoders import BinningCode, LetterwiseEncoder
from .leakage import MAX_LEAKAGE_CELLS, exact_leakage, leakage_cells
from .model import (
    ClassicalStrategy,
    check_channel_tensor,
    check_pmf,
    check_sizes,
    mutual_information_sx,
    single_letter_leakage_bound,
    single_letter_prediction,
)
from .rng import STAGE_CHANNEL, STAGE_SOURCE, check_seed, letters_from_uniforms, stream

MAX_BLOCK = 10
DEFAULT_SLACK = 0.05
TRIAL_CHUNK = 64


@dataclass(frozen=True)
class SimConfig:
    """n: block length; R, Rtilde: bits per use; delta: typicality slack.

    ``encoder`` is ``"binning"`` or a :class:`LetterwiseEncoder`. ``Rtilde``
    defaults to R + I(X;S) + 2 * 0.05.
    """

    n: int
    R: float
    trials: int
    seed: int
    delta: float = 0.25
    Rtilde: float | None = None
    encoder: object = "binning"

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_BLOCK:
            raise SizeLimitError(f"block length n = {self.n} outside [1, {MAX_BLOCK}]")
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.R >= 0:
            raise ValueError(f"rate must be nonnegative, got {self.R}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.Rtilde is not None and self.Rtilde < self.R:
            raise ValueError(f"Rtilde = {self.Rtilde} must be at least R = {self.R}")
        if self.encoder != "binning" and not isinstance(self.encoder, LetterwiseEncoder):
            raise ValueError("encoder must be 'binning' or a LetterwiseEncoder")
        check_seed(self.seed)

    def echo(self) -> dict:
        enc = self.encoder if self.encoder == "binning" else f"custom:{self.encoder.name}"
        return {"n": int(self.n), "R": float(self.R), "Rtilde": None if self.Rtilde is None else float(self.Rtilde),
                "delta": float(self.delta), "trials": int(self.trials), "encoder": enc}


@dataclass(frozen=True)
class SimResult:
    config: dict
    seed: int
    error_rate: float
    ci_halfwidth: float
    covering_failure_rate: float
    leakage_bits_per_letter: float | None
    R_bound: float
    L_bound: float
    n_messages: int = 0
    bin_size: int = 1
    Rtilde: float = 0.0
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "config": {**self.config, "Rtilde_used": self.Rtilde, "messages": self.n_messages,
                       "bin_size": self.bin_size},
            "seed": self.seed,
            "error_rate": self.error_rate,
            "ci_halfwidth": self.ci_halfwidth,
            "covering_failure_rate": self.covering_failure_rate,
            "leakage_bits_per_letter": self.leakage_bits_per_letter,
            "prediction": {"R_bound": self.R_bound, "L_bound": self.L_bound},
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def sample_channel(a, s, W, rng: np.random.Generator) -> np.ndarray:
    """y_i ~ W[a_i, s_i, :] independently."""
    a = np.asarray(a, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    return _sample_from_uniforms(a, s, check_channel_tensor(W), rng.random(a.shape))


def _sample_from_uniforms(a, s, W, u):
    cdf = np.cumsum(W, axis=2)[a, s]
    return np.sum(u[..., None] >= cdf[..., :-1], axis=-1).astype(np.int64)


def build_code(config: SimConfig, W, q, strategy: ClassicalStrategy | None):
    """The bound code for a config plus the Rtilde actually used."""
    M = message_count(config.n, config.R)
    if config.encoder == "binning":
        if strategy is None:
            raise ValueError("the binning encoder needs a strategy")
        i_xs = mutual_information_sx(strategy.joint(q))
        rt = config.Rtilde if config.Rtilde is not None else config.R + i_xs + 2 * DEFAULT_SLACK
        return BinningCode(strategy, W, q, config.n, config.R, rt, config.delta, config.seed), rt
    return config.encoder.bind(W, q, config.n, M), config.R


def run_trials(code, W, q, seed, lo, hi):
    n, M = code.n, code.n_messages
    ms = np.empty(hi - lo, dtype=np.int64)
    S = np.empty((hi - lo, n), dtype=np.int64)
    U = np.empty((hi - lo, n))
    for j, t in enumerate(range(lo, hi)):
        g = stream(seed, t, STAGE_SOURCE)
        ms[j] = g.integers(M)
        S[j] = letters_from_uniforms(g.random(n), q)
        U[j] = stream(seed, t, STAGE_CHANNEL).random(n)
    inputs, _, failed = code.encode_batch(ms, S)
    Y = _sample_from_uniforms(inputs, S, W, U)
    k_hat = kernels.ml_decode(Y, code.codebook.codewords, log_metric(code.metric))
    m_hat = code.codebook.bin_of(k_hat)
    return int(np.sum(m_hat != ms)), int(np.sum(failed))


def simulate(config: SimConfig, W, q, strategy: ClassicalStrategy | None = None,
             threads: int = 1, leakage: bool = True) -> SimResult:
    """Run ``config.trials`` independent trials: draw (m, s^n), encode, pass the channel, decode.

    Results are identical for any ``threads``: trials are keyed by index and
    processed in fixed chunks.
    """
    W = check_channel_tensor(W)
    q = check_pmf(q, "state pmf")
    if isinstance(config.encoder, LetterwiseEncoder):
        strategy = config.encoder.strategy(W.shape[1])
    check_sizes(W, q, strategy)
    code, rt = build_code(config, W, q, strategy)

    bounds = [(lo, min(lo + TRIAL_CHUNK, config.trials)) for lo in range(0, config.trials, TRIAL_CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: run_trials(code, W, q, config.seed, *b), bounds))
    else:
        parts = [run_trials(code, W, q, config.seed, *b) for b in bounds]
    errors = sum(p[0] for p in parts)
    cover = sum(p[1] for p in parts)

    notes = []
    leak = None
    cells = leakage_cells(W.shape[1], W.shape[2], code.n, code.n_messages)
    if not leakage:
        notes.append("exact leakage not requested")
    elif cells > MAX_LEAKAGE_CELLS:
        notes.append(f"exact leakage skipped: |S|^n |Y|^n M = {cells} exceeds the cap of 2^26")
    else:
        leak = exact_leakage(code, W, q)

    pred = single_letter_prediction(W, q, strategy)
    return SimResult(
        config=config.echo(), seed=int(config.seed),
        error_rate=errors / config.trials,
        ci_halfwidth=wilson_halfwidth(errors, config.trials),
        covering_failure_rate=cover / config.trials,
        leakage_bits_per_letter=leak,
        R_bound=pred.R, L_bound=pred.L,
        n_messages=code.n_messages, bin_size=code.codebook.bin_size, Rtilde=float(rt),
        notes=tuple(notes),
    )


def strategy_leakage_bound(W, q, strategy: ClassicalStrategy) -> float:
    return single_letter_leakage_bound(check_channel_tensor(W), check_pmf(q), strategy)


def binomial_sd(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)
