"""Counter-based random streams.

Every random draw in a simulation comes from a Philox stream keyed by the
user seed, with the counter fixing (index, stage). Streams for different
trials or bins never overlap, so results do not depend on evaluation order or
thread count.
"""

import numpy as np

STAGE_CODEBOOK = 1
STAGE_SOURCE = 2
STAGE_CHANNEL = 3

MAX_SEED = 2**64 - 1


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def stream(seed: int, index: int, stage: int) -> np.random.Generator:
    counter = np.array([0, 0, index, stage], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=check_seed(seed), counter=counter))


def letters_from_uniforms(u: np.ndarray, pmf: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling; letters with zero probability are never returned."""
    cdf = np.cumsum(pmf)
    return np.searchsorted(cdf[:-1], u, side="right").astype(np.int64)
