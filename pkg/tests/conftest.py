import contextlib
import os
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile(
    "thorough", max_examples=1000, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(rng, d_out, d_in, k):
    """Kraus stack (k, d_out, d_in) from a random isometry."""
    v = random_unitary(rng, max(k * d_out, d_in))[:, :d_in]
    return v[: k * d_out].reshape(k, d_out, d_in) if k * d_out >= d_in else None


def random_povm_ops(rng, d, n):
    """n positive operators summing to the identity."""
    raw = [random_density(rng, d) * rng.uniform(0.2, 1.0) for _ in range(n)]
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    return [inv_sqrt @ a @ inv_sqrt for a in raw]


def random_pmf(rng, n):
    return rng.dirichlet(np.ones(n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager factory that records one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def run(number, title):
        t0 = time.perf_counter()
        notes = []
        try:
            yield notes
        except BaseException as exc:
            line = f"CRITERION {number}: FAIL  {title} ({time.perf_counter() - t0:.1f}s) {type(exc).__name__}: {exc}"
            line = line.splitlines()[0]
            request.config.stash[ACCEPTANCE_LINES].append(line)
            print(line)
            raise
        detail = f" [{'; '.join(notes)}]" if notes else ""
        line = f"CRITERION {number}: PASS  {title} ({time.perf_counter() - t0:.1f}s){detail}"
        request.config.stash[ACCEPTANCE_LINES].append(line)
        print(line)

    return run
