import numpy as np
import pytest

from dmera.gaussian import CovarianceState, apply_two_site_gate, vacuum_state
from dmera.settings import get_settings


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def isolated_settings(monkeypatch, tmp_path):
    """Single-threaded settings writing into a temporary directory"""
    monkeypatch.setenv("DMERA_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("DMERA_MAX_WORKERS", "1")
    monkeypatch.setenv("DMERA_LOG_LEVEL", "WARNING")
    monkeypatch.delenv("DMERA_LOG_FILE", raising=False)
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()


def random_circuit_state(n_sites: int, n_gates: int, rng: np.random.Generator) -> CovarianceState:
    """Vacuum followed by random two-site gates, wrap included"""
    state = vacuum_state(n_sites)
    for _ in range(n_gates):
        left = int(rng.integers(n_sites))
        state = apply_two_site_gate(state, left, tuple(rng.uniform(-np.pi, np.pi, size=2)))
    return state
