import pytest

from trace_convexity.cli import SEED_ENV
from trace_convexity.linalg import RandomSpec, make_rng, random_psd
from trace_convexity.probes import ProbeConfig


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def psd_pair():
    """Two well-conditioned 3x3 positive definite matrices"""
    rng = make_rng(42)
    spec = RandomSpec(seed=42, dim=3, cond_cap=50.0)
    return random_psd(spec, rng), random_psd(spec, rng)


@pytest.fixture
def fast_config():
    return ProbeConfig(dim=2, trials=40, seed=3, refine_iterations=40)
