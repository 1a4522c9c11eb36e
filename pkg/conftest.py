"""
Shared fixtures: a stationary design path, its fit, and small reference-table settings
"""

import os

import numpy as np
import pytest

# keep the sup|B| reference table cheap for the fast suite
os.environ.setdefault("SAGARCH_CRITICAL_VALUE_PATHS", "2000")
os.environ.setdefault("SAGARCH_CRITICAL_VALUE_GRID", "500")

from backend import mle  # noqa: E402
from backend.sagarch_model import ParamVector, simulate  # noqa: E402
from config.settings import get_settings  # noqa: E402


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def stationary_theta() -> ParamVector:
    return ParamVector(0.2, 0.1, 0.2, 0.5, 1.5)


@pytest.fixture(scope="session")
def explosive_theta() -> ParamVector:
    return ParamVector(0.1, 0.1, 0.2, 0.5, 1.0)


@pytest.fixture(scope="session")
def stationary_path(stationary_theta):
    return simulate(stationary_theta, 1000, seed=20240601)


@pytest.fixture(scope="session")
def stationary_fit(stationary_path):
    return mle.fit(stationary_path.series, mle.FitConfig(multistart=2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
