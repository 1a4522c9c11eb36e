"""Configuration loading: environment overrides and validation"""

import pytest
from pydantic import ValidationError

from config.settings import RuntimeSettings, get_settings
from frontend.config import experiment_rows, parameters, tests


# Test 1: environment variables reach the settings
def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SAGARCH_SEED", "11")
    monkeypatch.setenv("SAGARCH_WORKERS", "3")
    monkeypatch.setenv("SAGARCH_LOG_LEVEL", "info")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.seed == 11
    assert settings.workers == 3
    assert settings.log_level == "INFO"


# Test 2: the cache holds one instance until cleared
def test_settings_are_cached():
    assert get_settings() is get_settings()


# Test 3: invalid values are refused
@pytest.mark.parametrize("field,value", [
    ("SAGARCH_WORKERS", "0"),
    ("SAGARCH_LOG_LEVEL", "chatty"),
    ("SAGARCH_CRITICAL_VALUE_PATHS", "10"),
])
def test_invalid_environment(monkeypatch, field, value):
    monkeypatch.setenv(field, value)
    with pytest.raises(ValidationError):
        RuntimeSettings()


# Test 4: display labels cover every parameter, test and table row
def test_display_labels_are_complete():
    assert set(parameters.LABELS) == set(parameters.ORDER)
    for name in ("stationarity", "explosivity", "symmetry", "diagnostic"):
        assert name in tests.LABELS
    assert set(experiment_rows.LABELS) == set(experiment_rows.ROWS)
