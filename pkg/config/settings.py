"""
Runtime Settings
Environment-driven defaults for seeds, parallelism, logging and quadrature
"""

import logging
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class RuntimeSettings(BaseSettings):
    """
    Process-wide defaults read from SAGARCH_* environment variables or a .env file
    Think of this as the control panel every command starts from
    """

    model_config = SettingsConfigDict(
        env_prefix="SAGARCH_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    seed: int = Field(default=20240601, ge=0)
    workers: int = Field(default=1, ge=1)
    log_level: str = "WARNING"

    quadrature_abs_tol: float = Field(default=1e-12, gt=0)
    quadrature_rel_tol: float = Field(default=1e-10, gt=0)

    # sup|B| reference table used for diagnostic-test p-values
    critical_value_paths: int = Field(default=20000, ge=1000)
    critical_value_grid: int = Field(default=2000, ge=100)
    critical_value_seed: int = Field(default=7, ge=0)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {value!r}")
        return level


@lru_cache(maxsize=1)
def get_settings() -> RuntimeSettings:
    """Cached settings instance (call get_settings.cache_clear() after changing the environment)"""
    settings = RuntimeSettings()
    logger.debug(f"Runtime settings: {settings.model_dump()}")
    return settings
