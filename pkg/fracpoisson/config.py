"""Centralized configuration management for fracpoisson.

All numerical knobs (series guards, tolerances, truncation rules, Monte Carlo
chunking, step caps) are loaded once into an immutable settings object.
Values come from environment variables prefixed with ``FRACPOISSON_`` or from
a ``.env`` file; the CLI merges a flat config file and flags on top.
"""

import logging
import sys
from typing import Optional

import structlog
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = structlog.get_logger(__name__)


class Settings(BaseSettings):
    """Numerical and runtime settings.

    This class defines the complete configuration contract for the library.
    Every default matches a documented design decision, so an empty
    environment reproduces the reference behavior.
    """

    model_config = SettingsConfigDict(
        env_prefix="FRACPOISSON_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
        frozen=True,
    )

    # Mittag-Leffler series
    ml_series_guard: float = Field(default=100.0, gt=0)
    ml_abs_tol: float = Field(default=1e-12, gt=0)
    ml_rel_tol: float = Field(default=1e-10, gt=0)
    ml_truncation_rtol: float = Field(default=1e-17, gt=0)
    ml_stop_run: int = Field(default=50, ge=1)
    ml_max_terms: int = Field(default=1_000_000, ge=100)
    ml_cancellation_warn_nats: float = Field(default=14.0, gt=0)

    # Discrete laws
    tail_nats: float = Field(default=40.0, gt=0)
    tail_rel_remainder: float = Field(default=1e-15, gt=0)
    max_pmf_terms: int = Field(default=1_000_000, ge=100)
    cdf_deficit_tol: float = Field(default=1e-12, gt=0)

    # Optimization and quadrature
    conjugate_xtol: float = Field(default=1e-12, gt=0)
    conjugate_theta_cap: float = Field(default=1e12, gt=0)
    root_xtol: float = Field(default=1e-14, gt=0)
    root_check_tol: float = Field(default=1e-10, gt=0)
    quad_abs_tol: float = Field(default=1e-10, gt=0)
    halfnormal_split_quantile: float = Field(default=0.999999, gt=0.5, lt=1.0)

    # Monte Carlo
    default_seed: int = Field(default=20240101, ge=0)
    mc_chunk_size: int = Field(default=4096, ge=1)
    workers: int = Field(default=1, ge=1)
    ruin_step_cap: int = Field(default=10_000_000, ge=1)
    crude_prune_nats: float = Field(default=30.0, gt=0)

    # Logging
    log_level: str = Field(default="WARNING")
    log_json: bool = Field(default=False)


# Global settings instance - immutable after initialization
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance.

    Returns:
        Settings: The immutable global settings object.
    """
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def override_settings(**values: object) -> Settings:
    """Replace the global settings with a copy carrying ``values``.

    Used by the CLI config-file merge and by tests that need a different
    guard or chunk size. Passing no values resets to the environment.

    Returns:
        Settings: The new global settings object.
    """
    global _settings
    _settings = Settings(**values) if values else Settings()
    return _settings


def configure_logging(level: str = "WARNING", json: bool = False) -> None:
    """Configure structlog to write key-value events to stderr."""
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING
    renderer = (
        structlog.processors.JSONRenderer()
        if json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def initialize_settings(**overrides: object) -> Settings:
    """Initialize settings, configure logging and log the effective values.

    This function should be called at program start-up so that every
    configuration problem surfaces before any computation runs.

    Returns:
        Settings: The validated settings object.

    Raises:
        ValidationError: If a value fails validation.
    """
    settings = override_settings(**overrides)
    configure_logging(settings.log_level, settings.log_json)
    logger.info("settings_initialized", **settings.model_dump())
    return settings
