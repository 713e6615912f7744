"""Utility modules for the fiscal stabiliser toolkit."""

from .config_loader import RunConfig, load_run_config, load_settings, reload_configs
from .errors import (
    ConfigError,
    FiscalDomainError,
    FiscalError,
    IngestionError,
    NonDifferentiableError,
    NumericError,
    SingularityError,
)
from .logging_config import get_logger, setup_logging

__all__ = [
    "load_settings",
    "load_run_config",
    "reload_configs",
    "RunConfig",
    "setup_logging",
    "get_logger",
    "FiscalError",
    "FiscalDomainError",
    "NonDifferentiableError",
    "NumericError",
    "SingularityError",
    "IngestionError",
    "ConfigError",
]
