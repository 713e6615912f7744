"""
Configuration Loader Module

Simple functions to load YAML configuration files, plus the typed RunConfig
used by the command-line front end.
"""

import os
from pathlib import Path
from typing import Literal

import yaml
from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError

load_dotenv()

# Cached raw configs
_raw_configs: dict[str, dict] = {}
_config_dir: Path | None = None


def _get_config_dir() -> Path:
    """Resolve the configuration directory path."""
    global _config_dir

    if _config_dir is not None:
        return _config_dir

    # Try environment variable
    env_config_dir = os.environ.get("FISCAL_CONFIG_DIR")
    if env_config_dir:
        _config_dir = Path(env_config_dir)
        return _config_dir

    # Walk up from current file to find config directory
    current = Path(__file__).parent
    while current != current.parent:
        config_path = current / "config"
        if config_path.exists():
            _config_dir = config_path
            return _config_dir
        current = current.parent

    # Fallback to relative path
    _config_dir = Path("config")
    return _config_dir


def _load_yaml(filename: str) -> dict:
    """Load a YAML file and cache it."""
    if filename in _raw_configs:
        return _raw_configs[filename]

    filepath = _get_config_dir() / filename

    if not filepath.exists():
        _raw_configs[filename] = {}
        return {}

    with open(filepath) as f:
        data = yaml.safe_load(f) or {}
        _raw_configs[filename] = data
        return data


def load_settings() -> dict:
    """
    Load settings.yaml as a dictionary.

    Returns:
        Settings configuration dict.

    Usage:
        settings = load_settings()
        level = settings.get("logging", {}).get("level", "WARNING")
    """
    return _load_yaml("settings.yaml")


def reload_configs() -> None:
    """Clear cached configs to force reload on next access."""
    global _config_dir
    _raw_configs.clear()
    _config_dir = None


# =============================================================================
# Run configuration
# =============================================================================


class RunConfig(BaseModel):
    """Defaults and tolerances for one CLI invocation."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    # Aggregate-method elasticities
    epsilon_v: float = 1.0
    epsilon_c: float = 0.0

    # Fiscal rule thresholds
    deficit_limit: float = Field(default=0.03, gt=0)
    structural_limit: float = Field(default=0.005, gt=0)
    relaxed_structural_limit: float = Field(default=0.01, gt=0)
    relaxation_threshold: float = Field(default=0.60, gt=0)

    # Numerical tolerances
    gradient_tolerance: float = Field(default=1e-5, gt=0)
    ode_tolerance: float = Field(default=1e-8, gt=0)
    stationarity_tolerance: float = Field(default=1e-9, gt=0)

    output_format: Literal["text", "json", "csv"] = "text"
    max_workers: int = Field(default=4, gt=0)


def _flatten_analysis(settings: dict) -> dict:
    """Flatten the nested `analysis` section of settings.yaml into RunConfig keys."""
    analysis = settings.get("analysis", {})
    flat: dict = {}

    flat.update(analysis.get("elasticities", {}))
    flat.update(analysis.get("compliance", {}))

    tolerances = analysis.get("tolerances", {})
    for key, value in tolerances.items():
        flat[f"{key}_tolerance"] = value

    output = analysis.get("output", {})
    if "format" in output:
        flat["output_format"] = output["format"]

    workers = settings.get("workflow", {}).get("max_workers")
    if workers is not None:
        flat["max_workers"] = workers

    return flat


def load_run_config(override_path: str | Path | None = None) -> RunConfig:
    """
    Build the RunConfig for an invocation.

    Args:
        override_path: Optional flat key=value file whose entries override
            the `analysis` section of settings.yaml.

    Returns:
        Validated RunConfig.

    Raises:
        ConfigError: Unknown key, unreadable file or invalid value.
    """
    values = _flatten_analysis(load_settings())

    if override_path is not None:
        path = Path(override_path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")

        overrides = dotenv_values(path)
        unknown = sorted(set(overrides) - set(RunConfig.model_fields))
        if unknown:
            raise ConfigError(f"Unknown config keys in {path}: {', '.join(unknown)}")

        values.update({key: value for key, value in overrides.items() if value is not None})

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}") from e
