"""
Configuration loading for mspe-lab: lab settings, scenario configs and DGP documents
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ConfigError
from .models import DgpSpec, ScenarioConfig

logger = logging.getLogger(__name__)

CONFIG_PATHS = [
    "./mspe_lab_config.json",
    "~/.config/mspe_lab/config.json",
    "~/.mspe_lab_config.json",
]

ModelT = TypeVar("ModelT", bound=BaseModel)


class LabSettings(BaseModel):
    """Process-wide settings"""

    threads: Optional[int] = Field(
        None, ge=1, description="Worker cap (default: machine parallelism)"
    )
    log_level: str = Field("INFO", description="Logging level name")
    output_dir: str = Field(
        "results", description="Default directory for run artifacts"
    )

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        level = value.upper()
        # getLevelName maps unknown names to the string "Level <name>"
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown logging level {value!r}")
        return level


def load_settings() -> LabSettings:
    """
    Load lab settings from environment variables or a config file

    Environment variables take precedence over the first config file found;
    anything unset falls back to the defaults of LabSettings.

    Returns:
        LabSettings: The resolved settings
    """
    values: Dict[str, Any] = {}
    for path in CONFIG_PATHS:
        expanded_path = os.path.expanduser(path)
        if os.path.exists(expanded_path):
            values.update(_read_json(expanded_path))
            logger.debug("Loaded settings from %s", expanded_path)
            break

    env_map = {
        "MSPE_LAB_THREADS": "threads",
        "MSPE_LAB_LOG_LEVEL": "log_level",
        "MSPE_LAB_OUTPUT_DIR": "output_dir",
    }
    for var, key in env_map.items():
        if os.environ.get(var):
            values[key] = os.environ[var]

    try:
        return LabSettings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid lab settings: {e}")


def override_settings(settings: LabSettings, **updates: Any) -> LabSettings:
    """
    Apply command-line overrides to loaded settings, validating the result

    Unset (None) updates keep the loaded value.

    Raises:
        ConfigError: if an override is invalid
    """
    values = settings.model_dump()
    values.update({k: v for k, v in updates.items() if v is not None})
    try:
        return LabSettings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid lab settings: {e}")


def get_worker_count(settings: Optional[LabSettings] = None) -> int:
    """
    Number of workers for parallel evaluation

    Args:
        settings: Resolved settings; loaded from the environment when omitted

    Returns:
        int: The configured thread cap, otherwise the machine parallelism
    """
    threads = (settings or load_settings()).threads
    if threads is not None:
        return threads
    return os.cpu_count() or 1


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return data


def _load_model(path: str, model: Type[ModelT]) -> ModelT:
    data = _read_json(str(Path(path).expanduser()))
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid {model.__name__} in {path}: {e}")


def read_scenario_document(path: str) -> Dict[str, Any]:
    """
    Raw fields of a ScenarioConfig JSON document, unvalidated

    Callers merge flag overrides into these fields before validating, so
    scale defaults are filled only for sizes neither source sets.
    """
    return _read_json(str(Path(path).expanduser()))


def load_scenario_config(path: str) -> ScenarioConfig:
    """Read a ScenarioConfig JSON document"""
    return _load_model(path, ScenarioConfig)


def load_dgp_spec(path: str) -> DgpSpec:
    """Read a DgpSpec JSON document (sigma_mat: "identity" or a row-major matrix)"""
    return _load_model(path, DgpSpec)


def build_scenario_config(**fields: Any) -> ScenarioConfig:
    """Build a ScenarioConfig from flag values, dropping unset ones"""
    try:
        return ScenarioConfig(**{k: v for k, v in fields.items() if v is not None})
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario configuration: {e}")
