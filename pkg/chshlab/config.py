"""
Configuration for chshlab

Environment-driven defaults (LabConfig) plus the flat key=value config file used by the CLI.
"""

import os
import logging
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from dotenv import load_dotenv, dotenv_values
from pydantic import ValidationError as PydanticValidationError

from chshlab.errors import ConfigError
from chshlab.schemas import ProtocolConfig

load_dotenv()

logger = logging.getLogger("chshlab.config")


@dataclass
class LabConfig:
    """Process-wide numerical and runtime settings"""

    # Runtime
    seed: int = 0
    log_level: str = "INFO"

    # Tolerances
    validation_tol: float = 1e-9
    equality_tol: float = 1e-10
    jordan_tol: float = 1e-7

    # Capacity caps
    evolve_cap: int = 6
    dense_qubit_cap: int = 12
    live_qubit_cap: int = 18

    # Analysis defaults
    probe_restarts: int = 200
    kappa_star: float = 1.0  # placeholder, the constant is not known numerically
    default_rounds: int = 64

    @classmethod
    def from_env(cls) -> "LabConfig":
        """Create config from environment variables"""
        return cls(
            seed=int(os.getenv("CHSHLAB_SEED", "0")),
            log_level=os.getenv("CHSHLAB_LOG_LEVEL", "INFO"),
            validation_tol=float(os.getenv("CHSHLAB_VALIDATION_TOL", "1e-9")),
            equality_tol=float(os.getenv("CHSHLAB_EQUALITY_TOL", "1e-10")),
            jordan_tol=float(os.getenv("CHSHLAB_JORDAN_TOL", "1e-7")),
            evolve_cap=int(os.getenv("CHSHLAB_EVOLVE_CAP", "6")),
            dense_qubit_cap=int(os.getenv("CHSHLAB_DENSE_QUBIT_CAP", "12")),
            live_qubit_cap=int(os.getenv("CHSHLAB_LIVE_QUBIT_CAP", "18")),
            probe_restarts=int(os.getenv("CHSHLAB_PROBE_RESTARTS", "200")),
            kappa_star=float(os.getenv("CHSHLAB_KAPPA_STAR", "1.0")),
            default_rounds=int(os.getenv("CHSHLAB_DEFAULT_ROUNDS", "64")),
        )


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """
    Parse a flat key=value config file ('#' starts a comment).

    Returns an empty mapping when no path is given. Keys keep their case (n and N differ).
    """
    if path is None:
        return {}
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = dotenv_values(file_path, encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    values: Dict[str, str] = {}
    for key, value in raw.items():
        if value is None:
            raise ConfigError(f"{path}: key '{key}' has no value")
        values[key.strip()] = value.strip()
    logger.debug(f"📄 loaded {len(values)} keys from {path}")
    return values


# Global config instance
config = LabConfig.from_env()


def lab_config(values: Dict[str, str], base: Optional[LabConfig] = None) -> LabConfig:
    """Copy of `base` (the process-wide settings by default) with the LabConfig keys in `values` applied"""
    base = base or config
    lab_fields = {f.name for f in fields(LabConfig)}
    changes: Dict[str, Any] = {}
    for key, value in values.items():
        if key not in lab_fields:
            continue
        try:
            changes[key] = type(getattr(base, key))(value)
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {value!r}") from e
    return replace(base, **changes)


@contextmanager
def lab_settings(settings: LabConfig) -> Iterator[LabConfig]:
    """Install `settings` as the process-wide config inside the block, restoring the old values after"""
    saved = replace(config)
    vars(config).update(vars(settings))
    try:
        yield config
    finally:
        vars(config).update(vars(saved))


def protocol_config(values: Dict[str, str], **overrides: Any) -> ProtocolConfig:
    """
    ProtocolConfig from config-file values. LabConfig keys are skipped here (see lab_config);
    any other key is an error.
    """
    protocol_keys = set(ProtocolConfig.model_fields)
    lab_fields = {f.name for f in fields(LabConfig)}
    chosen: Dict[str, Any] = {}
    for key, value in values.items():
        if key in protocol_keys:
            chosen[key] = value
        elif key not in lab_fields:
            raise ConfigError(f"unknown config key '{key}'")
    if "q" in chosen:
        chosen["q"] = int(chosen["q"]) if chosen["q"].isdigit() else chosen["q"]
    chosen.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ProtocolConfig(**chosen)
    except PydanticValidationError as e:
        raise ConfigError(f"invalid protocol configuration: {e}") from e
