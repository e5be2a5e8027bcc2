import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigurationError

DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent.parent / "config.yaml"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """Runtime limits and defaults for the engine and the CLI"""

    max_n: int = 10
    verify_n_min: int = 2
    verify_n_max: int = 8
    workers: int = 1
    log_level: str = "WARNING"
    log_format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    def validate(self) -> "Settings":
        if self.max_n < 1:
            raise ConfigurationError(f"max_n must be positive, got {self.max_n}")
        if self.verify_n_min < 1 or self.verify_n_max < self.verify_n_min:
            raise ConfigurationError(
                f"Invalid verify range {self.verify_n_min}..{self.verify_n_max}"
            )
        if self.workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}")
        if logging.getLevelName(self.log_level.upper()) == f"Level {self.log_level.upper()}":
            raise ConfigurationError(f"Unknown log level: {self.log_level}")
        return self


def _read_yaml(path: Path) -> Dict[str, Any]:
    """Read a config.yaml file; a missing file means defaults"""
    if not path.exists():
        logger.debug(f"No config file at {path}, using defaults")
        return {}
    try:
        with open(path, "r") as file:
            config = yaml.safe_load(file) or {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse {path}: {e}") from e
    if not isinstance(config, dict):
        raise ConfigurationError(f"{path} must contain a mapping at the top level")
    return config


def _as_int(value: Any, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{name} must be an integer, got {value!r}") from e


def load_settings(config_path: Optional[str] = None) -> Settings:
    """Build Settings from config.yaml, then apply GENERA_* environment overrides"""
    load_dotenv()

    path = Path(config_path or os.getenv("GENERA_CONFIG") or DEFAULT_CONFIG_FILE)
    config = _read_yaml(path)

    limits = config.get("limits") or {}
    verify = config.get("verify") or {}
    log_cfg = config.get("logging") or {}

    defaults = Settings()
    settings = Settings(
        max_n=_as_int(limits.get("max_n", defaults.max_n), "limits.max_n"),
        verify_n_min=_as_int(verify.get("n_min", defaults.verify_n_min), "verify.n_min"),
        verify_n_max=_as_int(verify.get("n_max", defaults.verify_n_max), "verify.n_max"),
        workers=_as_int(verify.get("workers", defaults.workers), "verify.workers"),
        log_level=str(log_cfg.get("level", defaults.log_level)),
        log_format=str(log_cfg.get("format", defaults.log_format)),
    )

    overrides: Dict[str, Any] = {}
    if os.getenv("GENERA_MAX_N"):
        overrides["max_n"] = _as_int(os.getenv("GENERA_MAX_N"), "GENERA_MAX_N")
    if os.getenv("GENERA_WORKERS"):
        overrides["workers"] = _as_int(os.getenv("GENERA_WORKERS"), "GENERA_WORKERS")
    if os.getenv("GENERA_LOG_LEVEL"):
        overrides["log_level"] = os.getenv("GENERA_LOG_LEVEL")
    if overrides:
        settings = replace(settings, **overrides)

    return settings.validate()
