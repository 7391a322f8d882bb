"""
Runtime settings read from the environment.

Values come from ``DMERA_*`` variables, normally populated from a ``.env``
file by the entry script.
"""

import logging
import logging.config
import os
from copy import deepcopy
from functools import lru_cache
from pathlib import Path
from typing import Optional

import psutil
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


def _default_workers() -> int:
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class Settings(BaseModel):
    """Environment-derived configuration"""

    log_level: str = "INFO"
    log_file: Optional[Path] = None
    output_dir: Path = Path("results")
    max_workers: int = Field(default_factory=_default_workers, ge=1)
    seed: int = 0

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value}")
        return value

    @classmethod
    def from_env(cls) -> "Settings":
        values = {
            "log_level": os.getenv("DMERA_LOG_LEVEL"),
            "log_file": os.getenv("DMERA_LOG_FILE"),
            "output_dir": os.getenv("DMERA_OUTPUT_DIR"),
            "max_workers": os.getenv("DMERA_MAX_WORKERS"),
            "seed": os.getenv("DMERA_SEED"),
        }
        return cls(**{k: v for k, v in values.items() if v not in (None, "")})


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()


def configure_logging(settings: Settings, debug: bool = False) -> None:
    """Install LOGGING_CONFIG, honouring the level and optional log file"""
    from dmera import LOGGING_CONFIG

    config = deepcopy(LOGGING_CONFIG)
    level = "DEBUG" if debug else settings.log_level
    config["handlers"]["console"]["level"] = level
    config["loggers"]["dmera"]["level"] = level
    if settings.log_file:
        config["handlers"]["file"] = {
            "class": "logging.FileHandler",
            "filename": str(settings.log_file),
            "formatter": "detailed",
            "level": "DEBUG",
        }
        config["loggers"]["dmera"]["handlers"].append("file")
    logging.config.dictConfig(config)
