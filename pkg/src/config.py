import os
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Project settings
    PROJECT_NAME: str = "bupd-basket"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Bayesian basket-trial designs with unit-information-prior borrowing"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "bupd.log"
    LOG_CONFIG: str = "logging.ini"

    # Parallelism: 0 means one worker per CPU, 1 runs replicates inline
    WORKERS: int = 0

    # Reproducibility
    DEFAULT_SEED: int = 20240501

    # Simulation scale
    MIN_CALIBRATION_REPLICATES: int = 100
    FULL_REPLICATES: int = 2000
    DESK_REPLICATES: int = 500

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="BUPD_",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        return str(v).upper()

    @field_validator("WORKERS")
    @classmethod
    def check_workers(cls, v: int) -> int:
        if v < 0:
            raise ValueError("WORKERS must be >= 0")
        return v


settings = Settings()


def resolve_workers(requested: Optional[int] = None) -> int:
    """Number of worker processes for replicate execution.

    An explicit request wins over BUPD_WORKERS; 0 falls back to the CPU count.
    """
    workers = settings.WORKERS if requested is None else requested
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers
