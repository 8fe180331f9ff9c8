import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

LOG_LEVELS = ("quiet", "info", "debug")


@dataclass(frozen=True)
class Settings:
    log_level: str
    max_joint_outcomes: int
    snap_max_denominator: int
    snap_tolerance: float
    workers: int


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Reads the toolkit settings from the environment (and the .env file, if any).
    """
    log_level = os.getenv("SPECKER_KIT_LOG", "info").strip().lower()
    if log_level not in LOG_LEVELS:
        log_level = "info"
    return Settings(
        log_level=log_level,
        max_joint_outcomes=int(os.getenv("SPECKER_KIT_MAX_JOINT", "1000000")),
        snap_max_denominator=int(os.getenv("SPECKER_KIT_SNAP_DENOMINATOR", "1000000")),
        snap_tolerance=float(os.getenv("SPECKER_KIT_SNAP_TOLERANCE", "1e-9")),
        workers=max(1, int(os.getenv("SPECKER_KIT_WORKERS", "1"))),
    )
