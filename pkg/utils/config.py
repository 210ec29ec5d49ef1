"""
Runtime settings.
Defaults can be overridden from a .env file or ALTPROJ_* environment variables.
"""
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class Settings(BaseModel):
    log_level: str = "WARNING"
    tie_tol: float = Field(default=1e-9, gt=0)
    angle_tol: float = Field(default=1e-13, gt=0)
    stop_step: float = Field(default=1e-12, ge=0)
    nearest_horizon: int = Field(default=2000, ge=2)
    n_jobs: int = 1


ENV_PREFIX = "ALTPROJ_"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read ALTPROJ_* variables once; unset ones keep the model defaults."""
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw
    return Settings(**values)
