"""
Environment settings loaded from a dotenv file
"""
import logging
import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ENV_FILE = os.getenv("PHSIM_ENV_FILE", "phsim.env")


class Settings(BaseModel):
    """Process-wide settings; values come from the environment"""
    log_level: str = "INFO"
    output_dir: str = "runs"
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    k1: Optional[float] = Field(default=None, gt=0)
    k2: Optional[float] = Field(default=None, gt=0)
    kw: Optional[float] = Field(default=None, gt=0)


def _env_float(name: str) -> Optional[float]:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv(ENV_FILE)
    return Settings(
        log_level=os.getenv("PHSIM_LOG_LEVEL", "INFO"),
        output_dir=os.getenv("PHSIM_OUTPUT_DIR", "runs"),
        api_host=os.getenv("PHSIM_API_HOST", "0.0.0.0"),
        api_port=int(os.getenv("PHSIM_API_PORT", "8000")),
        k1=_env_float("PHSIM_K1"),
        k2=_env_float("PHSIM_K2"),
        kw=_env_float("PHSIM_KW"),
    )


def configure_logging(level: Optional[str] = None) -> None:
    """Configure the root logger once for CLI and API entry points"""
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
