"""Process-wide settings read from the environment and an optional ``.env``."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

from dotenv import load_dotenv

DEFAULT_SEED = 20240611

ENV_PREFIX = "AV_FEASIBILITY_"


@dataclass(frozen=True)
class Settings:
    """Runtime defaults that command line flags may override."""

    log_level: str = "WARNING"
    cache_db: Optional[str] = None
    threads: int = 1
    seed: int = DEFAULT_SEED


def _int_env(env: Mapping[str, str], name: str, default: int) -> int:
    raw = env.get(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from None


def load_settings(env: Optional[Mapping[str, str]] = None, dotenv: bool = True) -> Settings:
    """Build settings from ``AV_FEASIBILITY_*`` variables.

    Args:
        env: Mapping to read instead of ``os.environ`` (tests)
        dotenv: Load a ``.env`` file from the working directory first

    Returns:
        Settings instance
    """
    if env is None:
        if dotenv:
            load_dotenv()
        env = os.environ

    threads = _int_env(env, "THREADS", 1)
    if threads < 1:
        raise ValueError(f"{ENV_PREFIX}THREADS must be >= 1, got {threads}")

    return Settings(
        log_level=env.get(ENV_PREFIX + "LOG_LEVEL", "WARNING").upper(),
        cache_db=env.get(ENV_PREFIX + "CACHE_DB") or None,
        threads=threads,
        seed=_int_env(env, "SEED", DEFAULT_SEED),
    )
