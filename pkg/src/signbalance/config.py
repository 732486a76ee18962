from __future__ import annotations

import os
from dataclasses import dataclass


def _env_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


@dataclass(slots=True)
class Settings:
    cache_dir: str | None = None
    use_cache: bool = True
    workers: int = 1
    log_level: str = "WARNING"
    random_samples: int = 10_000
    quick_random_samples: int = 500
    seed: int = 0


def load_settings() -> Settings:
    cache_dir = os.getenv("SIGNBAL_CACHE", "").strip()
    return Settings(
        cache_dir=cache_dir or None,
        use_cache=_env_bool("SIGNBAL_USE_CACHE", True),
        workers=max(1, _env_int("SIGNBAL_WORKERS", os.cpu_count() or 1)),
        log_level=os.getenv("SIGNBAL_LOG_LEVEL", "WARNING").strip().upper(),
        random_samples=_env_int("SIGNBAL_RANDOM_SAMPLES", 10_000),
        seed=_env_int("SIGNBAL_SEED", 0),
    )
