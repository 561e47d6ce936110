from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict

ENV_PATH = Path('.env')


def _load_dotenv() -> None:
    if not ENV_PATH.exists():
        return
    for raw_line in ENV_PATH.read_text(encoding='utf-8').splitlines():
        line = raw_line.strip()
        if not line or line.startswith('#') or '=' not in line:
            continue
        key, value = line.split('=', 1)
        key = key.strip().lstrip('﻿')
        value = value.strip()
        if key and key not in os.environ:
            os.environ[key] = value


def _to_bool(value: str | None, default: bool) -> bool:
    if value is None or str(value).strip() == '':
        return default
    return str(value).strip().lower() in {'1', 'true', 'yes', 'on'}


def _to_int(value: str | None, default: int) -> int:
    if value is None or str(value).strip() == '':
        return default
    return int(str(value).strip())


def _to_float(value: str | None, default: float) -> float:
    if value is None or str(value).strip() == '':
        return default
    return float(str(value).strip())


class Settings(BaseModel):
    model_config = ConfigDict(extra='ignore')

    app_env: str = 'local'
    api_http_port: int = 8000
    log_level: str = 'INFO'
    prometheus_metrics_enabled: bool = True

    output_dir: Path = Path('out')
    planner_gamma: float = 0.9
    planner_tau: float = 2.0
    planner_epsilon: float = 1e-3
    planner_alpha: float = 60.0
    planner_max_sweeps: int = 100_000
    planner_seed: int = 0
    max_api_product_states: int = 5000


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    _load_dotenv()
    return Settings(
        app_env=os.getenv('APP_ENV', 'local').strip().lower() or 'local',
        api_http_port=_to_int(os.getenv('API_HTTP_PORT'), 8000),
        log_level=os.getenv('LOG_LEVEL', 'INFO').strip().upper() or 'INFO',
        prometheus_metrics_enabled=_to_bool(os.getenv('PROMETHEUS_METRICS_ENABLED'), True),
        output_dir=Path(os.getenv('PLANNER_OUTPUT_DIR', 'out').strip() or 'out'),
        planner_gamma=_to_float(os.getenv('PLANNER_GAMMA'), 0.9),
        planner_tau=_to_float(os.getenv('PLANNER_TAU'), 2.0),
        planner_epsilon=_to_float(os.getenv('PLANNER_EPSILON'), 1e-3),
        planner_alpha=_to_float(os.getenv('PLANNER_ALPHA'), 60.0),
        planner_max_sweeps=_to_int(os.getenv('PLANNER_MAX_SWEEPS'), 100_000),
        planner_seed=_to_int(os.getenv('PLANNER_SEED'), 0),
        max_api_product_states=_to_int(os.getenv('PLANNER_MAX_API_PRODUCT_STATES'), 5000),
    )


def reload_settings() -> Settings:
    get_settings.cache_clear()
    return get_settings()
