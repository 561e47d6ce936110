from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from app.application.dtos.planning import GridWorldConfig, TadpConfig
from app.domain.exceptions import ConfigError

logger = logging.getLogger(__name__)

ModelT = TypeVar('ModelT', bound=BaseModel)


def read_json(path: str | Path) -> dict:
    source = Path(path)
    try:
        payload = json.loads(source.read_text(encoding='utf-8-sig'))
    except OSError as exc:
        raise ConfigError(f'Falha ao ler arquivo de configuracao. caminho={source} motivo={exc}') from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f'Arquivo de configuracao nao esta em UTF-8. caminho={source} posicao={exc.start}') from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f'JSON invalido. caminho={source} linha={exc.lineno} motivo={exc.msg}') from exc
    if not isinstance(payload, dict):
        raise ConfigError(f'Configuracao deve ser um objeto JSON. caminho={source}')
    return payload


def load_model(path: str | Path, model: type[ModelT]) -> ModelT:
    payload = read_json(path)
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(f'Configuracao invalida. caminho={path} detalhes={exc}') from exc


def load_grid_config(path: str | Path) -> GridWorldConfig:
    config = load_model(path, GridWorldConfig)
    logger.info('Grid carregado. caminho=%s dimensoes=%sx%s', path, config.width, config.height)
    return config


def load_tadp_config(path: str | Path) -> TadpConfig:
    return load_model(path, TadpConfig)
