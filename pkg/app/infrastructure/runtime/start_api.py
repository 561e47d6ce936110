from __future__ import annotations

import logging
import sys

import uvicorn

from app.core.config.settings import get_settings
from app.core.logging.setup import configure_logging

logger = logging.getLogger(__name__)


def main() -> None:
    settings = get_settings()
    configure_logging(settings.log_level)
    logger.info('Iniciando API. porta=%s', settings.api_http_port)
    uvicorn.run('app.main:app', host='0.0.0.0', port=settings.api_http_port)


if __name__ == '__main__':
    try:
        main()
    except Exception:
        logger.exception('Falha ao iniciar a API.')
        sys.exit(1)
