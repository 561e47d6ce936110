from __future__ import annotations

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app.api.v1.router import api_v1_router
from app.core.config.settings import get_settings
from app.core.errors.handlers import register_exception_handlers
from app.core.logging.setup import configure_logging
from app.core.middleware.correlation_id import register_correlation_id_middleware
from app.core.middleware.metrics import register_metrics_middleware

logger = logging.getLogger(__name__)


@asynccontextmanager
async def _lifespan(app: FastAPI):
    settings = get_settings()
    configure_logging(settings.log_level)
    logger.info(
        'API de planejamento iniciada. ambiente=%s limite_estados_produto=%s',
        settings.app_env,
        settings.max_api_product_states,
    )
    try:
        yield
    finally:
        logger.info('API de planejamento finalizada.')


def create_app() -> FastAPI:
    app = FastAPI(
        title='TopoPlanner',
        version='1.0.0',
        docs_url='/docs',
        redoc_url=None,
        openapi_url='/openapi.json',
        lifespan=_lifespan,
    )

    register_metrics_middleware(app)
    register_correlation_id_middleware(app)
    register_exception_handlers(app)
    app.include_router(api_v1_router)
    return app


app = create_app()
