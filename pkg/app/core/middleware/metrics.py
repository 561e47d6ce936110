from __future__ import annotations

import logging
import time

from fastapi import FastAPI, Request

from app.core.config.settings import get_settings
from app.infrastructure.monitoring.prometheus import (
    http_inflight_requests,
    http_request_duration_seconds,
    http_requests_total,
    status_class_from_code,
)

logger = logging.getLogger(__name__)


def _route_path(request: Request) -> str:
    route = request.scope.get('route')
    if route is not None and hasattr(route, 'path'):
        return str(route.path)
    return request.url.path


def register_metrics_middleware(app: FastAPI) -> None:
    @app.middleware('http')
    async def _metrics_middleware(request: Request, call_next):
        enabled = get_settings().prometheus_metrics_enabled
        started_at = time.perf_counter()
        status_code = 500
        if enabled:
            http_inflight_requests.inc()
        try:
            response = await call_next(request)
            status_code = int(response.status_code)
            duration_ms = int(max(time.perf_counter() - started_at, 0.0) * 1000)
            response.headers['X-Request-Duration-Ms'] = str(duration_ms)
            return response
        finally:
            duration_seconds = max(time.perf_counter() - started_at, 0.0)
            path = _route_path(request)
            if enabled:
                http_inflight_requests.dec()
                http_requests_total.labels(
                    method=request.method,
                    path=path,
                    status_class=status_class_from_code(status_code),
                ).inc()
                http_request_duration_seconds.labels(method=request.method, path=path).observe(duration_seconds)
            logger.info(
                'Requisicao HTTP concluida. metodo=%s caminho=%s status=%s duracao_ms=%.1f',
                request.method,
                request.url.path,
                status_code,
                duration_seconds * 1000.0,
            )
