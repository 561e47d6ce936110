from __future__ import annotations

import logging
import re

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.core.errors.http_exceptions import ApiValidationError
from app.domain.exceptions import DomainError
from app.infrastructure.monitoring.prometheus import bounded_exception_type, http_exceptions_total

logger = logging.getLogger(__name__)

_CAMEL_RE = re.compile(r'(?<!^)(?=[A-Z])')
MAX_ERROR_LENGTH = 500


def error_code_for(exc: Exception) -> str:
    return _CAMEL_RE.sub('_', exc.__class__.__name__).upper()


def _correlation_id(request: Request) -> str:
    return str(getattr(request.state, 'correlation_id', '')).strip() or 'sem-correlation-id'


def _count(request: Request, exc: Exception) -> None:
    http_exceptions_total.labels(
        method=request.method,
        path=request.url.path,
        exception_type=bounded_exception_type(exc.__class__.__name__),
    ).inc()


def register_exception_handlers(app: FastAPI) -> None:
    @app.exception_handler(ApiValidationError)
    async def _api_validation_handler(request: Request, exc: ApiValidationError):
        _count(request, exc)
        return JSONResponse(
            status_code=exc.status_code,
            content={'error': exc.error, 'code': exc.code, 'correlation_id': _correlation_id(request)},
        )

    @app.exception_handler(DomainError)
    async def _domain_error_handler(request: Request, exc: DomainError):
        _count(request, exc)
        message = str(exc)[:MAX_ERROR_LENGTH] or 'Erro de dominio sem detalhes.'
        logger.warning(
            'Requisicao rejeitada pelo dominio. correlation_id=%s tipo_erro=%s motivo=%s',
            _correlation_id(request),
            exc.__class__.__name__,
            message,
        )
        return JSONResponse(
            status_code=422,
            content={'error': message, 'code': error_code_for(exc), 'correlation_id': _correlation_id(request)},
        )

    @app.exception_handler(Exception)
    async def _unexpected_error_handler(request: Request, exc: Exception):
        _count(request, exc)
        correlation_id = _correlation_id(request)
        logger.exception(
            'Falha interna no processamento da requisicao. correlation_id=%s tipo_erro=%s',
            correlation_id,
            exc.__class__.__name__,
        )
        return JSONResponse(
            status_code=500,
            content={
                'error': 'Falha interna no processamento da requisicao.',
                'code': 'INTERNAL_ERROR',
                'correlation_id': correlation_id,
            },
        )
