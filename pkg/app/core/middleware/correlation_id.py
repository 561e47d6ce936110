from __future__ import annotations

import uuid

from fastapi import FastAPI, Request

from app.core.middleware.request_context import bind_correlation_id

MAX_CORRELATION_ID_LENGTH = 128


def register_correlation_id_middleware(app: FastAPI) -> None:
    @app.middleware('http')
    async def _correlation_id_middleware(request: Request, call_next):
        incoming = str(request.headers.get('X-Correlation-Id', '')).strip()
        correlation_id = incoming[:MAX_CORRELATION_ID_LENGTH] if incoming else uuid.uuid4().hex
        request.state.correlation_id = correlation_id
        bind_correlation_id(correlation_id)
        response = await call_next(request)
        response.headers['X-Correlation-Id'] = correlation_id
        return response
