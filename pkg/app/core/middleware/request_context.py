from __future__ import annotations

from contextvars import ContextVar

from fastapi import Request

_correlation_id: ContextVar[str] = ContextVar('correlation_id', default='')


def bind_correlation_id(value: str) -> None:
    _correlation_id.set(value)


def current_correlation_id() -> str:
    return _correlation_id.get()


def get_request_correlation_id(request: Request) -> str:
    return str(getattr(request.state, 'correlation_id', '')).strip() or current_correlation_id()
