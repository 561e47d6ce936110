from __future__ import annotations

from fastapi import Request

from app.core.config.settings import Settings, get_settings
from app.core.middleware.request_context import get_request_correlation_id


def get_correlation_id(request: Request) -> str:
    return get_request_correlation_id(request)


def get_planner_settings() -> Settings:
    return get_settings()
