from __future__ import annotations

from fastapi import APIRouter, Response, status
from prometheus_client import CONTENT_TYPE_LATEST, generate_latest

from app.core.config.settings import get_settings

router = APIRouter(tags=['system'])


@router.get('/metrics')
def metrics() -> Response:
    if not get_settings().prometheus_metrics_enabled:
        return Response(status_code=status.HTTP_404_NOT_FOUND)
    return Response(content=generate_latest(), media_type=CONTENT_TYPE_LATEST)
