from __future__ import annotations

import logging

from app.core.middleware.request_context import current_correlation_id

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s %(message)s'


class CorrelationIdFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.correlation_id = current_correlation_id() or '-'
        return True


def _resolve_level(level: str | int) -> int:
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).strip().upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def configure_logging(level: str | int = 'INFO') -> None:
    root_logger = logging.getLogger()
    if root_logger.handlers:
        root_logger.setLevel(_resolve_level(level))
        return
    logging.basicConfig(level=_resolve_level(level), format=LOG_FORMAT)
    for handler in root_logger.handlers:
        handler.addFilter(CorrelationIdFilter())
