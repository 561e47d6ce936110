from app.api.v1.dependencies.request_context import get_correlation_id
from app.api.v1.dependencies.request_context import get_planner_settings

__all__ = ['get_correlation_id', 'get_planner_settings']
