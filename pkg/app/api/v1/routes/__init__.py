from app.api.v1.routes.health import router as health_router
from app.api.v1.routes.metrics import router as metrics_router
from app.api.v1.routes.planning import router as planning_router

__all__ = ['health_router', 'metrics_router', 'planning_router']
