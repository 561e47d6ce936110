from fastapi import APIRouter

from app.api.v1.routes.health import router as health_router
from app.api.v1.routes.metrics import router as metrics_router
from app.api.v1.routes.planning import router as planning_router

api_v1_router = APIRouter()
api_v1_router.include_router(planning_router)
api_v1_router.include_router(health_router)
api_v1_router.include_router(metrics_router)
