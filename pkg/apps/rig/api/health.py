"""Health check endpoint."""

from datetime import UTC, datetime

from fastapi import APIRouter

from apps.tester.constants import HEALTH_PATH
from apps.tester.settings import settings

health_router = APIRouter()


@health_router.get(HEALTH_PATH)
async def health_check() -> dict:
    """Basic health check, polled by the launcher and the executor.

    Returns:
        dict: Health status and rig info
    """
    return {
        "status": "healthy",
        "service": "vehicle-rig",
        "version": settings.APP_VERSION,
        "timestamp": datetime.now(UTC).isoformat(),
    }
