"""FastAPI application factory for the simulated rig.

The rig is a gateway web server in front of a simulated CAN bus and a
Virtual Vehicle state table. One app instance owns one RigState.
"""

from collections.abc import AsyncGenerator
from contextlib import asynccontextmanager

import structlog
from fastapi import FastAPI

from apps.rig.api.exception_handlers import register_exception_handlers
from apps.rig.api.health import health_router
from apps.rig.api.middlewares import LoggingMiddleware, RequestIDMiddleware
from apps.rig.gateway import Gateway
from apps.rig.models import RigConfig
from apps.rig.routers import admin, gateway
from apps.rig.state import RigState
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    state: RigState = app.state.rig
    logger.info(
        "rig_starting",
        endpoints=len(state.config.endpoints),
        signals=len(state.config.vv_bindings),
        faults=len(state.config.faults),
    )
    yield
    logger.info("rig_stopped", frames=len(state.trace()))


def create_rig_app(config: RigConfig) -> FastAPI:
    """Create and configure the rig application.

    Args:
        config: Gateway and VV configuration

    Returns:
        FastAPI: Configured application; its RigState is ``app.state.rig``

    Raises:
        UnknownTargetError: A configured fault names an unknown target
    """
    state = RigState(config)

    app = FastAPI(
        title="Vehicle Rig",
        version=settings.APP_VERSION,
        description="Simulated vehicle gateway with CAN bus and Virtual Vehicle state",
        lifespan=lifespan,
        docs_url=None,
        redoc_url=None,
    )
    app.state.rig = state
    app.state.gateway = Gateway(state)

    # Middleware (last added runs first)
    app.add_middleware(LoggingMiddleware)
    app.add_middleware(RequestIDMiddleware)

    register_exception_handlers(app)

    # Routers; the gateway catch-all must come last
    app.include_router(health_router, tags=["Health"])
    app.include_router(admin.router)
    app.include_router(gateway.router)

    return app
