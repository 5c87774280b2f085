"""Centralized exception handlers for the rig."""

from datetime import UTC, datetime
from typing import Any

import structlog
from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from apps.tester.core.exceptions import AppError, DomainError, UnknownKeyError, UnknownTargetError
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)


def _body(error: str, details: Any) -> dict[str, Any]:
    return {
        "error": error,
        "details": details,
        "timestamp": datetime.now(UTC).isoformat(),
    }


def register_exception_handlers(app: FastAPI) -> None:
    """Register all exception handlers.

    Args:
        app: FastAPI application instance
    """

    @app.exception_handler(UnknownKeyError)
    @app.exception_handler(UnknownTargetError)
    async def not_found_handler(request: Request, exc: DomainError) -> JSONResponse:
        """Unknown endpoint, VV key or fault target."""
        logger.warning(
            "resource_not_found",
            message=exc.message,
            details=exc.details,
            path=request.url.path,
        )
        return JSONResponse(
            status_code=status.HTTP_404_NOT_FOUND,
            content=_body(exc.message, exc.details),
        )

    @app.exception_handler(DomainError)
    async def domain_exception_handler(request: Request, exc: DomainError) -> JSONResponse:
        """Handle domain exceptions."""
        logger.warning(
            "domain_exception",
            error=exc.message,
            details=exc.details,
            path=request.url.path,
        )
        return JSONResponse(
            status_code=status.HTTP_400_BAD_REQUEST,
            content=_body(exc.message, exc.details),
        )

    @app.exception_handler(AppError)
    async def app_exception_handler(request: Request, exc: AppError) -> JSONResponse:
        """Handle general application exceptions."""
        logger.error(
            "application_error",
            message=exc.message,
            details=exc.details,
            path=request.url.path,
        )
        return JSONResponse(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            content=_body(
                exc.message if settings.is_development else "Internal server error",
                exc.details if settings.is_development else {},
            ),
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
        """Handle request validation errors."""
        logger.warning("validation_error", errors=exc.errors(), path=request.url.path)
        return JSONResponse(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            content=_body("Validation error", jsonable_errors(exc)),
        )

    @app.exception_handler(Exception)
    async def general_exception_handler(request: Request, exc: Exception) -> JSONResponse:
        """Handle unexpected exceptions."""
        logger.exception("unexpected_error", error=str(exc), path=request.url.path)
        return JSONResponse(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            content=_body("Internal server error", {}),
        )


def jsonable_errors(exc: RequestValidationError) -> list[dict[str, Any]]:
    """Validation errors without the non-serializable ``ctx`` payloads."""
    return [
        {key: value for key, value in error.items() if key in ("type", "loc", "msg")}
        for error in exc.errors()
    ]
