"""Global error handling middleware."""

import asyncio
import traceback

from fastapi import Request, status
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from src.errors import DomainError, ObstructionError
from src.logger import setup_logger
from backend.app.services.obstruction_service import ServiceBusyError

logger = setup_logger(__name__)


async def http_exception_handler(request: Request, exc: StarletteHTTPException):
    """Handle HTTP exceptions."""
    logger.warning(f"HTTP {exc.status_code}: {exc.detail} - Path: {request.url.path}")
    return JSONResponse(
        status_code=exc.status_code,
        content={
            "error": exc.detail,
            "status_code": exc.status_code,
            "path": str(request.url.path)
        }
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Handle validation errors."""
    logger.warning(f"Validation error on {request.url.path}: {exc.errors()}")
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={
            "error": "Validation error",
            "details": [
                {"loc": list(e.get("loc", ())), "msg": e.get("msg", ""), "type": e.get("type", "")}
                for e in exc.errors()
            ],
            "path": str(request.url.path)
        }
    )


def _engine_error_response(request: Request, exc: ObstructionError, status_code: int) -> JSONResponse:
    return JSONResponse(
        status_code=status_code,
        content={
            "error": type(exc).__name__,
            "message": str(exc),
            "status_code": status_code,
            "path": str(request.url.path)
        }
    )


async def domain_error_handler(request: Request, exc: DomainError):
    """Input outside an operation's domain."""
    logger.warning(f"{type(exc).__name__} on {request.url.path}: {exc}")
    return _engine_error_response(request, exc, status.HTTP_422_UNPROCESSABLE_ENTITY)


async def obstruction_error_handler(request: Request, exc: ObstructionError):
    """Engine failures on well-formed input (non-ring maps, oracle mismatches, ...)."""
    logger.error(f"{type(exc).__name__} on {request.url.path}: {exc}")
    return _engine_error_response(request, exc, status.HTTP_409_CONFLICT)


async def timeout_handler(request: Request, exc: asyncio.TimeoutError):
    logger.error(f"Computation timed out on {request.url.path}")
    return JSONResponse(
        status_code=status.HTTP_504_GATEWAY_TIMEOUT,
        content={
            "error": "Computation timed out",
            "status_code": status.HTTP_504_GATEWAY_TIMEOUT,
            "path": str(request.url.path)
        }
    )


async def busy_handler(request: Request, exc: ServiceBusyError):
    logger.warning(f"Rejected {request.url.path}: {exc}")
    return JSONResponse(
        status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
        content={
            "error": "Engine busy",
            "message": str(exc),
            "status_code": status.HTTP_503_SERVICE_UNAVAILABLE,
            "path": str(request.url.path)
        },
        headers={"Retry-After": "5"},
    )


async def general_exception_handler(request: Request, exc: Exception):
    """Handle general exceptions."""
    logger.error(f"Unhandled exception on {request.url.path}: {str(exc)}")
    logger.error(traceback.format_exc())

    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={
            "error": "Internal server error",
            "message": str(exc),
            "path": str(request.url.path)
        }
    )
