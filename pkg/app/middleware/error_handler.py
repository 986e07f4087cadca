"""Error handling middleware"""

from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException
import logging
import traceback

from app.config import settings
from app.models.common import ErrorResponse
from app.core.exceptions import (
    BudgetExceededError,
    ConsistencyError,
    HankelRankError,
    NotFoundError,
    ShapeError,
    UnsupportedError,
)

logger = logging.getLogger(__name__)


def domain_status(exc: HankelRankError) -> int:
    """HTTP status for a library exception"""
    if isinstance(exc, NotFoundError):
        return status.HTTP_404_NOT_FOUND
    if isinstance(exc, ShapeError):
        return status.HTTP_400_BAD_REQUEST
    if isinstance(exc, BudgetExceededError):
        return status.HTTP_413_REQUEST_ENTITY_TOO_LARGE
    if isinstance(exc, UnsupportedError):
        return status.HTTP_422_UNPROCESSABLE_ENTITY
    return status.HTTP_500_INTERNAL_SERVER_ERROR


def domain_details(exc: HankelRankError) -> dict:
    if isinstance(exc, NotFoundError):
        return {"known": exc.known}
    if isinstance(exc, BudgetExceededError):
        return {"needed_bits": exc.needed_bits, "budget": exc.budget}
    if isinstance(exc, UnsupportedError):
        return {"frontier": None if exc.frontier is None else list(exc.frontier)}
    return {}


def error_reply(code: int, message: str, details=None) -> JSONResponse:
    body = ErrorResponse(message=message, status_code=code, details=details)
    return JSONResponse(status_code=code, content=body.model_dump(mode="json"))


def setup_exception_handlers(app: FastAPI):
    """Setup custom exception handlers for the application"""

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        """Handle HTTP exceptions"""
        logger.error(f"HTTP error: {exc.status_code} - {exc.detail}")
        return error_reply(exc.status_code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(request: Request, exc: RequestValidationError):
        """Handle validation errors"""
        logger.error(f"Validation error: {exc.errors()}")
        return error_reply(status.HTTP_422_UNPROCESSABLE_ENTITY, "Validation error", jsonable_errors(exc))

    @app.exception_handler(HankelRankError)
    async def domain_exception_handler(request: Request, exc: HankelRankError):
        """Map library errors onto status codes"""
        code = domain_status(exc)
        if isinstance(exc, ConsistencyError):
            logger.error(f"Consistency failure: {exc}")
        else:
            logger.warning(f"{type(exc).__name__}: {exc}")
        return error_reply(code, str(exc), domain_details(exc))

    @app.exception_handler(Exception)
    async def general_exception_handler(request: Request, exc: Exception):
        """Handle all other exceptions"""
        logger.error(f"Unhandled exception: {str(exc)}")
        logger.error(traceback.format_exc())

        return error_reply(
            status.HTTP_500_INTERNAL_SERVER_ERROR,
            "Internal server error",
            str(exc) if settings.DEBUG else None,
        )


def jsonable_errors(exc: RequestValidationError) -> list:
    # ctx may carry the raw exception object
    return [{key: value for key, value in error.items() if key != "ctx"} for error in exc.errors()]
