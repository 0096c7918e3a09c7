from fastapi import HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
import structlog
from starlette.requests import Request

logger = structlog.get_logger(__name__)


class PosetError(Exception):
    """Base class for every domain error raised by the engine."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidElementError(PosetError):
    """One-line input that is not a partial fixed-point-free involution."""


class InvalidParameterError(PosetError):
    """A size, arc count, prime or suite outside the supported range."""


class NotComparableError(PosetError):
    """An interval or Möbius value was requested for x ≰ y."""


class SizeGuardError(PosetError):
    """The request exceeds a configured enumeration bound."""


class CoverClassificationError(PosetError):
    """A Hasse edge matched no move pattern, or its rise was ambiguous."""


class InvalidMoveError(PosetError):
    """A covering transformation was applied outside its precondition."""


class InexactDivisionError(PosetError):
    """Polynomial division left a nonzero remainder."""


def _request_context(request: Request) -> dict:
    return {
        "url": str(request.url) if isinstance(request, Request) else "Unknown",
        "method": request.method if isinstance(request, Request) else "Unknown",
    }


async def generic_exception_handler(request: Request, exc: Exception):
    logger.error("Unhandled error", exc_info=exc, **_request_context(request))
    return JSONResponse(
        status_code=500,
        content={"detail": "Internal server error"}
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.warning("Validation error", errors=exc.errors(), **_request_context(request))
    return JSONResponse(
        status_code=422,
        content={"detail": [str(error) for error in exc.errors()]}
    )


async def http_exception_handler(request: Request, exc: HTTPException):
    logger.warning("HTTP error", status_code=exc.status_code, detail=exc.detail, **_request_context(request))
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": str(exc.detail)}
    )


async def poset_error_handler(request: Request, exc: PosetError):
    logger.warning("Rejected request", error=type(exc).__name__, detail=exc.detail, **_request_context(request))
    return JSONResponse(
        status_code=400,
        content={"detail": exc.detail}
    )


async def size_guard_handler(request: Request, exc: SizeGuardError):
    logger.warning("Size guard refused request", detail=exc.detail, **_request_context(request))
    return JSONResponse(
        status_code=413,
        content={"detail": exc.detail}
    )


# Dictionary to register handlers with FastAPI
exception_handlers = {
    Exception: generic_exception_handler,
    RequestValidationError: validation_exception_handler,
    HTTPException: http_exception_handler,
    PosetError: poset_error_handler,
    SizeGuardError: size_guard_handler
}
