import asyncio
from contextlib import asynccontextmanager
from time import perf_counter

import structlog
from fastapi import FastAPI, Request

from app.poset import build_poset
from app.utils.config_loader import CONFIG

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")


async def track_metrics(request: Request, call_next):
    start_time = perf_counter()
    method = request.method
    endpoint = request.url.path

    try:
        response = await call_next(request)
        status = response.status_code
    except Exception as e:
        logger.error("Request failed", method=method, endpoint=endpoint, error=str(e))
        raise

    perf_logger.info(
        "Request served",
        method=method,
        endpoint=endpoint,
        status=status,
        latency=round(perf_counter() - start_time, 6)
    )
    return response


async def warm_posets():
    for n in CONFIG.get('WARM_POSET_N', []):
        try:
            await asyncio.to_thread(build_poset, n)
            logger.info("Poset cache warmed", n=n)
        except Exception as e:
            logger.error("Failed to warm poset cache", n=n, error=str(e))


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup: build the configured posets in the background
    task = asyncio.create_task(warm_posets())
    try:
        yield
    finally:
        task.cancel()
        try:
            await task
        except asyncio.CancelledError:
            pass
