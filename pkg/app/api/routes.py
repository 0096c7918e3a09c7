import asyncio

from fastapi import APIRouter, Depends, Query
from typing import List, Optional
from app.api.models import (
    CompareResponse,
    ConfigResponse,
    ElementsResponse,
    HasseResponse,
    HealthCheckResponse,
    IntervalResponse,
    MobiusResponse,
    PolysResponse,
    SuiteReport,
    VerifyRequest,
    ZetaResponse,
)
from app.services.infra_service import InfraService
from app.services.poset_service import PosetService
from app.services.verification_service import VerificationService

router = APIRouter()

# Service calls are CPU-bound and run in worker threads, off the event loop.

ERROR_RESPONSES = {
    400: {"description": "Invalid element or parameter"},
    413: {"description": "Request exceeds a configured size guard"},
    422: {"description": "Validation error for request parameters"},
    500: {"description": "Internal server error"}
}


def get_poset_service():
    return PosetService()


def get_verification_service():
    return VerificationService()


def get_infra_service():
    return InfraService()


@router.get(
    "/elements",
    response_model=ElementsResponse,
    tags=["poset"],
    responses=ERROR_RESPONSES,
    summary="Enumerate PF_n",
    description="Returns the elements of PF_n in one-line notation, lexicographically ordered, "
                "optionally restricted to a given number of arcs."
)
async def get_elements(
    n: int = Query(..., ge=0, description="Matrix size"),
    arcs: Optional[int] = Query(None, ge=0, description="Arc count filter"),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.enumerate, n, arcs)


@router.get(
    "/hasse",
    response_model=HasseResponse,
    response_model_exclude_none=True,
    tags=["poset"],
    responses=ERROR_RESPONSES,
    summary="Hasse diagram",
    description=(
        "Cover edges (child, parent) as indices into `elements`.\n\n"
        "### Parameters\n"
        "- **labels**: attach the EL label `(a, b)` and move type (`c`, `rs`, `rr`) to each edge\n"
        "- **highlight**: mark the edges of the increasing chain from bottom to top\n"
    )
)
async def get_hasse(
    n: int = Query(..., ge=0),
    labels: bool = Query(False),
    highlight: bool = Query(False),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.hasse, n, labels=labels, highlight=highlight)


@router.get(
    "/compare",
    response_model=CompareResponse,
    tags=["poset"],
    responses=ERROR_RESPONSES,
    summary="Compare two elements"
)
async def get_compare(
    n: int = Query(..., ge=0),
    x: str = Query(..., description="One-line notation, e.g. 2,1,0,0"),
    y: str = Query(..., description="One-line notation, e.g. 3,4,1,2"),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.compare, n, x, y)


@router.get(
    "/interval",
    response_model=IntervalResponse,
    response_model_exclude_none=True,
    tags=["poset"],
    responses=ERROR_RESPONSES,
    summary="Members of an interval [x, y]"
)
async def get_interval(
    n: int = Query(..., ge=0),
    x: str = Query(...),
    y: str = Query(...),
    check_el: bool = Query(False, description="Also verify the EL conditions on the interval"),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.interval, n, x, y, check_el=check_el)


@router.get(
    "/mobius",
    response_model=MobiusResponse,
    tags=["poset"],
    responses=ERROR_RESPONSES,
    summary="Möbius function",
    description="μ(x, y); defaults to the minimum and maximum of PF_n."
)
async def get_mobius(
    n: int = Query(..., ge=0),
    x: Optional[str] = Query(None),
    y: Optional[str] = Query(None),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.mobius, n, x, y)


@router.get(
    "/polys",
    response_model=PolysResponse,
    tags=["qseries"],
    responses=ERROR_RESPONSES,
    summary="Length generating functions",
    description="Rows for each arc count k, followed by the total over all k (k = `*`)."
)
async def get_polys(
    n: int = Query(..., ge=0),
    k: Optional[int] = Query(None),
    check: Optional[str] = Query(None, description="closed, recurrence or all"),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.polys, n, k, check)


@router.get(
    "/zeta",
    response_model=ZetaResponse,
    response_model_exclude_none=True,
    tags=["qseries"],
    responses=ERROR_RESPONSES,
    summary="Alternating-matrix counts over F_q",
    description="Counts by rank from the closed formula; with `oracle=true`, also by exhaustive census."
)
async def get_zeta(
    n: int = Query(..., ge=0),
    q: int = Query(..., ge=2),
    oracle: bool = Query(False),
    service: PosetService = Depends(get_poset_service)
):
    return await asyncio.to_thread(service.zeta, n, q, oracle)


@router.post(
    "/verify",
    response_model=List[SuiteReport],
    tags=["verify"],
    responses=ERROR_RESPONSES,
    summary="Run verification suites",
    description="Runs `grading`, `length`, `el`, `topology`, `qseries` or `all` and returns one envelope per suite."
)
async def post_verify(request: VerifyRequest, service: VerificationService = Depends(get_verification_service)):
    service.force = request.force
    return await asyncio.to_thread(service.run, request.n, request.suite)


@router.get(
    "/health",
    response_model=HealthCheckResponse,
    tags=["health"],
    summary="Check API health"
)
async def health_check(service: InfraService = Depends(get_infra_service)):
    return service.health_check()


@router.get(
    "/config",
    response_model=ConfigResponse,
    tags=["config"],
    summary="Size guards and version"
)
async def get_config(service: InfraService = Depends(get_infra_service)):
    return service.get_config()
