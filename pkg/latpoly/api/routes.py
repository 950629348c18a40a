import logging
import uuid
from typing import Any, Dict, List

from fastapi import APIRouter, Depends, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address
from starlette.concurrency import run_in_threadpool

from ..core.config import settings
from ..core.errors import InsufficientData, LatpolyError
from ..core.security import client_ip, require_api_key
from ..counting import count_brute_force, count_cross
from ..docs import EXAMPLE_COUNT, EXAMPLE_EHRHART, EXAMPLE_FOURIER, EXAMPLE_POLY, HEALTH_EXAMPLE
from ..ehrhart import ehrhart_report
from ..elastic import persist_records_to_elastic
from ..fourier import METHOD_RESIDUES, ft_cross, ft_simplex
from ..mainterm import build_p, build_q, polynomial_report
from ..models import (
    CountResult,
    EhrhartReport,
    FourierResult,
    PolynomialReport,
    SweepRequest,
    SweepResponse,
)
from ..poisson import cesaro_decomposition
from ..polytope import (
    AxisLengths,
    CornerSimplex,
    CrossPolytope,
    GeneralSimplex,
    parse_dilation,
    parse_point,
    parse_polytope,
    to_spec,
)
from ..sweep import SweepConfig, count_polytope, fit_exponent, scan_discrepancy

limiter = Limiter(
    key_func=lambda request: client_ip(request) or get_remote_address(request),
    default_limits=[settings.rate_limit],
    storage_uri=settings.rate_limit_storage_uri or "memory://",
)

router = APIRouter()
logger = logging.getLogger("latpoly.api")


def _bounded_t(text: str):
    t = parse_dilation(text)
    if t.compare(settings.api_max_t) > 0:
        raise HTTPException(status_code=422, detail="t supera API_MAX_T=%d" % settings.api_max_t)
    return t


@router.get(
    "/health",
    tags=["meta"],
    summary="Comprobar estado del servicio",
    responses={200: {"description": "Estado OK", "content": {"application/json": {"example": HEALTH_EXAMPLE}}}},
)
@limiter.limit("10/minute")
async def health(request: Request, _: None = Depends(require_api_key)) -> Dict[str, Any]:
    return {
        "status": "ok",
        "precision_bits": settings.precision_bits,
        "elasticsearch": request.app.state.es_client is not None,
    }


@router.get(
    "/count",
    tags=["counting"],
    summary="Conteo exacto de puntos de red",
    description="Cuenta |tP ∩ Z^d| con la frontera incluida; `brute_force` usa la enumeración de la caja.",
    responses={200: {"description": "Conteo", "content": {"application/json": {"example": EXAMPLE_COUNT}}}},
)
@limiter.limit("30/minute")
def count(
    request: Request,
    polytope: str = Query(..., examples=["cross d=2 a=[1, 1]"]),
    t: str = Query(..., examples=["1"]),
    brute_force: bool = False,
    _: None = Depends(require_api_key),
) -> CountResult:
    parsed = parse_polytope(polytope)
    dilation = _bounded_t(t)
    if brute_force:
        if not isinstance(parsed, (CrossPolytope, CornerSimplex)):
            raise HTTPException(status_code=422, detail="brute_force solo admite cross y simplex")
        return count_brute_force(parsed, dilation)
    return count_polytope(parsed, dilation)


@router.get(
    "/poly",
    tags=["mainterm"],
    summary="Coeficientes del término principal",
    responses={200: {"description": "Coeficientes", "content": {"application/json": {"example": EXAMPLE_POLY}}}},
)
@limiter.limit("30/minute")
def poly(
    request: Request,
    axes: str = Query(..., examples=["[1, sqrt(2)]"]),
    kind: str = Query("cross", pattern="^(cross|simplex)$"),
    digits: int = Query(30, ge=1, le=200),
    _: None = Depends(require_api_key),
) -> PolynomialReport:
    lengths = AxisLengths.parse(axes)
    built = build_p(lengths) if kind == "cross" else build_q(lengths)
    return polynomial_report(built, digits)


@router.get(
    "/fourier",
    tags=["fourier"],
    summary="Transformada de Fourier de un símplice dilatado",
    responses={200: {"description": "Valor", "content": {"application/json": {"example": EXAMPLE_FOURIER}}}},
)
@limiter.limit("30/minute")
def fourier(
    request: Request,
    simplex: str = Query(..., examples=["standard d=2"]),
    y: str = Query(..., examples=["[1, 2]"]),
    t: str = Query(..., examples=["3/2"]),
    method: str = METHOD_RESIDUES,
    tol: float = Query(1e-10, gt=0),
    _: None = Depends(require_api_key),
) -> FourierResult:
    parsed = parse_polytope(simplex)
    point = parse_point(y)
    dilation = _bounded_t(t)
    if isinstance(parsed, CrossPolytope):
        result = ft_cross(parsed.axes, point, dilation)
    else:
        if isinstance(parsed, CornerSimplex):
            parsed = parsed.as_general()
        if not isinstance(parsed, GeneralSimplex):
            raise HTTPException(status_code=422, detail="se necesita un símplice o un cross-polytope")
        result = ft_simplex(parsed, point, dilation, method=method, tol=tol)
    return FourierResult(**result.as_dict())


@router.get(
    "/cesaro",
    tags=["poisson"],
    summary="Media de Cesàro y serie de error E_N(t)",
)
@limiter.limit("10/minute")
def cesaro(
    request: Request,
    axes: str = Query(..., examples=["[sqrt(2), sqrt(3)]"]),
    t: str = Query(..., examples=["5"]),
    N: int = Query(..., gt=1),
    _: None = Depends(require_api_key),
) -> Dict[str, Any]:
    if N > settings.api_max_n:
        raise HTTPException(status_code=422, detail="N supera API_MAX_N=%d" % settings.api_max_n)
    lengths = AxisLengths.parse(axes)
    dilation = _bounded_t(t)
    parts = cesaro_decomposition(lengths, dilation, N)
    exact = count_cross(CrossPolytope(lengths), dilation).count
    return {"N": N, "ces": parts.ces, "count": exact, "error_series": parts.error_series, "gap": parts.ces - exact}


@router.get(
    "/ehrhart",
    tags=["ehrhart"],
    summary="Polinomio de Ehrhart de un símplice de esquina entero",
    responses={200: {"description": "Polinomio", "content": {"application/json": {"example": EXAMPLE_EHRHART}}}},
)
@limiter.limit("30/minute")
def ehrhart(
    request: Request,
    axes: List[int] = Query(..., examples=[[1, 1, 1]]),
    _: None = Depends(require_api_key),
) -> EhrhartReport:
    if max(axes, default=0) * len(axes) > settings.api_max_t:
        raise HTTPException(status_code=422, detail="ejes demasiado grandes")
    return ehrhart_report(axes)


@router.post(
    "/scan",
    tags=["sweep"],
    summary="Barrido de discrepancia Δ(t)",
    description="Cuenta y evalúa el término principal en la malla; persiste en Elasticsearch si está activo.",
)
@limiter.limit("5/minute")
async def scan(request: Request, body: SweepRequest, _: None = Depends(require_api_key)) -> SweepResponse:
    cfg = SweepConfig.from_request(body)
    if cfg.t_stop > settings.api_max_t:
        raise HTTPException(status_code=422, detail="t_stop supera API_MAX_T=%d" % settings.api_max_t)
    records = await run_in_threadpool(scan_discrepancy, cfg, 1)
    try:
        fit = fit_exponent(records)
    except InsufficientData:
        fit = None
    polytope = parse_polytope(cfg.polytope)
    run_id = str(uuid.uuid4())
    persisted = await persist_records_to_elastic(
        request.app.state.es_client, settings, run_id, to_spec(polytope), polytope.d, records
    )
    return SweepResponse(run_id=run_id, polytope=to_spec(polytope), records=records, fit=fit, persisted=persisted)


def register_exception_handlers(app):
    app.state.limiter = limiter

    async def rate_limit_handler(request, exc):
        logger.warning(
            "Rate limit exceeded: %s %s client=%s",
            request.method,
            request.url.path,
            client_ip(request),
        )
        return _rate_limit_exceeded_handler(request, exc)

    async def latpoly_error_handler(request: Request, exc: Exception) -> JSONResponse:
        logger.info("%s en %s: %s", type(exc).__name__, request.url.path, exc)
        return JSONResponse(status_code=422, content={"detail": "%s: %s" % (type(exc).__name__, exc)})

    app.add_exception_handler(RateLimitExceeded, rate_limit_handler)
    app.add_exception_handler(LatpolyError, latpoly_error_handler)
    app.add_exception_handler(ValueError, latpoly_error_handler)
