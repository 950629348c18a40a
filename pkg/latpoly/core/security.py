import logging
import secrets
import time
import uuid
from itertools import count
from typing import Awaitable, Callable, Optional

from fastapi import Depends, HTTPException, Request
from fastapi.security import APIKeyHeader

from .config import settings

logger = logging.getLogger("latpoly.http")

api_key_header = APIKeyHeader(name=settings.api_key_header, auto_error=False)


def require_api_key(api_key: Optional[str] = Depends(api_key_header)) -> None:
    """Exige la API key en todas las rutas salvo que API_KEY_REQUIRED=false sin clave configurada."""
    if not settings.api_key:
        if settings.api_key_required:
            raise HTTPException(status_code=401, detail="Unauthorized")
        return
    if not api_key or not secrets.compare_digest(api_key.encode(), settings.api_key.encode()):
        raise HTTPException(status_code=401, detail="Unauthorized")


def client_ip(request: Request) -> str:
    if settings.trust_x_forwarded_for:
        # primer salto de X-Forwarded-For: cliente original
        forwarded = request.headers.get("X-Forwarded-For", "").split(",")[0].strip()
        if forwarded:
            return forwarded
    return request.client.host if request.client else ""


def _describe(request: Request) -> str:
    query = request.url.query
    return "%s %s?%s" % (request.method, request.url.path, query) if query else "%s %s" % (request.method, request.url.path)


def log_requests_middleware(app):
    """Registra cada petición como REQ#n con su duración; avisa si el cálculo supera API_SLOW_MS."""
    request_counter = count(1)

    @app.middleware("http")
    async def log_requests(request: Request, call_next: Callable[[Request], Awaitable]):
        request_id = request.headers.get("X-Request-ID") or uuid.uuid4().hex
        started = time.perf_counter()
        try:
            response = await call_next(request)
        except Exception:
            logger.exception("Cálculo fallido %s rid=%s", _describe(request), request_id)
            raise
        elapsed_ms = (time.perf_counter() - started) * 1000
        response.headers["X-Request-ID"] = request_id
        response.headers["X-Elapsed-Ms"] = "%.2f" % elapsed_ms
        level = logging.WARNING if elapsed_ms > settings.api_slow_ms else logging.INFO
        logger.log(
            level,
            "REQ#%d %s -> %s (%.2fms) client=%s rid=%s",
            next(request_counter),
            _describe(request),
            response.status_code,
            elapsed_ms,
            client_ip(request),
            request_id,
        )
        return response

    return log_requests
