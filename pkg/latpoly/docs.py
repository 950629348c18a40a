from fastapi import Depends, FastAPI, Request
from fastapi.openapi.docs import get_swagger_ui_html
from fastapi.responses import JSONResponse

APP_DESCRIPTION = (
    "Conteo exacto de puntos de red en dilataciones reales de cross-polytopes y símplices, "
    "términos principales, transformadas de Fourier y barridos de discrepancia. "
    "Los barridos se persisten opcionalmente en Elasticsearch."
)

EXAMPLE_COUNT = {"count": 5, "boundary_hits": 4, "certified": True}

EXAMPLE_POLY = {
    "d": 2,
    "kind": "cross",
    "axes": ["1", "sqrt(2)"],
    "coefficients": [
        {"k": 0, "symbolic": {"a1^-1*a2": "1/3", "a1*a2^-1": "1/3"}, "decimal": "0.707106781186547524401", "width": "1e-76"},
        {"k": 1, "symbolic": {}, "decimal": "0", "width": "0"},
        {"k": 2, "symbolic": {"a1*a2": "2"}, "decimal": "2.82842712474619009760", "width": "1e-76"},
    ],
}

EXAMPLE_FOURIER = {"re": 0.0253, "im": -0.1591, "method": "residues", "error_bound": 1e-70}

EXAMPLE_EHRHART = {
    "axes": [1, 1, 1],
    "coefficients": ["1", "11/6", "1", "1/6"],
    "formula": "11/6",
    "interpolated": "11/6",
    "match": True,
}

HEALTH_EXAMPLE = {"status": "ok", "precision_bits": 256, "elasticsearch": False}


def register_docs_routes(app: FastAPI, auth_dependency):
    """Registra /docs y /openapi.json con la dependencia de auth indicada."""

    @app.get("/docs", include_in_schema=False)
    async def custom_swagger(request: Request, _=Depends(auth_dependency)):
        return get_swagger_ui_html(openapi_url="/openapi.json", title="latpoly docs")

    @app.get("/openapi.json", include_in_schema=False)
    async def custom_openapi(_=Depends(auth_dependency)):
        return JSONResponse(app.openapi())
