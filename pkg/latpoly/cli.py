"""Línea de comandos: ``python -m latpoly <subcomando>``."""

import argparse
import asyncio
import csv
import json
import logging
import sys
import uuid
from typing import List, Optional, Sequence

from .campaigns import CAMPAIGNS, report
from .core.config import settings
from .core.errors import EXIT_CONFIG_ERROR, EXIT_OK, InsufficientData, LatpolyError
from .counting import count_brute_force, count_cross
from .diophantine import product_sum_table
from .ehrhart import ehrhart_report
from .elastic import persist_sweep
from .fourier import METHOD_CLOSED, METHOD_CONTOUR, METHOD_DIRECT, METHOD_RESIDUES, ft_cross, ft_simplex
from .mainterm import build_p, build_q, polynomial_report
from .models import FourierResult
from .poisson import cesaro_decomposition
from .polytope import (
    AxisLengths,
    CornerSimplex,
    CrossPolytope,
    GeneralSimplex,
    parse_dilation,
    parse_point,
    parse_polytope,
    to_spec,
)
from .scalar import parse_scalar_list
from .sweep import SweepConfig, count_polytope, fit_exponent, scan_discrepancy, write_records

logger = logging.getLogger("latpoly.cli")


def _emit_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.replace("[", "").replace("]", "").split(",") if item.strip()]


def _cmd_count(args: argparse.Namespace) -> int:
    polytope = parse_polytope(args.polytope)
    t = parse_dilation(args.t)
    if args.brute_force:
        if not isinstance(polytope, (CrossPolytope, CornerSimplex)):
            raise ValueError("--brute-force solo admite cross y simplex/corner")
        result = count_brute_force(polytope, t)
    else:
        result = count_polytope(polytope, t)
    _emit_json(result.model_dump())
    return EXIT_OK


def _cmd_poly(args: argparse.Namespace) -> int:
    axes = AxisLengths.parse(args.axes)
    poly = build_p(axes) if args.kind == "cross" else build_q(axes)
    _emit_json(polynomial_report(poly, args.digits).model_dump())
    return EXIT_OK


def _cmd_fourier(args: argparse.Namespace) -> int:
    polytope = parse_polytope(args.simplex)
    y = parse_point(args.y)
    t = parse_dilation(args.t)
    if isinstance(polytope, CrossPolytope):
        result = ft_cross(polytope.axes, y, t)
    else:
        if isinstance(polytope, CornerSimplex):
            polytope = polytope.as_general()
        if not isinstance(polytope, GeneralSimplex):
            raise ValueError("fourier necesita un símplice o un cross-polytope")
        result = ft_simplex(polytope, y, t, method=args.method, tol=args.tol)
    _emit_json(FourierResult(**result.as_dict()).model_dump())
    return EXIT_OK


def _cmd_cesaro(args: argparse.Namespace) -> int:
    axes = AxisLengths.parse(args.axes)
    t = parse_dilation(args.t)
    count = count_cross(CrossPolytope(axes), t).count
    rows = []
    for N in _int_list(args.N):
        parts = cesaro_decomposition(axes, t, N)
        rows.append([N, repr(parts.ces), count, repr(parts.error_series), repr(parts.ces - count)])
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["N", "Ces", "count", "E_N", "gap"])
    writer.writerows(rows)
    return EXIT_OK


def _cmd_dioph(args: argparse.Namespace) -> int:
    alphas = parse_scalar_list(args.alphas)
    checkpoints = _int_list(args.checkpoints) if args.checkpoints else None
    table = product_sum_table(alphas, args.m_max, checkpoints)
    header = ["M", "S", "L_M"]
    rows = [[r.M, repr(r.S), repr(r.L)] for r in table.rows]
    fit = table.fit.model_dump() if table.fit else None
    if args.output:
        with open(args.output + ".csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        with open(args.output + ".json", "w", encoding="utf-8") as handle:
            json.dump(fit, handle, indent=2, sort_keys=True)
            handle.write("\n")
        logger.info("Tabla escrita en %s.csv y %s.json", args.output, args.output)
        return EXIT_OK
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    sys.stdout.write("\n")
    _emit_json(fit)
    return EXIT_OK


def _cmd_ehrhart(args: argparse.Namespace) -> int:
    _emit_json(ehrhart_report(_int_list(args.axes)).model_dump())
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    cfg = SweepConfig.from_file(args.config)
    records = scan_discrepancy(cfg, workers=args.workers)
    if not cfg.output:
        write_records(records, sys.stdout)
    try:
        fit = fit_exponent(records)
        logger.info("Ajuste: %s", fit.model_dump())
    except InsufficientData as exc:
        logger.info("Sin ajuste de exponente: %s", exc)
    if settings.elasticsearch_enabled:
        polytope = parse_polytope(cfg.polytope)
        run_id = str(uuid.uuid4())
        asyncio.run(persist_sweep(settings, run_id, to_spec(polytope), polytope.d, records))
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    return report(args.campaign, out_dir=args.out_dir, quick=args.quick, seed=args.seed)


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    settings.validate_service()
    uvicorn.run("latpoly.main:app", host=args.host, port=args.port, log_level=settings.log_level.lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latpoly", description="Puntos de red en dilataciones reales de politopos")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="conteo exacto |tP ∩ Z^d|")
    p.add_argument("--polytope", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("poly", help="coeficientes de p(t) o q(t)")
    p.add_argument("--axes", required=True)
    p.add_argument("--kind", choices=("cross", "simplex"), default="cross")
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(func=_cmd_poly)

    p = sub.add_parser("fourier", help="transformada de Fourier de tS en y")
    p.add_argument("--simplex", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--method", choices=(METHOD_RESIDUES, METHOD_CONTOUR, METHOD_CLOSED, METHOD_DIRECT),
                   default=METHOD_RESIDUES)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_fourier)

    p = sub.add_parser("cesaro", help="medias de Cesàro y E_N(t)")
    p.add_argument("--axes", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--N", required=True, help="N o lista separada por comas")
    p.set_defaults(func=_cmd_cesaro)

    p = sub.add_parser("dioph", help="sumas recíprocas de productos y L_M")
    p.add_argument("--alphas", required=True)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--checkpoints")
    p.add_argument("--output", help="prefijo de los ficheros .csv y .json")
    p.set_defaults(func=_cmd_dioph)

    p = sub.add_parser("ehrhart", help="polinomio de Ehrhart de un símplice entero")
    p.add_argument("--axes", required=True)
    p.set_defaults(func=_cmd_ehrhart)

    p = sub.add_parser("scan", help="barrido de discrepancia desde un fichero de configuración")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("report", help="campaña de aceptación")
    p.add_argument("campaign", choices=sorted(CAMPAIGNS))
    p.add_argument("--out-dir")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="arranca el servicio HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LatpolyError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except ValueError as exc:
        logger.error("Entrada inválida: %s", exc)
        return EXIT_CONFIG_ERROR
