"""Barridos de discrepancia Δ(t) = conteo - término principal y ajuste de exponentes."""

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Union

from dotenv import dotenv_values

from .core.config import settings
from .core.errors import ConfigError, InsufficientData, PrecisionExhausted
from .counting import count_cross, count_simplex
from .fitting import dyadic_envelope, loglog_fit
from .mainterm import MainTermPolynomial, build_p, build_q, evaluate, KIND_CROSS
from .models import DiscrepancyRecord, FitSummary, MainTermKind, Spacing, SweepRequest
from .polytope import CornerSimplex, CrossPolytope, FacePolytope, Polytope, parse_polytope, to_spec
from .scalar import AlgebraicScalar, parse_scalar

logger = logging.getLogger("latpoly.sweep")

CSV_COLUMNS = ("t", "count", "main_term", "delta", "certified")
MIN_FIT_RECORDS = 20
_CERTIFIED_WIDTH = 2.0 ** -20
_LOG_DIGITS = 12


def _rational(text: str, key: str) -> Fraction:
    try:
        value = parse_scalar(text)
    except ValueError as exc:
        raise ConfigError("%s inválido: %s" % (key, exc)) from exc
    if not value.is_rational:
        raise ConfigError("%s debe ser racional: %s" % (key, text))
    return value.value


def _int(text: Optional[str], key: str, default: Optional[int] = None) -> Optional[int]:
    if text is None or str(text).strip() == "":
        return default
    try:
        return int(str(text).strip())
    except ValueError as exc:
        raise ConfigError("%s debe ser entero: %r" % (key, text)) from exc


@dataclass
class SweepConfig:
    polytope: str
    t_start: Fraction
    t_stop: Fraction
    t_count: int
    t_spacing: Spacing = Spacing.linear
    n: Optional[int] = None
    output: Optional[str] = None
    precision_bits: int = field(default_factory=lambda: settings.precision_bits)
    seed: int = 0
    main_term: MainTermKind = MainTermKind.auto

    def __post_init__(self) -> None:
        if self.t_count < 1:
            raise ConfigError("T_COUNT debe ser >= 1")
        if self.t_start < 1:
            raise ConfigError("T_START debe ser >= 1 en barridos de discrepancia")
        if self.t_stop < self.t_start:
            raise ConfigError("T_STOP debe ser >= T_START")
        if self.n is not None and self.n <= 1:
            raise ConfigError("N debe ser > 1")
        if not 2 <= self.precision_bits <= settings.precision_cap:
            raise ConfigError("PRECISION_BITS fuera de [2, %d]" % settings.precision_cap)
        try:
            parse_polytope(self.polytope)
        except ValueError as exc:
            raise ConfigError("POLYTOPE inválido: %s" % exc) from exc

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> "SweepConfig":
        missing = [k for k in ("POLYTOPE", "T_START", "T_STOP", "T_COUNT") if not values.get(k)]
        if missing:
            raise ConfigError("faltan claves en la configuración: %s" % ", ".join(missing))
        try:
            spacing = Spacing(values.get("T_SPACING") or Spacing.linear.value)
            main_term = MainTermKind(values.get("MAIN_TERM") or MainTermKind.auto.value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(
            polytope=str(values["POLYTOPE"]),
            t_start=_rational(str(values["T_START"]), "T_START"),
            t_stop=_rational(str(values["T_STOP"]), "T_STOP"),
            t_count=_int(values["T_COUNT"], "T_COUNT"),
            t_spacing=spacing,
            n=_int(values.get("N"), "N"),
            output=values.get("OUTPUT") or None,
            precision_bits=_int(values.get("PRECISION_BITS"), "PRECISION_BITS", settings.precision_bits),
            seed=_int(values.get("SEED"), "SEED", 0),
            main_term=main_term,
        )

    @classmethod
    def from_file(cls, path: str) -> "SweepConfig":
        if not os.path.isfile(path):
            raise ConfigError("no existe el fichero de configuración: %s" % path)
        return cls.from_mapping(dotenv_values(path))

    @classmethod
    def from_request(cls, request: SweepRequest) -> "SweepConfig":
        return cls(
            polytope=request.polytope,
            t_start=_rational(request.t_start, "t_start"),
            t_stop=_rational(request.t_stop, "t_stop"),
            t_count=request.t_count,
            t_spacing=request.t_spacing,
            n=request.n,
            precision_bits=request.precision_bits or settings.precision_bits,
            seed=request.seed,
            main_term=request.main_term,
        )

    def grid(self) -> List[Fraction]:
        if self.t_count == 1 or self.t_start == self.t_stop:
            return [self.t_start]
        steps = self.t_count - 1
        if self.t_spacing == Spacing.linear:
            points = [self.t_start + (self.t_stop - self.t_start) * i / steps for i in range(self.t_count)]
        else:
            lo, hi = math.log(self.t_start), math.log(self.t_stop)
            points = [Fraction(format(math.exp(lo + (hi - lo) * i / steps), ".%dg" % _LOG_DIGITS))
                      for i in range(self.t_count)]
            points[0], points[-1] = self.t_start, self.t_stop
        return sorted(set(points))


def count_polytope(polytope: Polytope, t: Union[AlgebraicScalar, Fraction, int], strict: bool = True):
    if isinstance(polytope, CrossPolytope):
        return count_cross(polytope, t, strict)
    if isinstance(polytope, (CornerSimplex, FacePolytope)):
        return count_simplex(polytope, t, strict)
    raise ConfigError("los barridos solo admiten cross, simplex, corner y face")


def main_term_for(polytope: Polytope, kind: MainTermKind, precision_bits: int) -> MainTermPolynomial:
    if isinstance(polytope, FacePolytope):
        if not polytope.support:
            constant = {(0,) * polytope.d: Fraction(1)}
            return MainTermPolynomial(d=polytope.d, kind=KIND_CROSS, axes=polytope.axes,
                                      symbolic=[constant], precision_bits=precision_bits)
        poly = build_p(polytope.axes.sub(polytope.support))
    elif not isinstance(polytope, (CrossPolytope, CornerSimplex)):
        raise ConfigError("sin término principal para %s" % type(polytope).__name__)
    elif kind == MainTermKind.q or (kind == MainTermKind.auto and isinstance(polytope, CornerSimplex)):
        poly = build_q(polytope.axes)
    else:
        poly = build_p(polytope.axes)
    poly.precision_bits = precision_bits
    return poly


def _record(polytope: Polytope, poly: MainTermPolynomial, t: Fraction) -> DiscrepancyRecord:
    t_scalar = AlgebraicScalar.rational(t)
    try:
        result = count_polytope(polytope, t_scalar)
        main = evaluate(poly, t_scalar)
        certified = result.certified and main.width < _CERTIFIED_WIDTH
        main_value = main.mid
    except PrecisionExhausted as exc:
        logger.warning("t=%s sin certificar: %s", t_scalar.to_text(), exc)
        result = count_polytope(polytope, t_scalar, strict=False)
        main_value = poly(float(t))
        certified = False
    return DiscrepancyRecord(
        t=t_scalar.to_text(),
        count=result.count,
        main_term=main_value,
        delta=result.count - main_value,
        certified=certified,
    )


def _scan_chunk(spec: str, kind: str, precision_bits: int, ts: Sequence[Fraction]) -> List[DiscrepancyRecord]:
    polytope = parse_polytope(spec)
    poly = main_term_for(polytope, MainTermKind(kind), precision_bits)
    return [_record(polytope, poly, t) for t in ts]


def _chunks(items: Sequence[Fraction], parts: int) -> List[List[Fraction]]:
    size = max(1, math.ceil(len(items) / parts))
    return [list(items[i:i + size]) for i in range(0, len(items), size)]


def scan_discrepancy(cfg: SweepConfig, workers: Optional[int] = None) -> List[DiscrepancyRecord]:
    """Conteo exacto y término principal en cada punto de la malla; CSV si ``cfg.output``."""
    polytope = parse_polytope(cfg.polytope)
    spec = to_spec(polytope)
    grid = cfg.grid()
    workers = workers or settings.workers
    logger.info("Barrido %s: %d puntos en [%s, %s] (%s), %d workers",
                spec, len(grid), cfg.t_start, cfg.t_stop, cfg.t_spacing.value, workers)
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_chunk, spec, cfg.main_term.value, cfg.precision_bits, chunk)
                       for chunk in _chunks(grid, workers)]
            records = [rec for future in futures for rec in future.result()]
    else:
        records = _scan_chunk(spec, cfg.main_term.value, cfg.precision_bits, grid)
    records.sort(key=lambda r: Fraction(r.t))
    uncertified = sum(1 for r in records if not r.certified)
    if uncertified:
        logger.warning("Barrido %s: %d registros sin certificar", spec, uncertified)
    if cfg.output:
        write_csv(records, cfg.output)
    return records


def write_records(records: Iterable[DiscrepancyRecord], handle: TextIO) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([r.t, r.count, repr(r.main_term), repr(r.delta), "true" if r.certified else "false"])


def write_csv(records: Iterable[DiscrepancyRecord], path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        write_records(records, handle)
    logger.info("CSV escrito: %s", path)


def read_csv(path: str) -> List[DiscrepancyRecord]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return [
            DiscrepancyRecord(
                t=parse_scalar(row["t"]).to_text(),
                count=int(row["count"]),
                main_term=float(row["main_term"]),
                delta=float(row["delta"]),
                certified=row["certified"] == "true",
            )
            for row in reader
        ]


def fit_exponent(records: Sequence[DiscrepancyRecord], window: float = 1.0) -> FitSummary:
    """Pendiente log-log de la envolvente diádica de |Δ|; ``window`` es la fracción final de registros usada."""
    if not 0 < window <= 1:
        raise ValueError("window debe estar en (0, 1]")
    usable = sorted((r for r in records if r.delta != 0 and math.isfinite(r.delta)), key=lambda r: r.t_float)
    usable = usable[len(usable) - max(1, math.ceil(len(usable) * window)):]
    if len(usable) < MIN_FIT_RECORDS:
        raise InsufficientData("se necesitan >= %d registros con Δ != 0 (hay %d)" % (MIN_FIT_RECORDS, len(usable)))
    envelope = dyadic_envelope([r.t_float for r in usable], [r.delta for r in usable])
    fit = loglog_fit([t for t, _ in envelope], [v for _, v in envelope])
    logger.info("Exponente ajustado %.4f [%.4f, %.4f] con %d bloques", fit.slope, fit.ci_low, fit.ci_high, fit.n)
    return fit


def windowed_means(records: Sequence[DiscrepancyRecord], windows: Sequence[float]) -> Dict[float, float]:
    """Media de Δ sobre [T, 2T] para cada T."""
    out: Dict[float, float] = {}
    for T in windows:
        values = [r.delta for r in records if T <= r.t_float <= 2 * T]
        if not values:
            raise InsufficientData("sin registros en [%s, %s]" % (T, 2 * T))
        out[T] = math.fsum(values) / len(values)
    return out


def monotonicity_violations(records: Sequence[DiscrepancyRecord]) -> int:
    """Número de pasos de la malla en que el conteo exacto disminuye."""
    ordered = sorted(records, key=lambda r: Fraction(r.t))
    return sum(1 for prev, cur in zip(ordered, ordered[1:]) if cur.count < prev.count)
