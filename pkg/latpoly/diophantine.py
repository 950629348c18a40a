"""Distancia al entero más próximo, mínimo de productos L_M y sumas recíprocas S(M)."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .core.errors import RationalAlpha
from .fitting import loglog_fit
from .models import FitSummary
from .scalar import AlgebraicScalar, ScalarLike, as_scalar, fixed_point, floor_scalar

logger = logging.getLogger("latpoly.diophantine")

SCHMIDT_EPSILONS = (0.05, 0.1, 0.2)
DEFAULT_DECAY_RATIO = 1e-3
_GUARD_BITS = 64


def dist_nearest_integer(x: ScalarLike) -> float:
    """||x|| en [0, 1/2]; exacto vía suelo simbólico y redondeado una sola vez a float."""
    x = as_scalar(x)
    frac = x - floor_scalar(x)
    if frac.compare(Fraction(1, 2)) > 0:
        frac = 1 - frac
    return float(frac)


@dataclass(frozen=True)
class LiouvilleLike:
    """α = sum_k 2^(-e_k) con e = 1, 3, 12, 48, 192, ... (e_{k+1} = 4 e_k).

    No es algebraico; sirve de control negativo con la misma interfaz de punto fijo.
    """

    first: int = 1
    second: int = 3
    growth: int = 4

    def exponents(self, limit: int) -> List[int]:
        out = [self.first]
        e = self.second
        while e <= limit:
            out.append(e)
            e *= self.growth
        return [e for e in out if e <= limit]

    def fixed_point(self, bits: int) -> int:
        return sum(1 << (bits - e) for e in self.exponents(bits))

    def __float__(self) -> float:
        return float(Fraction(self.fixed_point(64), 1 << 64))

    def to_text(self) -> str:
        return "liouville(%d,%d,x%d)" % (self.first, self.second, self.growth)


Alpha = Union[AlgebraicScalar, LiouvilleLike]


def _as_alpha(value: Union[ScalarLike, LiouvilleLike]) -> Alpha:
    if isinstance(value, LiouvilleLike):
        return value
    alpha = as_scalar(value)
    if alpha.is_rational:
        raise RationalAlpha("α racional: %s" % alpha.to_text())
    return alpha


class _DistKernel:
    """||m α_k|| para m = 1, 2, ... a partir de punto fijo entero (error <= m / 2^bits)."""

    def __init__(self, alphas: Sequence[Alpha], m_max: int):
        self.bits = max(128, 2 * m_max.bit_length() + _GUARD_BITS)
        self.one = 1 << self.bits
        self.half = self.one >> 1
        self.fixed = [
            a.fixed_point(self.bits) if isinstance(a, LiouvilleLike) else fixed_point(a, self.bits)
            for a in alphas
        ]

    def residues(self, m: int) -> List[int]:
        return [(m * a) % self.one for a in self.fixed]

    def distances(self, m: int) -> List[float]:
        out = []
        for r in self.residues(m):
            out.append(min(r, self.one - r) / self.one)
        return out

    def product(self, m: int) -> float:
        return math.prod(self.distances(m))

    def cell(self, m: int, n: int) -> Tuple[int, ...]:
        # g(m) = mα - entero más próximo en [-1/2, 1/2); celda de lado 1/n
        return tuple((((r + self.half) % self.one) * n) >> self.bits for r in self.residues(m))


@dataclass
class ProductSumRow:
    M: int
    S: float
    L: float
    max_term: float


@dataclass
class ProductSumTable:
    alphas: List[str]
    rows: List[ProductSumRow]
    fit: Optional[FitSummary] = None

    @property
    def fitted_gamma(self) -> Optional[float]:
        return self.fit.slope if self.fit else None

    def invariant_violations(self) -> List[str]:
        d = len(self.alphas)
        problems = []
        for prev, row in zip(self.rows, self.rows[1:]):
            if not row.S > prev.S:
                problems.append("S no crece en M=%d" % row.M)
            if row.L > prev.L:
                problems.append("L_M crece en M=%d" % row.M)
        for row in self.rows:
            if not 0 < row.L < 2.0 ** -d:
                problems.append("L_M fuera de (0, 2^-d) en M=%d" % row.M)
            if not row.S > row.M:
                problems.append("S(M) <= M en M=%d" % row.M)
        return problems


def default_checkpoints(m_max: int, per_decade: int = 8) -> List[int]:
    points = set()
    decades = math.log10(max(m_max, 2))
    steps = max(2, int(math.ceil(decades * per_decade)))
    for i in range(steps + 1):
        points.add(max(1, int(round(10 ** (decades * i / steps)))))
    points.add(m_max)
    return sorted(p for p in points if p <= m_max)


def product_sum_table(alphas: Sequence[Union[ScalarLike, LiouvilleLike]], m_max: int,
                      checkpoints: Optional[Sequence[int]] = None) -> ProductSumTable:
    values = [_as_alpha(a) for a in alphas]
    if m_max < 1:
        raise ValueError("M_max debe ser >= 1")
    checkpoints = sorted(set(checkpoints or default_checkpoints(m_max)))
    if checkpoints[0] < 1 or checkpoints[-1] > m_max:
        raise ValueError("checkpoints fuera de [1, M_max]")
    kernel = _DistKernel(values, m_max)

    partial_sums: List[float] = []
    segment: List[float] = []
    running_min = math.inf
    max_term = 0.0
    rows: List[ProductSumRow] = []
    next_cp = iter(checkpoints)
    target = next(next_cp)
    for m in range(1, checkpoints[-1] + 1):
        prod = kernel.product(m)
        term = 1.0 / prod
        segment.append(term)
        running_min = min(running_min, prod)
        max_term = max(max_term, term)
        if m == target:
            partial_sums.append(math.fsum(segment))
            segment = []
            rows.append(ProductSumRow(M=m, S=math.fsum(partial_sums), L=running_min, max_term=max_term))
            target = next(next_cp, None)
    table = ProductSumTable(alphas=[a.to_text() for a in values], rows=rows)
    upper = rows[len(rows) // 2:]
    if len(upper) >= 2:
        table.fit = loglog_fit([r.M for r in upper], [r.S for r in upper])
        logger.info("γ ajustado para %s: %.4f [%.4f, %.4f]", table.alphas, table.fit.slope,
                    table.fit.ci_low, table.fit.ci_high)
    return table


def max_term_growth(table: ProductSumTable) -> float:
    """c = min_M max_{m<=M} term / M sobre los checkpoints; la cota de Dirichlet pide c > 0."""
    return min(row.max_term / row.M for row in table.rows)


@dataclass
class SchmidtReport:
    alphas: List[str]
    m_max: int
    minima: Dict[float, List[Tuple[int, float]]] = field(default_factory=dict)
    decaying: Dict[float, bool] = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return any(self.decaying.values())


def schmidt_check(alphas: Sequence[Union[ScalarLike, LiouvilleLike]], m_max: int,
                  epsilons: Sequence[float] = SCHMIDT_EPSILONS,
                  decay_ratio: float = DEFAULT_DECAY_RATIO,
                  checkpoints: Optional[Sequence[int]] = None) -> SchmidtReport:
    """Mínimo acumulado de m^(1+ε) ∏||m α_k|| en los checkpoints."""
    values = [_as_alpha(a) for a in alphas]
    checkpoints = sorted(set(checkpoints or default_checkpoints(m_max)))
    kernel = _DistKernel(values, m_max)
    report = SchmidtReport(alphas=[a.to_text() for a in values], m_max=m_max)
    running = {eps: math.inf for eps in epsilons}
    for eps in epsilons:
        report.minima[eps] = []
    cp = set(checkpoints)
    for m in range(1, m_max + 1):
        prod = kernel.product(m)
        for eps in epsilons:
            running[eps] = min(running[eps], m ** (1 + eps) * prod)
        if m in cp:
            for eps in epsilons:
                report.minima[eps].append((m, running[eps]))
    for eps in epsilons:
        first = report.minima[eps][0][1]
        last = report.minima[eps][-1][1]
        report.decaying[eps] = last < decay_ratio * first
        if report.decaying[eps]:
            logger.warning("Mínimo de Schmidt decae para %s con ε=%.2f: %.3e -> %.3e",
                           report.alphas, eps, first, last)
    return report


@dataclass
class PigeonholeReport:
    M: int
    L: float
    cells_per_axis: int
    side: float
    a2_size: int
    histogram: Dict[int, int]
    max_occupancy: int


def pigeonhole_bound_demo(alphas: Sequence[Union[ScalarLike, LiouvilleLike]], M: int, h: int = 2) -> PigeonholeReport:
    """Partición de [-1/2, 1/2)^d en n^d cubos de lado 1/n en (L_M^(1/d)/2, L_M^(1/d)).

    Cada cubo recibe a lo sumo un punto de g(A_h), A_h = {m <= M : ∏||mα_k|| < h L_M}.
    """
    values = [_as_alpha(a) for a in alphas]
    d = len(values)
    if d < 1:
        raise ValueError("d >= 1")
    if M < 1:
        raise ValueError("M debe ser >= 1")
    kernel = _DistKernel(values, M)
    products = [kernel.product(m) for m in range(1, M + 1)]
    L = min(products)
    n = math.floor(L ** (-1.0 / d)) + 1
    occupancy: Dict[Tuple[int, ...], int] = {}
    members = [m for m, prod in enumerate(products, start=1) if prod < h * L]
    for m in members:
        key = kernel.cell(m, n)
        occupancy[key] = occupancy.get(key, 0) + 1
    histogram: Dict[int, int] = {}
    for count in occupancy.values():
        histogram[count] = histogram.get(count, 0) + 1
    max_occupancy = max(occupancy.values()) if occupancy else 0
    if max_occupancy > 1:
        logger.error("Pigeonhole: cubo con %d puntos (M=%d, n=%d)", max_occupancy, M, n)
    return PigeonholeReport(
        M=M, L=L, cells_per_axis=n, side=1.0 / n, a2_size=len(members),
        histogram=histogram, max_occupancy=max_occupancy,
    )
