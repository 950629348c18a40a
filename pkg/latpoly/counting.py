"""Conteo exacto de puntos de red en dilataciones reales de cross-polytopes y símplices.

Las coordenadas exteriores se enumeran vectorizadas con numpy; la coordenada interior
se resuelve con un suelo cerrado. Cada decisión de suelo pasa un filtro en float64 con
margen explícito y, si cae dentro del margen, se decide con la tricotomía exacta.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple, Union

import numpy as np

from .core.errors import PrecisionExhausted
from .models import CountResult
from .polytope import AxisLengths, CornerSimplex, CrossPolytope, FacePolytope, rational_point
from .scalar import AlgebraicScalar, ScalarLike, as_scalar, floor_scalar, sign_of_combination

logger = logging.getLogger("latpoly.counting")

# a_max * t por encima de esto deja sin sentido el filtro en float64
_FLOAT_SCREEN_LIMIT = 2.0 ** 40


@dataclass
class _Scan:
    outer: np.ndarray  # filas x ortante no negativo, coordenadas exteriores
    inner: np.ndarray  # K por fila (máximo entero interior admitido)
    tie: np.ndarray  # True si (x, K) está exactamente en la cara sum x/a = t
    certified: bool


class _Decider:
    """Decisiones exactas de sum x_j / a_j frente a t sobre los ejes permutados."""

    def __init__(self, axes: AxisLengths, perm: Sequence[int], t: AlgebraicScalar, strict: bool):
        self.inv = [axes.inv_a[i] for i in perm]
        self.t = t
        self.strict = strict
        self.certified = True
        self.decisions = 0

    def slack_sign(self, coords: Sequence[int], fallback: float) -> int:
        """Signo de t - sum coords_j / a_j (coords sobre los primeros ejes permutados)."""
        self.decisions += 1
        terms = [(-int(c), inv) for c, inv in zip(coords, self.inv) if c]
        try:
            return sign_of_combination(terms + [(1, self.t)])
        except PrecisionExhausted:
            if self.strict:
                raise
            self.certified = False
            logger.warning("Decisión de frontera no certificada en %s; se usa float", list(coords))
            return (fallback > 0) - (fallback < 0)


def _delta(axes: AxisLengths, t_f: float) -> float:
    # rem = t - sum k_j / a_j vive en unidades de t
    return 2.0 ** -36 * max(1.0, t_f) * (axes.d + 1)


def _scan(axes: AxisLengths, t: AlgebraicScalar, strict: bool) -> Tuple[_Scan, List[int]]:
    d = axes.d
    t_f = float(t)
    if max(axes.floats) * t_f > _FLOAT_SCREEN_LIMIT:
        raise ValueError("a_max * t = %.3g excede el rango de conteo soportado" % (max(axes.floats) * t_f))
    # el eje más largo va al nivel interior: menos filas exteriores
    perm = sorted(range(d), key=lambda i: axes.floats[i])
    a = np.array([axes.floats[i] for i in perm])
    inv = np.array([float(axes.inv_a[i]) for i in perm])
    delta = _delta(axes, t_f)
    decider = _Decider(axes, perm, t, strict)

    outer = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([t_f])
    for j in range(d - 1):
        kmax = np.floor(a[j] * (rem + delta)).astype(np.int64)
        counts = np.maximum(kmax + 1, 0)
        total = int(counts.sum())
        parent = np.repeat(np.arange(len(rem)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        step = np.arange(total, dtype=np.int64) - starts
        outer = np.hstack([outer[parent], step[:, None]])
        rem = rem[parent] - step * inv[j]
        keep = rem >= -delta
        ambiguous = np.flatnonzero(np.abs(rem) <= delta)
        for row in ambiguous:
            if decider.slack_sign(outer[row], rem[row]) < 0:
                keep[row] = False
            else:
                rem[row] = max(rem[row], 0.0)
        outer, rem = outer[keep], rem[keep]

    scaled = a[-1] * rem
    inner = np.floor(scaled).astype(np.int64)
    tie = np.zeros(len(rem), dtype=bool)
    nearest = np.rint(scaled)
    ambiguous = np.flatnonzero(np.abs(scaled - nearest) <= delta * max(1.0, a[-1]))
    for row in ambiguous:
        k0 = int(nearest[row])
        sign = decider.slack_sign(list(outer[row]) + [k0], scaled[row] - k0)
        if sign >= 0:
            inner[row] = k0
            tie[row] = sign == 0
        else:
            inner[row] = k0 - 1
    if decider.decisions:
        logger.debug("Conteo t=%s: %d decisiones exactas de frontera", t.to_text(), decider.decisions)
    return _Scan(outer=outer, inner=inner, tie=tie, certified=decider.certified), perm


def count_cross(polytope: CrossPolytope, t: ScalarLike, strict: bool = True) -> CountResult:
    """|tC ∩ Z^d| con la frontera incluida."""
    t = as_scalar(t)
    if t.sign() <= 0:
        raise ValueError("t debe ser positivo")
    axes = polytope.axes
    if axes.d == 1:
        k = floor_scalar(axes.a[0] * t)
        tie = (axes.a[0] * t).compare(k) == 0
        return CountResult(count=2 * k + 1, boundary_hits=(2 if k > 0 else 1) if tie else 0)
    scan, _ = _scan(axes, t, strict)
    nonzero = np.count_nonzero(scan.outer, axis=1)
    weights = np.left_shift(np.int64(1), nonzero.astype(np.int64))
    count = int(np.sum(weights * (2 * scan.inner + 1)))
    tie_points = np.where(scan.inner > 0, 2, 1)
    boundary = int(np.sum(np.where(scan.tie, weights * tie_points, 0)))
    return CountResult(count=count, boundary_hits=boundary, certified=scan.certified)


def _count_corner(axes: AxisLengths, t: AlgebraicScalar, strict: bool) -> CountResult:
    if axes.d == 1:
        k = floor_scalar(axes.a[0] * t)
        tie = (axes.a[0] * t).compare(k) == 0
        boundary = 1 + (1 if tie and k > 0 else 0)
        return CountResult(count=k + 1, boundary_hits=boundary)
    scan, _ = _scan(axes, t, strict)
    count = int(np.sum(scan.inner + 1))
    on_face = np.any(scan.outer == 0, axis=1)
    boundary = np.where(on_face, scan.inner + 1, 1 + ((scan.tie) & (scan.inner > 0)))
    return CountResult(count=count, boundary_hits=int(np.sum(boundary)), certified=scan.certified)


def count_simplex(polytope: Union[CornerSimplex, FacePolytope], t: ScalarLike, strict: bool = True) -> CountResult:
    t = as_scalar(t)
    if t.sign() <= 0:
        raise ValueError("t debe ser positivo")
    if isinstance(polytope, FacePolytope):
        sub = polytope.sub_cross
        if sub is None:
            return CountResult(count=1, boundary_hits=0)
        return count_cross(sub, t, strict)
    # el conteo no depende del ortante sigma
    return _count_corner(polytope.axes, t, strict)


def count_brute_force(polytope: Union[CrossPolytope, CornerSimplex], t: ScalarLike) -> CountResult:
    """Enumeración directa de la caja envolvente (oráculo de pruebas)."""
    t = as_scalar(t)
    axes = polytope.axes
    bounds = [math.ceil(a * float(t)) + 1 for a in axes.floats]
    if isinstance(polytope, CrossPolytope):
        ranges = [np.arange(-b, b + 1) for b in bounds]
    else:
        ranges = [np.arange(0, b + 1) * s for b, s in zip(bounds, polytope.sign)]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, axes.d)
    inv = np.array([float(v) for v in axes.inv_a])
    rem = float(t) - np.abs(grid) @ inv
    delta = _delta(axes, float(t)) * 4
    signs = np.sign(rem).astype(np.int64)
    for row in np.flatnonzero(np.abs(rem) <= delta):
        terms = [(-abs(int(c)), v) for c, v in zip(grid[row], axes.inv_a) if c]
        signs[row] = sign_of_combination(terms + [(1, t)])
    inside = signs >= 0
    on_boundary = signs == 0
    if isinstance(polytope, CornerSimplex):
        # las caras coordenadas también son frontera
        on_boundary |= inside & np.any(grid == 0, axis=1)
    return CountResult(count=int(np.count_nonzero(inside)), boundary_hits=int(np.count_nonzero(on_boundary)))


def verify_decomposition(axes: AxisLengths, t: ScalarLike) -> bool:
    """2^d |tS ∩ Z^d| = sum_I |tC_I ∩ Z^d| en aritmética entera."""
    t = as_scalar(t)
    d = axes.d
    lhs = (1 << d) * count_simplex(CornerSimplex(axes), t).count
    rhs = 0
    for size in range(d + 1):
        for support in combinations(range(d), size):
            rhs += count_simplex(FacePolytope(axes, support), t).count
    if lhs != rhs:
        logger.warning("Descomposición fallida t=%s: %d != %d", t.to_text(), lhs, rhs)
    return lhs == rhs


@dataclass(frozen=True)
class SlabQuery:
    center: Tuple[Fraction, ...]
    radius: AlgebraicScalar
    normal: Tuple[AlgebraicScalar, ...]
    offset: AlgebraicScalar
    width: AlgebraicScalar

    def __post_init__(self) -> None:
        if self.radius.compare(1) <= 0:
            raise ValueError("R debe ser > 1")
        if self.width.sign() < 0:
            raise ValueError("el ancho de la franja no puede ser negativo")
        if all(n.sign() == 0 for n in self.normal):
            raise ValueError("la normal no puede ser nula")
        if len(self.center) != len(self.normal):
            raise ValueError("centro y normal de dimensiones distintas")

    @classmethod
    def of(cls, center: Sequence[ScalarLike], radius: ScalarLike, normal: Sequence[ScalarLike],
           offset: ScalarLike, width: ScalarLike) -> "SlabQuery":
        return cls(
            center=tuple(rational_point(center)),
            radius=as_scalar(radius),
            normal=tuple(as_scalar(n) for n in normal),
            offset=as_scalar(offset),
            width=as_scalar(width),
        )

    @property
    def d(self) -> int:
        return len(self.normal)


def _sqrt_scalar(x: AlgebraicScalar) -> AlgebraicScalar:
    if x.is_rational:
        return AlgebraicScalar.sqrt(x.value)
    # raíz positiva de p(y^2), p polinomio mínimo de x
    coeffs = x.minimal_coeffs()
    doubled: List[int] = []
    for c in coeffs[:-1]:
        doubled.extend([c, 0])
    doubled.append(coeffs[-1])
    bits = 64
    while True:
        lo, hi = x.interval(bits)
        lo_root = Fraction(math.isqrt(math.floor(max(lo, 0) * (1 << (2 * bits)))), 1 << bits)
        hi_root = Fraction(math.isqrt(math.ceil(hi * (1 << (2 * bits)))) + 1, 1 << bits)
        try:
            return AlgebraicScalar.root(doubled, lo_root, hi_root)
        except ValueError:
            bits *= 2
            if bits > 4096:
                raise


def count_slab(query: SlabQuery) -> int:
    """Puntos m con |m - c| <= R y b <= <n/|n|, m> <= b + a (fuerza bruta)."""
    d = query.d
    norm2 = AlgebraicScalar.rational(0)
    for n in query.normal:
        norm2 = norm2 + n * n
    norm = _sqrt_scalar(norm2)
    lower = query.offset * norm
    upper = (query.offset + query.width) * norm
    radius2 = query.radius * query.radius

    r_f = float(query.radius)
    ranges = [np.arange(math.floor(float(c) - r_f) - 1, math.ceil(float(c) + r_f) + 2) for c in query.center]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
    center_f = np.array([float(c) for c in query.center])
    normal_f = np.array([float(n) for n in query.normal])
    dist2 = np.sum((grid - center_f) ** 2, axis=1)
    proj = grid @ normal_f
    scale = max(1.0, r_f) ** 2 * 2.0 ** -30
    pscale = max(1.0, float(np.abs(normal_f).sum()) * (r_f + float(np.abs(center_f).max(initial=0.0)))) * 2.0 ** -30

    ball_in = dist2 < float(radius2) - scale
    ball_amb = np.abs(dist2 - float(radius2)) <= scale
    low_in = proj > float(lower) + pscale
    low_amb = np.abs(proj - float(lower)) <= pscale
    up_in = proj < float(upper) - pscale
    up_amb = np.abs(proj - float(upper)) <= pscale

    candidates = np.flatnonzero((ball_in | ball_amb) & (low_in | low_amb) & (up_in | up_amb))
    total = 0
    for row in candidates:
        point = [int(v) for v in grid[row]]
        if ball_amb[row]:
            exact = sum((Fraction(p) - c) ** 2 for p, c in zip(point, query.center))
            if radius2.compare(exact) < 0:
                continue
        terms = [(p, n) for p, n in zip(point, query.normal) if p]
        if low_amb[row] and sign_of_combination(terms + [(-1, lower)]) < 0:
            continue
        if up_amb[row] and sign_of_combination(terms + [(-1, upper)]) > 0:
            continue
        total += 1
    return total
