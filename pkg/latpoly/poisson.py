"""Medias de Cesàro de la serie de Poisson formal del cross-polytope.

Para m en (-N, N)^d el valor de Fourier del símplice de esquina se parte en residuos
simples (en a_j m_j) y el residuo en el origen:

    2^d χ̂_{tS}(m) = 2^d (-1)^d ∏a / (2πi)^d * (simple(m) + origin(m))

La suma de los simples ponderada por Fejér es E_N(t); la del origen es el promedio de B_M.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .core.errors import DenominatorZero
from .counting import count_cross
from .fourier import ft_residues
from .mainterm import build_p, evaluate
from .polytope import AxisLengths, CornerSimplex, CrossPolytope
from .scalar import ScalarLike, as_scalar

logger = logging.getLogger("latpoly.poisson")

_BLOCK_ROWS = 1 << 17


@dataclass(frozen=True)
class FejerWeight:
    N: int
    d: int

    def __post_init__(self) -> None:
        if self.N <= 1:
            raise ValueError("N debe ser > 1")

    def exact(self, m: Sequence[int]) -> Fraction:
        value = Fraction(1)
        for mk in m:
            value *= Fraction(max(0, self.N - abs(mk)), self.N)
        return value

    def __call__(self, ms: np.ndarray) -> np.ndarray:
        return np.prod(np.clip(1.0 - np.abs(ms) / self.N, 0.0, None), axis=1)


@dataclass
class ErrorSeriesValue:
    N: int
    t: str
    value: float
    terms_used: int
    imag_residual: float


@dataclass
class _Split:
    simple: complex
    origin: complex
    exact: complex  # filas con polos coincidentes (ya multiplicadas por el peso)
    terms: int
    coincident: int
    magnitude: float


class _CornerTerms:
    """Evaluación vectorizada de simple(m) y origin(m) para el símplice de esquina."""

    def __init__(self, axes: AxisLengths, t: ScalarLike):
        self.axes = axes
        self.d = axes.d
        self.t_exact = as_scalar(t)
        self.t = float(self.t_exact)
        self.a = np.array(axes.floats)
        prod_a = float(np.prod(self.a))
        self.prefactor = (2 ** self.d) * (-1) ** self.d * prod_a / (2j * math.pi) ** self.d
        # pares con cociente racional: únicos que pueden hacer coincidir polos no nulos
        self.rational_pairs: List[Tuple[int, int, Fraction]] = []
        for j, k in combinations(range(self.d), 2):
            ratio = axes.a[k] / axes.a[j]
            if ratio.is_rational:
                self.rational_pairs.append((j, k, ratio.value))

    def coincident(self, ms: np.ndarray) -> np.ndarray:
        mask = np.zeros(len(ms), dtype=bool)
        for j, k, r in self.rational_pairs:
            # a_j m_j = a_k m_k  <=>  m_j = r m_k
            hit = (ms[:, j] * r.denominator == ms[:, k] * r.numerator) & (ms[:, j] != 0)
            mask |= hit
        return mask

    def split(self, ms: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        n = len(ms)
        simple = np.zeros(n, dtype=complex)
        origin = np.zeros(n, dtype=complex)
        poles_all = ms * self.a
        nonzero = ms != 0
        c = -2j * math.pi * self.t
        for pattern in product((False, True), repeat=self.d):
            pattern_arr = np.array(pattern, dtype=bool)
            rows = np.flatnonzero(np.all(nonzero == pattern_arr, axis=1))
            if not len(rows):
                continue
            support = [i for i, flag in enumerate(pattern) if flag]
            mu = self.d - len(support) + 1
            poles = poles_all[rows][:, support]
            # residuos simples en los polos no nulos
            for idx in range(len(support)):
                pj = poles[:, idx]
                denom = pj ** mu
                for other in range(len(support)):
                    if other != idx:
                        denom = denom * (pj - poles[:, other])
                simple[rows] += np.exp(-2j * math.pi * pj * self.t) / denom
            # residuo en el origen: coeficiente de z^{mu-1}
            h = np.zeros((len(rows), mu), dtype=complex)
            h[:, 0] = 1.0
            scale = np.ones(len(rows), dtype=complex)
            for idx in range(len(support)):
                x = 1.0 / poles[:, idx]
                scale = scale * (-x)
                for deg in range(1, mu):
                    h[:, deg] = h[:, deg] + x * h[:, deg - 1]
            acc = np.zeros(len(rows), dtype=complex)
            for deg in range(mu):
                power = mu - 1 - deg
                acc += (c ** power / math.factorial(power)) * h[:, deg]
            origin[rows] = scale * acc
        return simple * self.prefactor, origin * self.prefactor

    def exact_value(self, m: Sequence[int]) -> complex:
        corner = CornerSimplex(self.axes).as_general()
        return (2 ** self.d) * ft_residues(corner, [int(v) for v in m], self.t_exact).value


def _lattice_blocks(bound: Sequence[int]) -> Iterator[np.ndarray]:
    """Bloques de m en la caja prod [-bound_k, bound_k], orden lexicográfico."""
    d = len(bound)
    ranges = [np.arange(-b, b + 1) for b in bound]
    if d == 1:
        yield ranges[0][:, None]
        return
    tail = np.stack(np.meshgrid(*ranges[1:], indexing="ij"), axis=-1).reshape(-1, d - 1)
    per_block = max(1, _BLOCK_ROWS // max(1, len(tail)))
    first = ranges[0]
    for start in range(0, len(first), per_block):
        heads = first[start:start + per_block]
        block = np.hstack([np.repeat(heads, len(tail))[:, None], np.tile(tail, (len(heads), 1))])
        yield block


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _weighted_split(axes: AxisLengths, t: ScalarLike, N: int, need_exact: bool) -> _Split:
    terms = _CornerTerms(axes, t)
    weight = FejerWeight(N, axes.d)
    simple_parts: List[complex] = []
    origin_parts: List[complex] = []
    exact_parts: List[complex] = []
    magnitude = 0.0
    used = 0
    coincident_total = 0
    for block in _lattice_blocks([N - 1] * axes.d):
        w = weight(block)
        bad = terms.coincident(block)
        if bad.any():
            if not need_exact:
                raise DenominatorZero("m_j a_j / a_k - m_k = 0 en m=%s" % block[np.flatnonzero(bad)[0]].tolist())
            for row in np.flatnonzero(bad):
                exact_parts.append(w[row] * terms.exact_value(block[row]))
            coincident_total += int(bad.sum())
        good = ~bad
        simple, origin = terms.split(block[good])
        simple *= w[good]
        origin *= w[good]
        simple_parts.append(_fsum_complex(simple))
        origin_parts.append(_fsum_complex(origin))
        magnitude += float(np.abs(simple).sum() + np.abs(origin).sum())
        used += int(good.sum())
    if coincident_total:
        logger.info("Cesàro N=%d: %d frecuencias con polos coincidentes evaluadas por residuos exactos", N, coincident_total)
    return _Split(
        simple=_fsum_complex(np.array(simple_parts, dtype=complex)),
        origin=_fsum_complex(np.array(origin_parts, dtype=complex)),
        exact=_fsum_complex(np.array(exact_parts, dtype=complex)) if exact_parts else 0j,
        terms=used + coincident_total,
        coincident=coincident_total,
        magnitude=magnitude,
    )


def _real(value: complex, magnitude: float, label: str) -> float:
    tolerance = 1e-9 * (1.0 + magnitude)
    if abs(value.imag) > tolerance:
        logger.warning("%s: residuo imaginario %.3e por encima de la tolerancia %.3e", label, value.imag, tolerance)
    return value.real


def cesaro_mean(polytope: CrossPolytope, t: ScalarLike, N: int) -> float:
    """Ces(tC, N) = sum_m w(m) χ̂_{tC}(m) = 2^d sum_m w(m) χ̂_{tS}(m)."""
    split = _weighted_split(polytope.axes, t, N, need_exact=True)
    return _real(split.simple + split.origin + split.exact, split.magnitude, "Ces")


def error_series(axes: AxisLengths, t: ScalarLike, N: int) -> ErrorSeriesValue:
    split = _weighted_split(axes, t, N, need_exact=False)
    value = split.simple
    return ErrorSeriesValue(
        N=N,
        t=as_scalar(t).to_text(),
        value=_real(value, split.magnitude, "E_N"),
        terms_used=split.terms,
        imag_residual=abs(value.imag),
    )


def residue_origin_average(axes: AxisLengths, t: ScalarLike, N: int) -> float:
    """(1/N^d) sum_M B_M, es decir la parte del origen con pesos de Fejér."""
    split = _weighted_split(axes, t, N, need_exact=True)
    return _real(split.origin, split.magnitude, "avg B_M")


def residue_origin_sum(axes: AxisLengths, t: ScalarLike, box: Sequence[int]) -> float:
    if len(box) != axes.d or any(b < 0 for b in box):
        raise ValueError("la caja M necesita d cotas >= 0")
    terms = _CornerTerms(axes, t)
    parts: List[complex] = []
    magnitude = 0.0
    for block in _lattice_blocks(list(box)):
        _, origin = terms.split(block)
        parts.append(_fsum_complex(origin))
        magnitude += float(np.abs(origin).sum())
    return _real(_fsum_complex(np.array(parts, dtype=complex)), magnitude, "B_M")


@dataclass
class CesaroDecomposition:
    N: int
    ces: float
    origin_average: float
    error_series: float
    coincident_terms: int


def cesaro_decomposition(axes: AxisLengths, t: ScalarLike, N: int) -> CesaroDecomposition:
    """Ces(tC, N), promedio de B_M y E_N(t) en una sola pasada sobre m."""
    split = _weighted_split(axes, t, N, need_exact=True)
    return CesaroDecomposition(
        N=N,
        ces=_real(split.simple + split.origin + split.exact, split.magnitude, "Ces"),
        origin_average=_real(split.origin, split.magnitude, "avg B_M"),
        error_series=_real(split.simple, split.magnitude, "E_N"),
        coincident_terms=split.coincident,
    )


def poisson_residual(axes: AxisLengths, t: ScalarLike, N: int) -> float:
    """|tC ∩ Z^d| - p(t) - E_N(t)."""
    count = count_cross(CrossPolytope(axes), t).count
    main = float(evaluate(build_p(axes), t))
    return count - main - error_series(axes, t, N).value


# --- oráculos literales (N pequeño) ---------------------------------------------------


def _box(bounds: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    return product(*[range(-b, b + 1) for b in bounds])


def literal_weights(N: int, d: int) -> Dict[Tuple[int, ...], Fraction]:
    """Peso de cada m en la doble suma (1/N^d) sum_M sum_{|m_k| <= M_k}, exacto."""
    weights: Dict[Tuple[int, ...], Fraction] = {}
    unit = Fraction(1, N ** d)
    for M in product(range(N), repeat=d):
        for m in _box(M):
            weights[m] = weights.get(m, Fraction(0)) + unit
    return weights


def cesaro_literal(polytope: CrossPolytope, t: ScalarLike, N: int) -> float:
    if N > 4:
        raise ValueError("la doble suma literal solo se usa con N <= 4")
    terms = _CornerTerms(polytope.axes, t)
    total: List[complex] = []
    for M in product(range(N), repeat=polytope.d):
        for m in _box(M):
            row = np.array([m])
            if terms.coincident(row).any():
                total.append(terms.exact_value(m) / N ** polytope.d)
                continue
            simple, origin = terms.split(row)
            total.append(complex(simple[0] + origin[0]) / N ** polytope.d)
    return _fsum_complex(np.array(total, dtype=complex)).real


def error_series_literal(axes: AxisLengths, t: ScalarLike, N: int) -> float:
    """E_N por la doble suma literal con la fórmula término a término (N <= 4)."""
    if N > 4:
        raise ValueError("la doble suma literal solo se usa con N <= 4")
    d = axes.d
    a = axes.floats
    t_f = float(as_scalar(t))
    total: List[complex] = []
    for M in product(range(N), repeat=d):
        for m in _box(M):
            for j in range(d):
                if m[j] == 0:
                    continue
                denom = float(m[j])
                for k in range(d):
                    if k != j:
                        denom *= m[j] * a[j] / a[k] - m[k]
                term = (1j ** d / math.pi ** d) * np.exp(-2j * math.pi * m[j] * a[j] * t_f) / denom
                total.append(term / N ** d)
    return _fsum_complex(np.array(total, dtype=complex)).real
