"""Sumas de Dedekind y polinomios de Ehrhart de símplices de esquina con ejes enteros."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Union

import sympy

from .core.errors import InterpolationInconsistent, NotCoprime, NotPairwiseCoprime
from .counting import count_simplex
from .models import EhrhartReport
from .polytope import AxisLengths, CornerSimplex

logger = logging.getLogger("latpoly.ehrhart")

DIRECT_LIMIT = 10 ** 4

METHOD_AUTO = "auto"
METHOD_DIRECT = "direct"
METHOD_RECIPROCITY = "reciprocity"


@dataclass(frozen=True)
class DedekindSum:
    a: int
    b: int
    value: Fraction


def _saw(x: Fraction) -> Fraction:
    return x - math.floor(x) - Fraction(1, 2)


def _direct(a: int, b: int) -> Fraction:
    total = Fraction(0)
    for k in range(1, b):
        total += (Fraction(k, b) - Fraction(1, 2)) * _saw(Fraction(a * k, b))
    return total


def _reciprocity(a: int, b: int) -> Fraction:
    # s(a, b) solo depende de a mod b; s(a,b) + s(b,a) = -1/4 + (a/b + b/a + 1/(ab))/12
    sign = 1
    total = Fraction(0)
    a %= b
    while b > 1 and a:
        total += sign * (Fraction(-1, 4) + (Fraction(a, b) + Fraction(b, a) + Fraction(1, a * b)) / 12)
        sign = -sign
        a, b = b % a, a
    return total


def dedekind_sum(a: int, b: int, method: str = METHOD_AUTO) -> DedekindSum:
    """s(a, b) = sum_{k=1}^{b-1} (k/b - 1/2)({ak/b} - 1/2), exacto."""
    if b < 1:
        raise ValueError("b debe ser >= 1")
    if math.gcd(a, b) != 1:
        raise NotCoprime("gcd(%d, %d) != 1" % (a, b))
    if method == METHOD_AUTO:
        method = METHOD_DIRECT if b <= DIRECT_LIMIT else METHOD_RECIPROCITY
    if method == METHOD_DIRECT:
        value = _direct(a, b)
    elif method == METHOD_RECIPROCITY:
        value = _reciprocity(a, b)
    else:
        raise ValueError("método desconocido: %s" % method)
    return DedekindSum(a=a, b=b, value=value)


def reciprocity_defect(a: int, b: int) -> Fraction:
    """s(a,b) + s(b,a) - (-1/4 + (a/b + b/a + 1/(ab))/12); cero para a, b >= 1 coprimos."""
    if a < 1 or b < 1:
        raise ValueError("a y b deben ser positivos")
    lhs = dedekind_sum(a, b).value + dedekind_sum(b, a).value
    rhs = Fraction(-1, 4) + (Fraction(a, b) + Fraction(b, a) + Fraction(1, a * b)) / 12
    return lhs - rhs


@dataclass(frozen=True)
class EhrhartPolynomial:
    d: int
    coefficients: List[Fraction]  # coefficients[k] acompaña a t^k

    def __call__(self, t: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def coefficient(self, k: int) -> Fraction:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else Fraction(0)

    def to_text(self) -> str:
        return str(sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coefficients)],
                              sympy.Symbol("t")).as_expr())


def _integer_axes(axes: Union[AxisLengths, Sequence[int]]) -> List[int]:
    if isinstance(axes, AxisLengths):
        if not axes.all_integer:
            raise ValueError("los ejes deben ser enteros positivos: %s" % axes.to_text())
        return [int(v.value) for v in axes.a]
    values = [int(v) for v in axes]
    if not values or any(v < 1 for v in values):
        raise ValueError("los ejes deben ser enteros positivos: %s" % values)
    return values


def ehrhart_by_interpolation(axes: Union[AxisLengths, Sequence[int]]) -> EhrhartPolynomial:
    """Interpola en t = 0..d+1 y comprueba el grado en t = d+2."""
    ints = _integer_axes(axes)
    d = len(ints)
    lengths = AxisLengths.of(ints)
    simplex = CornerSimplex(lengths)
    counts = {0: 1}
    for t in range(1, d + 3):
        counts[t] = count_simplex(simplex, t).count
    t_sym = sympy.Symbol("t")
    points = [(t, counts[t]) for t in range(d + 2)]
    expr = sympy.interpolate(points, t_sym)
    poly = sympy.Poly(sympy.expand(expr), t_sym)
    check = poly.eval(d + 2)
    if check != counts[d + 2]:
        raise InterpolationInconsistent(
            "t=%d: polinomio da %s, conteo exacto %d" % (d + 2, check, counts[d + 2])
        )
    if poly.degree() > d:
        raise InterpolationInconsistent("grado %d > d=%d" % (poly.degree(), d))
    coeffs = [Fraction(0)] * (d + 1)
    for (power,), value in poly.terms():
        coeffs[power] = Fraction(int(value.p), int(value.q))
    leading = Fraction(math.prod(ints), math.factorial(d))
    if coeffs[d] != leading:
        raise InterpolationInconsistent("coeficiente principal %s != %s" % (coeffs[d], leading))
    logger.debug("Ehrhart %s: %s", ints, coeffs)
    return EhrhartPolynomial(d=d, coefficients=coeffs)


def _check_pairwise_coprime(ints: Sequence[int]) -> None:
    for x, y in combinations(ints, 2):
        if math.gcd(x, y) != 1:
            raise NotPairwiseCoprime("gcd(%d, %d) != 1" % (x, y))


def formula_main_part(axes: Union[AxisLengths, Sequence[int]]) -> Fraction:
    """(a_1...a_d / (4 (d-2)!)) ((1/3) sum 1/a_i^2 + sum_{i<j} 1/(a_i a_j))."""
    ints = _integer_axes(axes)
    d = len(ints)
    if d < 2:
        raise ValueError("se necesita d >= 2")
    inner = sum(Fraction(1, 3 * a * a) for a in ints)
    inner += sum(Fraction(1, x * y) for x, y in combinations(ints, 2))
    return Fraction(math.prod(ints), 4 * math.factorial(d - 2)) * inner


def formula_correction(axes: Union[AxisLengths, Sequence[int]]) -> Fraction:
    """(1/(d-2)!) (d/4 + 1/(12 a_1...a_d) - sum_i s(prod_{j!=i} a_j, a_i))."""
    ints = _integer_axes(axes)
    d = len(ints)
    prod = math.prod(ints)
    dedekind = sum(dedekind_sum(prod // a, a).value for a in ints)
    return (Fraction(d, 4) + Fraction(1, 12 * prod) - dedekind) / math.factorial(d - 2)


def coefficient_td_minus_2_formula(axes: Union[AxisLengths, Sequence[int]]) -> Fraction:
    ints = _integer_axes(axes)
    if len(ints) < 2:
        raise ValueError("se necesita d >= 2")
    _check_pairwise_coprime(ints)
    return formula_main_part(ints) + formula_correction(ints)


def ehrhart_report(axes: Union[AxisLengths, Sequence[int]]) -> EhrhartReport:
    ints = _integer_axes(axes)
    poly = ehrhart_by_interpolation(ints)
    report = EhrhartReport(axes=ints, coefficients=[str(c) for c in poly.coefficients])
    if len(ints) >= 2:
        interpolated = poly.coefficient(len(ints) - 2)
        report.interpolated = str(interpolated)
        try:
            formula = coefficient_td_minus_2_formula(ints)
        except NotPairwiseCoprime as exc:
            logger.info("Sin fórmula de t^(d-2): %s", exc)
        else:
            report.formula = str(formula)
            report.match = formula == interpolated
    return report
