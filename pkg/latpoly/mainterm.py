"""Polinomios de término principal p(t) (cross-polytope) y q(t) (promedio de símplices).

Cada coeficiente se guarda como polinomio de Laurent en a_1..a_d con coeficientes
racionales (vector de exponentes -> Fraction) y como intervalo certificado de mpmath.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from mpmath import iv, nstr

from .core.config import settings
from .models import CoefficientReport, PolynomialReport
from .polytope import AxisLengths
from .scalar import AlgebraicScalar, ScalarLike, as_scalar, fraction_interval_iv, iv_precision

logger = logging.getLogger("latpoly.mainterm")

Exponents = Tuple[int, ...]
Laurent = Dict[Exponents, Fraction]

KIND_CROSS = "cross"
KIND_SIMPLEX = "simplex-average"


@dataclass(frozen=True)
class ZetaEven:
    """zeta(n) = value_as_rational_times_pi_power * pi^n."""

    n: int
    value_as_rational_times_pi_power: Fraction


@lru_cache(maxsize=None)
def zeta_even(n: int) -> ZetaEven:
    if n < 2 or n % 2:
        raise ValueError("zeta_even solo admite enteros pares >= 2: %s" % n)
    k = n // 2
    bern = sympy.bernoulli(n)
    r = Fraction((-1) ** (k + 1)) * Fraction(int(bern.p), int(bern.q)) * Fraction(2 ** (n - 1), math.factorial(n))
    return ZetaEven(n=n, value_as_rational_times_pi_power=r)


def _even_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Tuplas ordenadas de ``parts`` pares >= 2 que suman ``total``."""
    half = total // 2
    if parts > half:
        return
    for cuts in combinations(range(1, half), parts - 1):
        bounds = (0,) + cuts + (half,)
        yield tuple(2 * (bounds[i + 1] - bounds[i]) for i in range(parts))


def _add(target: Laurent, key: Exponents, value: Fraction) -> None:
    total = target.get(key, Fraction(0)) + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


def p_coefficients(support: Sequence[int], d: int) -> List[Laurent]:
    """Coeficientes de p_(a_i | i in support) como Laurent en las d variables.

    c_k = 2^k (-1)^((m-k)/2) / k! * prod_{i in I} a_i * sum (-2)^l prod r(i_s) a_{j_s}^(-i_s)
    con m = |I|; el soporte vacío da el polinomio constante 1.
    """
    m = len(support)
    coeffs: List[Laurent] = [dict() for _ in range(m + 1)]
    base = [0] * d
    for i in support:
        base[i] = 1
    if m == 0:
        coeffs[0][tuple(base)] = Fraction(1)
        return coeffs
    for k in range(m, -1, -2):
        rest = m - k
        prefactor = Fraction(2 ** k * (-1) ** (rest // 2), math.factorial(k))
        if rest == 0:
            _add(coeffs[k], tuple(base), prefactor)
            continue
        for ell in range(1, rest // 2 + 1):
            for chosen in combinations(support, ell):
                for parts in _even_compositions(rest, ell):
                    weight = prefactor * (-2) ** ell
                    exps = list(base)
                    for j, part in zip(chosen, parts):
                        weight *= zeta_even(part).value_as_rational_times_pi_power
                        exps[j] -= part
                    _add(coeffs[k], tuple(exps), weight)
    return coeffs


@dataclass
class CertifiedReal:
    interval: object  # mpmath iv.mpf

    @property
    def mid(self) -> float:
        return float(self.interval.mid)

    @property
    def width(self) -> float:
        return float(self.interval.delta)

    def __float__(self) -> float:
        return self.mid

    def contains(self, value: float) -> bool:
        return self.interval.a <= value <= self.interval.b


def _monomial_iv(exps: Exponents, axes_iv: Sequence) -> object:
    value = iv.mpf(1)
    for e, a in zip(exps, axes_iv):
        if e > 0:
            value *= a ** e
        elif e < 0:
            value /= a ** (-e)
    return value


def laurent_iv(poly: Laurent, axes_iv: Sequence) -> object:
    total = iv.mpf(0)
    for exps in sorted(poly):
        coef = poly[exps]
        total += fraction_interval_iv(coef, coef) * _monomial_iv(exps, axes_iv)
    return total


def laurent_exact(poly: Laurent, axes: AxisLengths) -> AlgebraicScalar:
    """Valor exacto de un polinomio de Laurent en los ejes (aritmética de escalares)."""
    total = AlgebraicScalar.rational(0)
    for exps in sorted(poly):
        term = AlgebraicScalar.rational(poly[exps])
        for e, a in zip(exps, axes.a):
            if e:
                term = term * (a ** e)
        total = total + term
    return total


@dataclass
class MainTermPolynomial:
    d: int
    kind: str
    axes: AxisLengths
    symbolic: List[Laurent]
    precision_bits: int = field(default_factory=lambda: settings.precision_bits)
    _numeric: Optional[List[CertifiedReal]] = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return len(self.symbolic) - 1

    def coefficient(self, k: int) -> Laurent:
        return self.symbolic[k] if 0 <= k < len(self.symbolic) else {}

    def axes_iv(self) -> List:
        return [a.to_iv(self.precision_bits) for a in self.axes.a]

    @property
    def numeric(self) -> List[CertifiedReal]:
        if self._numeric is None:
            with iv_precision(self.precision_bits):
                axes_iv = self.axes_iv()
                self._numeric = [CertifiedReal(laurent_iv(c, axes_iv)) for c in self.symbolic]
        return self._numeric

    def exact_coefficient(self, k: int) -> AlgebraicScalar:
        return laurent_exact(self.coefficient(k), self.axes)

    def float_coefficients(self) -> List[float]:
        return [c.mid for c in self.numeric]

    def __call__(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.float_coefficients()):
            acc = acc * t + c
        return acc


def build_p(axes: AxisLengths) -> MainTermPolynomial:
    symbolic = p_coefficients(range(axes.d), axes.d)
    return MainTermPolynomial(d=axes.d, kind=KIND_CROSS, axes=axes, symbolic=symbolic)


def build_q(axes: AxisLengths) -> MainTermPolynomial:
    d = axes.d
    total: List[Laurent] = [dict() for _ in range(d + 1)]
    scale = Fraction(1, 2 ** d)
    for size in range(d + 1):
        for support in combinations(range(d), size):
            for k, coef in enumerate(p_coefficients(support, d)):
                for exps, value in coef.items():
                    _add(total[k], exps, value * scale)
    return MainTermPolynomial(d=d, kind=KIND_SIMPLEX, axes=axes, symbolic=total)


def evaluate(poly: MainTermPolynomial, t: ScalarLike) -> CertifiedReal:
    """Horner en aritmética de intervalos; la anchura del resultado acota el error."""
    t = as_scalar(t)
    with iv_precision(poly.precision_bits):
        t_iv = t.to_iv(poly.precision_bits)
        acc = iv.mpf(0)
        for coef in reversed(poly.numeric):
            acc = acc * t_iv + coef.interval
    return CertifiedReal(acc)


# --- formas cerradas -----------------------------------------------------------------


def _unit(d: int, shifts: Dict[int, int], base: int = 1) -> Exponents:
    exps = [base] * d
    for i, s in shifts.items():
        exps[i] += s
    return tuple(exps)


def closed_form_coefficient(kind: str, d: int, offset: int) -> Laurent:
    """Fórmulas cerradas de c_{d-2}, c_{d-4} (cross) y e_{d-1}, e_{d-2}, e_{d-3} (simplex-average)."""
    k = d - offset
    out: Laurent = {}
    if k < 0:
        return out
    if kind == KIND_CROSS and offset == 2:
        coef = Fraction(2 ** k, 3 * math.factorial(k))
        for i in range(d):
            _add(out, _unit(d, {i: -2}), coef)
        return out
    if kind == KIND_CROSS and offset == 4:
        coef = Fraction(2 ** k, 9 * math.factorial(k))
        for i, j in combinations(range(d), 2):
            _add(out, _unit(d, {i: -2, j: -2}), coef)
        for i in range(d):
            _add(out, _unit(d, {i: -4}), -coef / 5)
        return out
    if kind == KIND_SIMPLEX and offset == 1:
        coef = Fraction(1, 2 * math.factorial(k))
        for i in range(d):
            _add(out, _unit(d, {i: -1}), coef)
        return out
    if kind == KIND_SIMPLEX and offset == 2:
        coef = Fraction(1, 4 * math.factorial(k))
        for i in range(d):
            _add(out, _unit(d, {i: -2}), coef / 3)
        for i, j in combinations(range(d), 2):
            _add(out, _unit(d, {i: -1, j: -1}), coef)
        return out
    if kind == KIND_SIMPLEX and offset == 3:
        coef = Fraction(1, 8 * math.factorial(k))
        for i, j in combinations(range(d), 2):
            _add(out, _unit(d, {i: -1, j: -2}), coef / 3)
            _add(out, _unit(d, {i: -2, j: -1}), coef / 3)
        for i, j, m in combinations(range(d), 3):
            _add(out, _unit(d, {i: -1, j: -1, m: -1}), coef)
        return out
    raise ValueError("sin fórmula cerrada para kind=%s offset=%d" % (kind, offset))


def leading_discrepancy_coefficient(axes: AxisLengths) -> CertifiedReal:
    """c_{d-2}: |tC ∩ Z^d| - λ(C) t^d ~ c_{d-2} t^{d-2}."""
    poly = closed_form_coefficient(KIND_CROSS, axes.d, 2)
    with iv_precision(settings.precision_bits):
        return CertifiedReal(laurent_iv(poly, [a.to_iv() for a in axes.a]))


def format_exponents(exps: Exponents) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e == 1:
            parts.append("a%d" % (i + 1))
        elif e:
            parts.append("a%d^%d" % (i + 1, e))
    return "*".join(parts) or "1"


def polynomial_report(poly: MainTermPolynomial, digits: int = 30) -> PolynomialReport:
    """Coeficientes en forma simbólica (exponentes -> racional) y decimal certificada."""
    coefficients = []
    for k, (symbolic, numeric) in enumerate(zip(poly.symbolic, poly.numeric)):
        coefficients.append(CoefficientReport(
            k=k,
            symbolic={format_exponents(exps): str(value) for exps, value in sorted(symbolic.items())},
            decimal=nstr(numeric.interval.mid, digits),
            width=nstr(numeric.interval.delta, 3),
        ))
    return PolynomialReport(d=poly.d, kind=poly.kind, axes=[a.to_text() for a in poly.axes.a],
                            coefficients=coefficients)
