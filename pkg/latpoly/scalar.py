import logging
import math
import re
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from mpmath import iv

from .core.config import settings
from .core.errors import PrecisionExhausted, ScalarSyntaxError

logger = logging.getLogger("latpoly.scalar")

Rational = Fraction
Interval = Tuple[Fraction, Fraction]
ScalarLike = Union["AlgebraicScalar", Fraction, int, str, float]

_X = sympy.Symbol("x")
_Y = sympy.Symbol("y")


class ScalarForm(str, Enum):
    rational = "rational"
    quadratic = "quadratic"
    root = "root"


class Trichotomy(str, Enum):
    less = "less"
    equal = "equal"
    greater = "greater"

    @classmethod
    def from_sign(cls, sign: int) -> "Trichotomy":
        if sign < 0:
            return cls.less
        if sign > 0:
            return cls.greater
        return cls.equal


def _bits_for(value: Fraction) -> int:
    """Cota superior de log2 |value| (0 si |value| <= 1)."""
    if value == 0:
        return 0
    num, den = abs(value.numerator), value.denominator
    return max(0, num.bit_length() - den.bit_length() + 1)


def _squarefree_split(n: int) -> Tuple[int, int]:
    """n = f^2 * m con m libre de cuadrados; devuelve (f, m)."""
    f, m = 1, 1
    for prime, exp in sympy.factorint(n).items():
        f *= prime ** (exp // 2)
        if exp % 2:
            m *= prime
    return f, m


def _sqrt_interval(radicand: int, bits: int) -> Interval:
    scaled = radicand << (2 * bits)
    root = math.isqrt(scaled)
    lo = Fraction(root, 1 << bits)
    if root * root == scaled:
        return lo, lo
    return lo, Fraction(root + 1, 1 << bits)


def _scale_interval(coef: Fraction, interval: Interval) -> Interval:
    lo, hi = coef * interval[0], coef * interval[1]
    return (lo, hi) if lo <= hi else (hi, lo)


def _integer_coeffs(coeffs: Sequence[Fraction]) -> Tuple[int, ...]:
    den = 1
    for c in coeffs:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    g = g or 1
    if ints and ints[0] < 0:
        g = -g
    return tuple(c // g for c in ints)


def _poly(coeffs: Sequence[int]) -> sympy.Poly:
    return sympy.Poly(list(coeffs), _X, domain="ZZ")


def _poly_value(coeffs: Sequence[int], point: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * point + c
    return acc


def _to_fraction(value: sympy.Rational) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _count_roots(coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> int:
    return int(_poly(coeffs).count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                         sympy.Rational(hi.numerator, hi.denominator)))


@total_ordering
@dataclass(frozen=True, eq=False)
class AlgebraicScalar:
    """Real algebraico exacto en tres niveles: racional, surd cuadrático o raíz aislada.

    - rational: ``value``
    - quadratic: ``value + surd * sqrt(radicand)`` con radicand libre de cuadrados > 1
    - root: única raíz real de ``coeffs`` (mayor grado primero, irreducible) en ``isolating``
    """

    form: ScalarForm
    value: Fraction = Fraction(0)
    surd: Fraction = Fraction(0)
    radicand: int = 1
    coeffs: Tuple[int, ...] = ()
    isolating: Interval = (Fraction(0), Fraction(0))
    cached_interval: Interval = field(default=(Fraction(0), Fraction(0)), compare=False)
    precision_bits: int = 0

    # --- constructores -------------------------------------------------------------

    @classmethod
    def rational(cls, q: Union[Fraction, int, str]) -> "AlgebraicScalar":
        q = Fraction(q)
        return cls(ScalarForm.rational, value=q, cached_interval=(q, q),
                   precision_bits=settings.precision_bits)

    @classmethod
    def quadratic(cls, r: Union[Fraction, int], s: Union[Fraction, int], radicand: int) -> "AlgebraicScalar":
        r, s = Fraction(r), Fraction(s)
        if radicand < 0:
            raise ScalarSyntaxError("radicando negativo: %s" % radicand)
        if radicand == 0 or s == 0:
            return cls.rational(r)
        factor, core = _squarefree_split(radicand)
        s *= factor
        if core == 1:
            return cls.rational(r + s)
        base = cls(ScalarForm.quadratic, value=r, surd=s, radicand=core, precision_bits=0)
        return base.refine(settings.precision_bits)

    @classmethod
    def sqrt(cls, radicand: Union[int, Fraction]) -> "AlgebraicScalar":
        radicand = Fraction(radicand)
        # sqrt(p/q) = sqrt(p*q)/q
        return cls.quadratic(0, Fraction(1, radicand.denominator), radicand.numerator * radicand.denominator)

    @classmethod
    def root(cls, coeffs: Sequence[int], lo: Union[Fraction, int, str], hi: Union[Fraction, int, str]) -> "AlgebraicScalar":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ScalarSyntaxError("intervalo aislante vacío [%s, %s]" % (lo, hi))
        coeffs = tuple(int(c) for c in coeffs)
        if not coeffs or all(c == 0 for c in coeffs) or len(coeffs) < 2:
            raise ScalarSyntaxError("polinomio constante, no define una raíz")
        if _poly_value(coeffs, lo) * _poly_value(coeffs, hi) > 0:
            raise ScalarSyntaxError("sin cambio de signo en [%s, %s]" % (lo, hi))
        return _from_polynomial(_poly(coeffs), lo, hi)

    @classmethod
    def nth_root(cls, n: int, k: int = 3) -> "AlgebraicScalar":
        if n <= 0:
            raise ScalarSyntaxError("solo raíces reales positivas: %s" % n)
        hi = 1
        while hi ** k < n:
            hi += 1
        return cls.root((1,) + (0,) * (k - 1) + (-n,), max(hi - 1, 0), hi)

    @classmethod
    def parse(cls, text: str) -> "AlgebraicScalar":
        return parse_scalar(text)

    # --- representación ------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.form == ScalarForm.rational

    def minimal_coeffs(self) -> Tuple[int, ...]:
        if self.form == ScalarForm.rational:
            return _integer_coeffs((Fraction(1), -self.value))
        if self.form == ScalarForm.quadratic:
            r, s, d = self.value, self.surd, self.radicand
            return _integer_coeffs((Fraction(1), -2 * r, r * r - s * s * d))
        return self.coeffs

    def to_text(self) -> str:
        if self.form == ScalarForm.rational:
            return str(self.value)
        if self.form == ScalarForm.quadratic:
            s = self.surd
            sign = "-" if s < 0 else "+"
            mag = abs(s)
            surd_txt = "sqrt(%d)" % self.radicand if mag == 1 else "%s*sqrt(%d)" % (mag, self.radicand)
            if self.value == 0:
                return ("-" if s < 0 else "") + surd_txt
            return "%s%s%s" % (self.value, sign, surd_txt)
        coeffs = ",".join(str(c) for c in self.coeffs)
        return "root(%s; %s, %s)" % (coeffs, self.isolating[0], self.isolating[1])

    def __repr__(self) -> str:
        return "AlgebraicScalar(%s)" % self.to_text()

    def __str__(self) -> str:
        return self.to_text()

    def __float__(self) -> float:
        lo, hi = self.cached_interval
        return float((lo + hi) / 2)

    def __hash__(self) -> int:
        if self.form == ScalarForm.rational:
            return hash(self.value)
        if self.form == ScalarForm.quadratic:
            return hash((self.value, self.surd, self.radicand))
        return hash(self.coeffs)

    # --- precisión -----------------------------------------------------------------

    def refine(self, bits: int) -> "AlgebraicScalar":
        return refine(self, bits)

    def interval(self, bits: Optional[int] = None) -> Interval:
        bits = bits or settings.precision_bits
        if bits <= self.precision_bits:
            return self.cached_interval
        return _interval_at(self, bits)

    def to_iv(self, bits: Optional[int] = None):
        """Intervalo mpmath (redondeo dirigido) que contiene el valor exacto."""
        lo, hi = self.interval(bits)
        return fraction_interval_iv(lo, hi)

    def to_mpf(self, bits: Optional[int] = None) -> mpmath.mpf:
        lo, hi = self.interval(bits)
        mid = (lo + hi) / 2
        return mpmath.mpf(mid.numerator) / mid.denominator

    # --- signo y orden -------------------------------------------------------------

    def sign(self) -> int:
        if self.form == ScalarForm.rational:
            return (self.value > 0) - (self.value < 0)
        if self.form == ScalarForm.quadratic:
            r, s, d = self.value, self.surd, self.radicand
            if r == 0 or (r > 0) == (s > 0):
                return 1 if (s > 0 if r == 0 else r > 0) else -1
            # r y s de signo opuesto: compara r^2 con s^2 D (nunca iguales, D no es cuadrado)
            dominant = r if r * r > s * s * d else s
            return 1 if dominant > 0 else -1
        bits = max(self.precision_bits, 64)
        while True:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
            if bits > settings.precision_cap:
                raise PrecisionExhausted("signo de %s sin decidir a %d bits" % (self.to_text(), bits // 2))

    def compare(self, other: ScalarLike) -> int:
        other = as_scalar(other)
        if self.form != ScalarForm.root and other.form != ScalarForm.root:
            return sign_of_combination([(1, self), (-1, other)])
        if self.form == ScalarForm.root and other.form == ScalarForm.root and roots_equal(self, other):
            return 0
        return (self - other).sign()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (AlgebraicScalar, Fraction, int)):
            return NotImplemented
        return self.compare(other) == 0

    def __lt__(self, other: ScalarLike) -> bool:
        return self.compare(other) < 0

    # --- aritmética ----------------------------------------------------------------

    def __neg__(self) -> "AlgebraicScalar":
        if self.form == ScalarForm.rational:
            return AlgebraicScalar.rational(-self.value)
        if self.form == ScalarForm.quadratic:
            return AlgebraicScalar.quadratic(-self.value, -self.surd, self.radicand)
        n = len(self.coeffs) - 1
        coeffs = _integer_coeffs([c * (-1) ** (n - i) for i, c in enumerate(self.coeffs)])
        lo, hi = self.isolating
        return _build_root(coeffs, -hi, -lo)

    def __add__(self, other: ScalarLike) -> "AlgebraicScalar":
        other = as_scalar(other)
        if self.form == ScalarForm.rational and other.form != ScalarForm.root:
            return AlgebraicScalar.quadratic(self.value + other.value, other.surd, other.radicand)
        if other.form == ScalarForm.rational and self.form != ScalarForm.root:
            return AlgebraicScalar.quadratic(self.value + other.value, self.surd, self.radicand)
        if (self.form == other.form == ScalarForm.quadratic) and self.radicand == other.radicand:
            return AlgebraicScalar.quadratic(self.value + other.value, self.surd + other.surd, self.radicand)
        if other.form == ScalarForm.rational and other.value == 0:
            return self
        return _combine(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "AlgebraicScalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other: ScalarLike) -> "AlgebraicScalar":
        return as_scalar(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "AlgebraicScalar":
        other = as_scalar(other)
        if other.form == ScalarForm.rational:
            return self._scale(other.value)
        if self.form == ScalarForm.rational:
            return other._scale(self.value)
        if self.form == other.form == ScalarForm.quadratic and self.radicand == other.radicand:
            r1, s1, r2, s2, d = self.value, self.surd, other.value, other.surd, self.radicand
            return AlgebraicScalar.quadratic(r1 * r2 + s1 * s2 * d, r1 * s2 + r2 * s1, d)
        if self.form == other.form == ScalarForm.quadratic and self.value == 0 and other.value == 0:
            return AlgebraicScalar.quadratic(0, self.surd * other.surd, self.radicand * other.radicand)
        return _combine(self, other, "mul")

    __rmul__ = __mul__

    def _scale(self, q: Fraction) -> "AlgebraicScalar":
        if q == 0:
            return AlgebraicScalar.rational(0)
        if self.form == ScalarForm.rational:
            return AlgebraicScalar.rational(self.value * q)
        if self.form == ScalarForm.quadratic:
            return AlgebraicScalar.quadratic(self.value * q, self.surd * q, self.radicand)
        n = len(self.coeffs) - 1
        coeffs = _integer_coeffs([Fraction(c) * q ** i for i, c in enumerate(self.coeffs)])
        lo, hi = _scale_interval(q, self.isolating)
        return _build_root(coeffs, lo, hi)

    def reciprocal(self) -> "AlgebraicScalar":
        if self.form == ScalarForm.rational:
            if self.value == 0:
                raise ZeroDivisionError("recíproco de 0")
            return AlgebraicScalar.rational(1 / self.value)
        if self.form == ScalarForm.quadratic:
            r, s, d = self.value, self.surd, self.radicand
            norm = r * r - s * s * d
            return AlgebraicScalar.quadratic(r / norm, -s / norm, d)
        lo, hi = self.cached_interval
        bits = max(self.precision_bits, 64)
        while lo <= 0 <= hi:
            bits *= 2
            lo, hi = self.interval(bits)
        return _build_root(tuple(reversed(self.coeffs)), 1 / hi, 1 / lo)

    def __truediv__(self, other: ScalarLike) -> "AlgebraicScalar":
        return self * as_scalar(other).reciprocal()

    def __rtruediv__(self, other: ScalarLike) -> "AlgebraicScalar":
        return as_scalar(other) * self.reciprocal()

    def __pow__(self, exponent: int) -> "AlgebraicScalar":
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = AlgebraicScalar.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result


def as_scalar(value: ScalarLike) -> AlgebraicScalar:
    if isinstance(value, AlgebraicScalar):
        return value
    if isinstance(value, (Fraction, int)):
        return AlgebraicScalar.rational(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ScalarSyntaxError("valor no finito: %r" % value)
        return AlgebraicScalar.rational(Fraction(value))
    if isinstance(value, str):
        return parse_scalar(value)
    raise TypeError("no se puede convertir %r a escalar" % (value,))


def as_exact(value: ScalarLike) -> Union[Fraction, AlgebraicScalar]:
    """Racional si el valor lo es (camino rápido), escalar en otro caso."""
    scalar = as_scalar(value)
    return scalar.value if scalar.is_rational else scalar


# --- intervalos ----------------------------------------------------------------------


@contextmanager
def iv_precision(bits: int) -> Iterator[None]:
    previous = iv.prec
    iv.prec = max(bits, 53)
    try:
        yield
    finally:
        iv.prec = previous


def fraction_interval_iv(lo: Fraction, hi: Fraction):
    lo_iv = iv.mpf(lo.numerator) / lo.denominator
    hi_iv = iv.mpf(hi.numerator) / hi.denominator
    return iv.mpf([lo_iv.a, hi_iv.b])


@lru_cache(maxsize=4096)
def _interval_at(x: AlgebraicScalar, bits: int) -> Interval:
    if x.form == ScalarForm.rational:
        return x.value, x.value
    if x.form == ScalarForm.quadratic:
        k = bits + _bits_for(x.surd) + 1
        lo, hi = _scale_interval(x.surd, _sqrt_interval(x.radicand, k))
        return x.value + lo, x.value + hi
    lo, hi = x.isolating
    if _poly_value(x.coeffs, lo) == 0:
        return lo, lo
    if _poly_value(x.coeffs, hi) == 0:
        return hi, hi
    eps = sympy.Rational(1, 2 ** (bits - 1))
    s, t = _poly(x.coeffs).refine_root(sympy.Rational(lo.numerator, lo.denominator),
                                       sympy.Rational(hi.numerator, hi.denominator), eps=eps)
    return _to_fraction(min(s, t)), _to_fraction(max(s, t))


def refine(x: AlgebraicScalar, bits: int) -> AlgebraicScalar:
    if bits < x.precision_bits:
        raise ValueError("refine exige bits >= precision_bits actual (%d < %d)" % (bits, x.precision_bits))
    if bits > settings.precision_cap:
        raise PrecisionExhausted("%d bits supera el tope configurado (%d)" % (bits, settings.precision_cap))
    if x.form == ScalarForm.rational:
        return replace(x, cached_interval=(x.value, x.value), precision_bits=bits)
    lo, hi = _interval_at(x, bits)
    if x.precision_bits:
        old_lo, old_hi = x.cached_interval
        lo, hi = max(lo, old_lo), min(hi, old_hi)
    return replace(x, cached_interval=(lo, hi), precision_bits=bits)


# --- raíces y aritmética general -----------------------------------------------------


def _build_root(coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> AlgebraicScalar:
    return _from_polynomial(_poly(coeffs), lo, hi)


def _from_polynomial(poly: sympy.Poly, lo: Fraction, hi: Fraction) -> AlgebraicScalar:
    """Selecciona el factor irreducible con raíz en [lo, hi] y lo lleva al nivel más estrecho."""
    _, factors = poly.factor_list()
    found = []
    for factor, _mult in factors:
        coeffs = _integer_coeffs([int(c) for c in factor.all_coeffs()])
        count = _count_roots(coeffs, lo, hi)
        if count:
            found.append((coeffs, count))
    if len(found) != 1 or found[0][1] != 1:
        raise ScalarSyntaxError("el intervalo [%s, %s] no aísla una única raíz" % (lo, hi))
    return _from_irreducible(found[0][0], lo, hi)


def _from_irreducible(coeffs: Tuple[int, ...], lo: Fraction, hi: Fraction) -> AlgebraicScalar:
    degree = len(coeffs) - 1
    if degree == 1:
        return AlgebraicScalar.rational(Fraction(-coeffs[1], coeffs[0]))
    if degree == 2:
        a, b, c = (Fraction(v) for v in coeffs)
        disc = b * b - 4 * a * c
        r = -b / (2 * a)
        for s in (1 / (2 * a), -1 / (2 * a)):
            candidate = AlgebraicScalar.quadratic(r, s, int(disc))
            if candidate.compare(lo) >= 0 and candidate.compare(hi) <= 0:
                return candidate
        raise ScalarSyntaxError("no se pudo identificar la raíz cuadrática en [%s, %s]" % (lo, hi))
    if coeffs[0] < 0:
        coeffs = tuple(-c for c in coeffs)
    base = AlgebraicScalar(ScalarForm.root, coeffs=coeffs, isolating=(lo, hi),
                           cached_interval=(lo, hi), precision_bits=0)
    return refine(base, settings.precision_bits)


def _combine(x: AlgebraicScalar, y: AlgebraicScalar, op: str) -> AlgebraicScalar:
    p = sum(c * _X ** k for k, c in enumerate(reversed(x.minimal_coeffs())))
    q_coeffs = y.minimal_coeffs()
    q = sum(c * _Y ** k for k, c in enumerate(reversed(q_coeffs)))
    if op == "add":
        composed = sympy.resultant(p.subs(_X, _X - _Y), q, _Y)
    else:
        n = len(x.minimal_coeffs()) - 1
        homog = sum(c * _X ** k * _Y ** (n - k) for k, c in enumerate(reversed(x.minimal_coeffs())))
        composed = sympy.resultant(homog, q, _Y)
    poly = sympy.Poly(sympy.expand(composed), _X, domain="ZZ")
    _, factors = poly.factor_list()
    candidates = [_integer_coeffs([int(c) for c in f.all_coeffs()]) for f, _m in factors]
    bits = max(settings.precision_bits, 64)
    while True:
        xi, yi = x.interval(bits), y.interval(bits)
        if op == "add":
            lo, hi = xi[0] + yi[0], xi[1] + yi[1]
        else:
            products = [a * b for a in xi for b in yi]
            lo, hi = min(products), max(products)
        hits = [(c, _count_roots(c, lo, hi)) for c in candidates if len(c) > 1]
        hits = [(c, n) for c, n in hits if n]
        if len(hits) == 1 and hits[0][1] == 1:
            return _from_irreducible(hits[0][0], lo, hi)
        bits *= 2
        if bits > settings.precision_cap:
            raise PrecisionExhausted("no se pudo aislar %s %s %s" % (x.to_text(), op, y.to_text()))


def roots_equal(x: AlgebraicScalar, y: AlgebraicScalar) -> bool:
    """Igualdad de raíces: gcd de los polinomios con raíz en la intersección de intervalos."""
    lo = max(x.isolating[0], y.isolating[0])
    hi = min(x.isolating[1], y.isolating[1])
    if lo > hi:
        return False
    g = sympy.gcd(_poly(x.coeffs), _poly(y.coeffs))
    if g.degree() < 1:
        return False
    return _count_roots(_integer_coeffs([int(c) for c in g.all_coeffs()]), lo, hi) >= 1


# --- combinaciones lineales exactas -------------------------------------------------


class SurdSum:
    """Combinación Q-lineal de raíces cuadradas libres de cuadrados; la clave 1 es la parte racional."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, Fraction]] = None):
        self.terms: Dict[int, Fraction] = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def of(cls, x: AlgebraicScalar) -> "SurdSum":
        if x.form == ScalarForm.rational:
            return cls({1: x.value})
        if x.form == ScalarForm.quadratic:
            return cls({1: x.value, x.radicand: x.surd})
        raise TypeError("SurdSum solo admite niveles racional y cuadrático")

    def add_term(self, coef: Fraction, radicand: int) -> None:
        if coef == 0:
            return
        total = self.terms.get(radicand, Fraction(0)) + coef
        if total == 0:
            self.terms.pop(radicand, None)
        else:
            self.terms[radicand] = total

    def __add__(self, other: "SurdSum") -> "SurdSum":
        out = SurdSum(dict(self.terms))
        for k, v in other.terms.items():
            out.add_term(v, k)
        return out

    def __mul__(self, other: "SurdSum") -> "SurdSum":
        out = SurdSum()
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                g = math.gcd(d1, d2)
                # sqrt(d1 d2) = g sqrt(d1 d2 / g^2), libre de cuadrados si d1, d2 lo son
                out.add_term(c1 * c2 * g, (d1 // g) * (d2 // g))
        return out

    def scale(self, q: Fraction) -> "SurdSum":
        return SurdSum({k: v * q for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def interval(self, bits: int) -> Interval:
        lo = hi = Fraction(0)
        for radicand, coef in self.terms.items():
            if radicand == 1:
                lo += coef
                hi += coef
                continue
            a, b = _scale_interval(coef, _sqrt_interval(radicand, bits + _bits_for(coef) + 1))
            lo += a
            hi += b
        return lo, hi

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if set(self.terms) == {1}:
            v = self.terms[1]
            return (v > 0) - (v < 0)
        bits = 64
        while bits <= settings.precision_cap:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise PrecisionExhausted("combinación de surds no separada a %d bits" % settings.precision_cap)

    def to_scalar(self) -> AlgebraicScalar:
        result = AlgebraicScalar.rational(self.terms.get(1, Fraction(0)))
        for radicand, coef in self.terms.items():
            if radicand != 1:
                result = result + AlgebraicScalar.quadratic(0, coef, radicand)
        return result


def sign_of_combination(terms: Iterable[Tuple[Union[int, Fraction], ScalarLike]],
                        constant: Union[int, Fraction] = 0) -> int:
    """Signo exacto de constant + sum(coef * x).

    Los niveles racional y cuadrático se deciden siempre (independencia lineal de las
    raíces cuadradas libres de cuadrados); las raíces generales se refinan y, si no
    separan, se combinan exactamente.
    """
    surds = SurdSum({1: Fraction(constant)})
    roots: List[Tuple[Fraction, AlgebraicScalar]] = []
    for coef, x in terms:
        coef = Fraction(coef)
        if coef == 0:
            continue
        if isinstance(x, (int, Fraction)):
            surds.add_term(coef * x, 1)
            continue
        x = as_scalar(x)
        if x.form == ScalarForm.rational:
            surds.add_term(coef * x.value, 1)
        elif x.form == ScalarForm.quadratic:
            surds.add_term(coef * x.value, 1)
            surds.add_term(coef * x.surd, x.radicand)
        else:
            for i, (c0, r0) in enumerate(roots):
                if r0.coeffs == x.coeffs and roots_equal(r0, x):
                    roots[i] = (c0 + coef, r0)
                    break
            else:
                roots.append((coef, x))
    roots = [(c, r) for c, r in roots if c != 0]
    if not roots:
        return surds.sign()
    bits = 64
    limit = min(settings.precision_cap, 2 * max(settings.precision_bits, 64))
    while bits <= limit:
        lo, hi = surds.interval(bits)
        for coef, r in roots:
            a, b = _scale_interval(coef, r.interval(bits))
            lo += a
            hi += b
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    logger.debug("Combinación con raíces sin separar a %d bits; se combina exactamente", limit)
    total = surds.to_scalar()
    for coef, r in roots:
        total = total + r._scale(coef)
    return total.sign()


def compare_to_integer_multiple(x: ScalarLike, t: ScalarLike, n: int) -> Trichotomy:
    """Tricotomía exacta de x*t frente al entero n."""
    x = as_scalar(x)
    t = as_scalar(t)
    if t.form == ScalarForm.rational:
        return Trichotomy.from_sign(sign_of_combination([(t.value, x)], -n))
    if x.form == ScalarForm.rational:
        return Trichotomy.from_sign(sign_of_combination([(x.value, t)], -n))
    if x.form != ScalarForm.root and t.form != ScalarForm.root:
        product = SurdSum.of(x) * SurdSum.of(t)
        product.add_term(Fraction(-n), 1)
        return Trichotomy.from_sign(product.sign())
    return Trichotomy.from_sign((x * t).compare(n))


def floor_scalar(x: ScalarLike) -> int:
    x = as_scalar(x)
    if x.is_rational:
        return math.floor(x.value)
    lo, hi = x.interval()
    candidate = math.floor(lo)
    if math.floor(hi) == candidate:
        return candidate
    return candidate + 1 if x.compare(candidate + 1) >= 0 else candidate


def fixed_point(x: ScalarLike, bits: int) -> int:
    """floor(x * 2^bits) con error de a lo sumo una unidad."""
    x = as_scalar(x)
    if x.is_rational:
        return math.floor(x.value * (1 << bits))
    lo, _ = x.interval(bits + 2)
    return math.floor(lo * (1 << bits))


def detect_rational_dependence(xs: Sequence[ScalarLike], precision_bits: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """Búsqueda orientativa de relación entera (PSLQ); nunca prueba independencia."""
    bits = precision_bits or settings.precision_bits
    if len(xs) < 2:
        raise ValueError("se necesitan al menos dos escalares")
    if bits > settings.precision_cap:
        raise PrecisionExhausted("%d bits supera el tope configurado" % bits)
    scalars = [as_scalar(x) for x in xs]
    with mpmath.workprec(bits + 16):
        values = [s.to_mpf(bits + 16) for s in scalars]
        tol = mpmath.mpf(2) ** (-(bits // 2))
        relation = mpmath.pslq(values, tol=tol, maxcoeff=10 ** 6, maxsteps=10 ** 5)
    if relation is None:
        return None
    g = 0
    for c in relation:
        g = math.gcd(g, int(c))
    rel = [int(c) // (g or 1) for c in relation]
    first = next(c for c in rel if c != 0)
    if first < 0:
        rel = [-c for c in rel]
    # comprobación al doble de precisión con intervalos exactos
    check_bits = 2 * bits
    lo = hi = Fraction(0)
    for c, s in zip(rel, scalars):
        if c:
            a, b = _scale_interval(Fraction(c), s.interval(check_bits))
            lo, hi = lo + a, hi + b
    if max(abs(lo), abs(hi)) >= Fraction(1, 1 << bits):
        logger.warning("Relación PSLQ %s descartada: residuo %.3g a %d bits", rel, float(max(abs(lo), abs(hi))), check_bits)
        return None
    logger.debug("Relación entera detectada: %s", rel)
    return tuple(rel)


# --- sintaxis textual ----------------------------------------------------------------

_NUM = r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?:/\d+)?"
_QUAD_RE = re.compile(
    rf"^(?P<r>[+-]?{_NUM})?(?P<sign>[+-])?(?:(?P<s>{_NUM})\*)?sqrt\((?P<d>\d+(?:/\d+)?)\)$"
)
_ROOT_RE = re.compile(r"^root\((?P<coeffs>[^;]+);(?P<lo>[^,]+),(?P<hi>[^)]+)\)$")
_CBRT_RE = re.compile(r"^cbrt\((?P<n>\d+)\)$")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScalarSyntaxError("racional mal formado: %r" % text) from exc


def parse_scalar(text: str) -> AlgebraicScalar:
    if not isinstance(text, str):
        raise ScalarSyntaxError("se esperaba texto: %r" % (text,))
    compact = "".join(text.split())
    if not compact:
        raise ScalarSyntaxError("escalar vacío")
    try:
        return AlgebraicScalar.rational(Fraction(compact))
    except (ValueError, ZeroDivisionError):
        pass
    if compact.startswith("1/(") and compact.endswith(")"):
        return parse_scalar(compact[3:-1]).reciprocal()
    if compact.startswith("1/") and (compact[2:].startswith("sqrt(") or compact[2:].startswith("cbrt(")):
        return parse_scalar(compact[2:]).reciprocal()
    match = _CBRT_RE.match(compact)
    if match:
        return AlgebraicScalar.nth_root(int(match.group("n")), 3)
    match = _ROOT_RE.match(compact)
    if match:
        try:
            coeffs = [int(c) for c in match.group("coeffs").split(",")]
        except ValueError as exc:
            raise ScalarSyntaxError("coeficientes enteros esperados en %r" % text) from exc
        return AlgebraicScalar.root(coeffs, _parse_fraction(match.group("lo")), _parse_fraction(match.group("hi")))
    match = _QUAD_RE.match(compact)
    if match:
        r_txt, sign, s_txt = match.group("r"), match.group("sign"), match.group("s")
        if r_txt is not None and sign is None:
            raise ScalarSyntaxError("falta el operador entre la parte racional y la raíz: %r" % text)
        r = _parse_fraction(r_txt) if r_txt else Fraction(0)
        s = _parse_fraction(s_txt) if s_txt else Fraction(1)
        if sign == "-":
            s = -s
        radicand = _parse_fraction(match.group("d"))
        root = AlgebraicScalar.sqrt(radicand)
        return root * s + r
    raise ScalarSyntaxError("escalar mal formado: %r" % text)


def split_top_level(text: str, sep: str = ",") -> List[str]:
    """Divide por ``sep`` ignorando separadores dentro de paréntesis o corchetes."""
    parts: List[str] = []
    depth = 0
    current: List[str] = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ScalarSyntaxError("paréntesis desbalanceados en %r" % text)
        if ch == sep and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ScalarSyntaxError("paréntesis desbalanceados en %r" % text)
    tail = "".join(current).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def parse_scalar_list(text: str) -> List[AlgebraicScalar]:
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    items = split_top_level(body)
    if any(not item for item in items):
        raise ScalarSyntaxError("lista con elementos vacíos: %r" % text)
    return [parse_scalar(item) for item in items]
