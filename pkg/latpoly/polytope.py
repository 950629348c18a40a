import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

from .core.errors import ConfigError, DegenerateSimplex
from .scalar import (
    AlgebraicScalar,
    ScalarLike,
    as_scalar,
    detect_rational_dependence,
    parse_scalar,
    parse_scalar_list,
    sign_of_combination,
    split_top_level,
)

logger = logging.getLogger("latpoly.polytope")

Point = Sequence[Fraction]


class Location(str, Enum):
    interior = "interior"
    boundary = "boundary"
    outside = "outside"


@dataclass(frozen=True)
class AxisLengths:
    a: Tuple[AlgebraicScalar, ...]

    def __post_init__(self) -> None:
        if not self.a:
            raise ConfigError("se necesita al menos un eje (d >= 1)")
        for i, value in enumerate(self.a):
            if value.sign() <= 0:
                raise ConfigError("a_%d debe ser positivo (%s)" % (i + 1, value.to_text()))

    @classmethod
    def of(cls, values: Sequence[ScalarLike]) -> "AxisLengths":
        return cls(tuple(as_scalar(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "AxisLengths":
        return cls(tuple(parse_scalar_list(text)))

    @property
    def d(self) -> int:
        return len(self.a)

    @cached_property
    def inv_a(self) -> Tuple[AlgebraicScalar, ...]:
        return tuple(v.reciprocal() for v in self.a)

    @cached_property
    def floats(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.a)

    @cached_property
    def product(self) -> AlgebraicScalar:
        result = AlgebraicScalar.rational(1)
        for value in self.a:
            result = result * value
        return result

    @property
    def all_integer(self) -> bool:
        return all(v.is_rational and v.value.denominator == 1 for v in self.a)

    def sub(self, support: Sequence[int]) -> "AxisLengths":
        return AxisLengths(tuple(self.a[i] for i in support))

    def independence_relation(self, precision_bits: Optional[int] = None) -> Optional[Tuple[int, ...]]:
        """Relación entera entre 1, 1/a_1, ..., 1/a_d (orientativa)."""
        return detect_rational_dependence((AlgebraicScalar.rational(1),) + self.inv_a, precision_bits)

    def to_text(self) -> str:
        return "[%s]" % ", ".join(v.to_text() for v in self.a)


@dataclass(frozen=True)
class CrossPolytope:
    axes: AxisLengths

    @property
    def d(self) -> int:
        return self.axes.d


@dataclass(frozen=True)
class CornerSimplex:
    axes: AxisLengths
    sign: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.sign:
            object.__setattr__(self, "sign", (1,) * self.axes.d)
        if len(self.sign) != self.axes.d or any(s not in (1, -1) for s in self.sign):
            raise ConfigError("sign debe tener %d entradas en {1, -1}" % self.axes.d)

    @property
    def d(self) -> int:
        return self.axes.d

    def as_general(self) -> "GeneralSimplex":
        d = self.d
        vertices = []
        for j in range(d):
            vertex = [AlgebraicScalar.rational(0)] * d
            vertex[j] = self.axes.a[j] * self.sign[j]
            vertices.append(tuple(vertex))
        vertices.append(tuple(AlgebraicScalar.rational(0) for _ in range(d)))
        return GeneralSimplex(tuple(vertices))


@dataclass(frozen=True)
class FacePolytope:
    """Cara C_I: cross-polytope de los ejes en ``support`` (índices 0-based), cero fuera."""

    axes: AxisLengths
    support: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        support = tuple(sorted(set(self.support)))
        if any(i < 0 or i >= self.axes.d for i in support):
            raise ConfigError("soporte fuera de rango: %s" % (self.support,))
        object.__setattr__(self, "support", support)

    @property
    def d(self) -> int:
        return self.axes.d

    @property
    def sub_cross(self) -> Optional[CrossPolytope]:
        if not self.support:
            return None
        return CrossPolytope(self.axes.sub(self.support))


@dataclass(frozen=True)
class GeneralSimplex:
    vertices: Tuple[Tuple[AlgebraicScalar, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.vertices) - 1
        if d < 1 or any(len(v) != d for v in self.vertices):
            raise ConfigError("un d-símplice necesita d+1 vértices de dimensión d")
        if _determinant(self.edge_matrix()).sign() == 0:
            raise DegenerateSimplex("vértices afínmente dependientes")

    @classmethod
    def of(cls, vertices: Sequence[Sequence[ScalarLike]]) -> "GeneralSimplex":
        return cls(tuple(tuple(as_scalar(c) for c in v) for v in vertices))

    @classmethod
    def standard(cls, d: int) -> "GeneralSimplex":
        rows = [[1 if i == j else 0 for i in range(d)] for j in range(d)]
        rows.append([0] * d)
        return cls.of(rows)

    @property
    def d(self) -> int:
        return len(self.vertices) - 1

    @property
    def apex(self) -> Tuple[AlgebraicScalar, ...]:
        return self.vertices[-1]

    def edge_matrix(self) -> List[List[AlgebraicScalar]]:
        """Matriz M (por filas) con columnas v_j - v_{d+1}: x = v_{d+1} + M u."""
        base = self.vertices[-1]
        d = len(base)
        return [[self.vertices[j][i] - base[i] for j in range(d)] for i in range(d)]

    def float_vertices(self) -> List[List[float]]:
        return [[float(c) for c in v] for v in self.vertices]


Polytope = Union[CrossPolytope, CornerSimplex, FacePolytope, GeneralSimplex]


def _determinant(rows: List[List[AlgebraicScalar]]) -> AlgebraicScalar:
    if all(entry.is_rational for row in rows for entry in row):
        matrix = sympy.Matrix([[sympy.Rational(e.value.numerator, e.value.denominator) for e in row] for row in rows])
        det = sympy.Rational(matrix.det(method="bareiss"))
        return AlgebraicScalar.rational(Fraction(int(det.p), int(det.q)))
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = AlgebraicScalar.rational(0)
    for j, entry in enumerate(rows[0]):
        if entry.is_rational and entry.value == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = entry * _determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def volume(polytope: Polytope) -> AlgebraicScalar:
    if isinstance(polytope, CrossPolytope):
        d = polytope.d
        return polytope.axes.product * Fraction(2 ** d, math.factorial(d))
    if isinstance(polytope, CornerSimplex):
        return polytope.axes.product * Fraction(1, math.factorial(polytope.d))
    if isinstance(polytope, FacePolytope):
        sub = polytope.sub_cross
        return AlgebraicScalar.rational(1) if sub is None else volume(sub)
    if isinstance(polytope, GeneralSimplex):
        det = _determinant(polytope.edge_matrix())
        if det.sign() == 0:
            raise DegenerateSimplex("determinante nulo")
        return (det if det.sign() > 0 else -det) * Fraction(1, math.factorial(polytope.d))
    raise TypeError("politopo no soportado: %r" % (polytope,))


def _classify(signs: Sequence[int]) -> Location:
    """signs: signo de cada restricción escrita como g >= 0."""
    if any(s < 0 for s in signs):
        return Location.outside
    if any(s == 0 for s in signs):
        return Location.boundary
    return Location.interior


def rational_point(x: Sequence[ScalarLike]) -> List[Fraction]:
    point = []
    for c in x:
        value = as_scalar(c)
        if not value.is_rational:
            raise ValueError("las coordenadas del punto deben ser racionales: %s" % value.to_text())
        point.append(value.value)
    return point


def contains(polytope: Polytope, x: Sequence[ScalarLike], t: ScalarLike = 1) -> Location:
    point = rational_point(x)
    t = as_scalar(t)
    if t.sign() <= 0:
        raise ValueError("t debe ser positivo")
    if len(point) != polytope.d:
        raise ValueError("punto de dimensión %d para politopo de dimensión %d" % (len(point), polytope.d))
    if isinstance(polytope, CrossPolytope):
        slack = sign_of_combination([(-abs(c), inv) for c, inv in zip(point, polytope.axes.inv_a)] + [(1, t)])
        return _classify([slack])
    if isinstance(polytope, CornerSimplex):
        signed = [c * s for c, s in zip(point, polytope.sign)]
        slack = sign_of_combination([(-c, inv) for c, inv in zip(signed, polytope.axes.inv_a)] + [(1, t)])
        return _classify([(c > 0) - (c < 0) for c in signed] + [slack])
    if isinstance(polytope, FacePolytope):
        if any(point[i] != 0 for i in range(polytope.d) if i not in polytope.support):
            return Location.outside
        sub = polytope.sub_cross
        if sub is None:
            return Location.interior
        return contains(sub, [point[i] for i in polytope.support], t)
    if isinstance(polytope, GeneralSimplex):
        return _classify(_barycentric_signs(polytope, point, t))
    raise TypeError("politopo no soportado: %r" % (polytope,))


def _barycentric_signs(simplex: GeneralSimplex, point: Sequence[Fraction], t: AlgebraicScalar) -> List[int]:
    # x en tS  <=>  x/t = v_{d+1} + M u con u >= 0 y sum(u) <= 1 (regla de Cramer)
    matrix = simplex.edge_matrix()
    det = _determinant(matrix)
    inv_t = t.reciprocal()
    rhs = [inv_t * c - simplex.apex[i] for i, c in enumerate(point)]
    coords = []
    for j in range(simplex.d):
        replaced = [row[:j] + [rhs[i]] + row[j + 1:] for i, row in enumerate(matrix)]
        coords.append(_determinant(replaced))
    # u_j = coords_j / det; comparar signos multiplicando por det
    det_sign = det.sign()
    signs = [c.sign() * det_sign for c in coords]
    remainder = det
    for c in coords:
        remainder = remainder - c
    signs.append(remainder.sign() * det_sign)
    return signs


def triangulate_cross(polytope: CrossPolytope) -> List[CornerSimplex]:
    return [CornerSimplex(polytope.axes, sign) for sign in product((1, -1), repeat=polytope.d)]


# --- especificación textual ----------------------------------------------------------

_KINDS = ("cross", "simplex", "corner", "face", "standard")


def _fields(text: str) -> Tuple[str, Dict[str, str]]:
    compact = re.sub(r"\s*=\s*", "=", " ".join(text.split()))
    tokens = [tok for tok in split_top_level(compact, " ") if tok]
    if not tokens or tokens[0] not in _KINDS:
        raise ConfigError("tipo de politopo desconocido en %r (use %s)" % (text, ", ".join(_KINDS)))
    values: Dict[str, str] = {}
    for token in tokens[1:]:
        if "=" not in token:
            raise ConfigError("campo sin '=' en la especificación: %r" % token)
        key, value = token.split("=", 1)
        values[key] = value
    return tokens[0], values


def _int_list(text: str) -> List[int]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ConfigError("lista entre corchetes esperada: %r" % text)
    inner = body[1:-1].strip()
    if not inner:
        return []
    try:
        return [int(v) for v in inner.split(",")]
    except ValueError as exc:
        raise ConfigError("enteros esperados en %r" % text) from exc


def parse_polytope(text: str) -> Polytope:
    kind, values = _fields(text)
    if kind == "standard" or (kind == "simplex" and "vertices" in values):
        if kind == "standard":
            if "d" not in values:
                raise ConfigError("standard requiere d=")
            return GeneralSimplex.standard(int(values["d"]))
        body = values["vertices"].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ConfigError("vertices debe ser una lista de puntos")
        vertices = [parse_scalar_list(item) for item in split_top_level(body[1:-1])]
        return GeneralSimplex(tuple(tuple(v) for v in vertices))
    if "a" not in values:
        raise ConfigError("falta a=[...] en %r" % text)
    axes = AxisLengths.parse(values["a"])
    if "d" in values and int(values["d"]) != axes.d:
        raise ConfigError("d=%s no coincide con %d ejes" % (values["d"], axes.d))
    if kind == "cross":
        return CrossPolytope(axes)
    if kind == "simplex":
        return CornerSimplex(axes)
    if kind == "corner":
        return CornerSimplex(axes, tuple(_int_list(values.get("sign", "[]"))))
    support = _int_list(values.get("I", "[]"))
    # índices 1-based en texto
    return FacePolytope(axes, tuple(i - 1 for i in support))


def to_spec(polytope: Polytope) -> str:
    if isinstance(polytope, CrossPolytope):
        return "cross d=%d a=%s" % (polytope.d, polytope.axes.to_text())
    if isinstance(polytope, CornerSimplex):
        if all(s == 1 for s in polytope.sign):
            return "simplex d=%d a=%s" % (polytope.d, polytope.axes.to_text())
        return "corner d=%d a=%s sign=[%s]" % (
            polytope.d, polytope.axes.to_text(), ", ".join(str(s) for s in polytope.sign)
        )
    if isinstance(polytope, FacePolytope):
        return "face d=%d a=%s I=[%s]" % (
            polytope.d, polytope.axes.to_text(), ", ".join(str(i + 1) for i in polytope.support)
        )
    vertices = ", ".join("[%s]" % ", ".join(c.to_text() for c in v) for v in polytope.vertices)
    return "simplex vertices=[%s]" % vertices


def parse_point(text: str) -> List[AlgebraicScalar]:
    return parse_scalar_list(text)


def parse_dilation(text: str) -> AlgebraicScalar:
    t = parse_scalar(text)
    if t.sign() <= 0:
        raise ConfigError("la dilatación t debe ser positiva: %s" % text)
    return t
