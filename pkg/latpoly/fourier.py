"""Transformada de Fourier de la función característica de símplices dilatados.

Tres caminos independientes: fórmula cerrada (polos simples), residuos exactos con
agrupación de polos y cuadratura trapezoidal sobre el círculo |z| = R. Un cuarto
camino, cuadratura directa sobre el símplice, sirve de oráculo.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss

from .core.config import settings
from .core.errors import NotConverged, PoleCollision
from .polytope import AxisLengths, CrossPolytope, GeneralSimplex, triangulate_cross, volume
from .scalar import AlgebraicScalar, ScalarLike, as_scalar

logger = logging.getLogger("latpoly.fourier")

METHOD_CLOSED = "closed-form"
METHOD_CONTOUR = "contour"
METHOD_RESIDUES = "residues"
METHOD_DIRECT = "direct-oracle"


@dataclass
class FourierEvaluation:
    value: complex
    method: str
    error_bound: float
    frequency: Tuple[str, ...]
    dilation: str

    def as_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "method": self.method,
            "error_bound": self.error_bound,
        }


@dataclass
class PoleConfiguration:
    pole_locations: List[AlgebraicScalar]
    groups: List[Tuple[AlgebraicScalar, int]]

    @classmethod
    def build(cls, poles: Sequence[AlgebraicScalar]) -> "PoleConfiguration":
        groups: List[Tuple[AlgebraicScalar, int]] = []
        for pole in poles:
            for i, (value, mult) in enumerate(groups):
                if pole.compare(value) == 0:
                    groups[i] = (value, mult + 1)
                    break
            else:
                groups.append((pole, 1))
        return cls(pole_locations=list(poles), groups=groups)

    @property
    def all_simple(self) -> bool:
        return all(mult == 1 for _, mult in self.groups)


def _exact_vector(y: Sequence[ScalarLike]) -> List[AlgebraicScalar]:
    return [as_scalar(c) for c in y]


def _dot(v: Sequence[AlgebraicScalar], y: Sequence[AlgebraicScalar]) -> AlgebraicScalar:
    total = AlgebraicScalar.rational(0)
    for a, b in zip(v, y):
        if (a.is_rational and a.value == 0) or (b.is_rational and b.value == 0):
            continue
        total = total + a * b
    return total


def pole_configuration(simplex: GeneralSimplex, y: Sequence[ScalarLike]) -> PoleConfiguration:
    yv = _exact_vector(y)
    if len(yv) != simplex.d:
        raise ValueError("frecuencia de dimensión %d para símplice de dimensión %d" % (len(yv), simplex.d))
    return PoleConfiguration.build([_dot(v, yv) for v in simplex.vertices])


def _labels(y: Sequence[ScalarLike], t: ScalarLike) -> Tuple[Tuple[str, ...], str]:
    return tuple(as_scalar(c).to_text() for c in y), as_scalar(t).to_text()


def _mp(x: AlgebraicScalar, bits: int) -> mpmath.mpf:
    return x.to_mpf(bits)


def ft_standard_simplex(y: Sequence[ScalarLike], t: ScalarLike, precision_bits: Optional[int] = None) -> FourierEvaluation:
    yv = _exact_vector(y)
    d = len(yv)
    for j, value in enumerate(yv):
        if value.sign() == 0:
            raise PoleCollision("y_%d = 0" % (j + 1))
        for k in range(j):
            if value.compare(yv[k]) == 0:
                raise PoleCollision("y_%d = y_%d" % (k + 1, j + 1))
    bits = precision_bits or settings.precision_bits
    t_s = as_scalar(t)
    with mpmath.workprec(bits + 32):
        ys = [_mp(v, bits) for v in yv]
        tt = _mp(t_s, bits)
        total = mpmath.mpc(0)
        magnitude = mpmath.mpf(0)
        for j, yj in enumerate(ys):
            denom = yj
            for k, yk in enumerate(ys):
                if k != j:
                    denom *= yj - yk
            term = (1 - mpmath.expj(-2 * mpmath.pi * yj * tt)) / denom
            total += term
            magnitude += abs(term)
        factor = (-1) ** (d + 1) / (2j * mpmath.pi) ** d
        value = factor * total
        error = abs(factor) * magnitude * mpmath.mpf(2) ** (-bits + 8)
    labels = _labels(y, t)
    return FourierEvaluation(complex(value), METHOD_CLOSED, float(error), labels[0], labels[1])


def ft_closed_form(simplex: GeneralSimplex, y: Sequence[ScalarLike], t: ScalarLike,
                   precision_bits: Optional[int] = None) -> FourierEvaluation:
    """Imagen afín del símplice estándar: d! λ(S) e^{-2πi<v_{d+1},y>t} χ̂_{tS_0}(M^T y)."""
    yv = _exact_vector(y)
    bits = precision_bits or settings.precision_bits
    apex = simplex.apex
    transformed = [_dot([v[i] - apex[i] for i in range(simplex.d)], yv) for v in simplex.vertices[:-1]]
    base = ft_standard_simplex(transformed, t, bits)
    scale = volume(simplex) * math.factorial(simplex.d)
    with mpmath.workprec(bits + 32):
        shift = mpmath.expj(-2 * mpmath.pi * _mp(_dot(apex, yv), bits) * _mp(as_scalar(t), bits))
        value = _mp(scale, bits) * shift * mpmath.mpc(base.value)
        # base.value llega redondeado a doble precisión
        error = float(_mp(scale, bits)) * base.error_bound + float(abs(value)) * 2.0 ** -50
    labels = _labels(y, t)
    return FourierEvaluation(complex(value), METHOD_CLOSED, error, labels[0], labels[1])


def _series_exp(c: mpmath.mpc, order: int) -> List[mpmath.mpc]:
    """Coeficientes de e^{c w} hasta w^order."""
    coeffs = [mpmath.mpc(1)]
    for n in range(1, order + 1):
        coeffs.append(coeffs[-1] * c / n)
    return coeffs


def _series_mul(a: List, b: List, order: int) -> List:
    out = [mpmath.mpc(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def ft_residues(simplex: GeneralSimplex, y: Sequence[ScalarLike], t: ScalarLike,
                precision_bits: Optional[int] = None) -> FourierEvaluation:
    config = pole_configuration(simplex, y)
    bits = precision_bits or settings.precision_bits
    d = simplex.d
    t_s = as_scalar(t)
    if not config.all_simple:
        logger.debug("Polos coincidentes %s; agrupación exacta", [(p.to_text(), m) for p, m in config.groups])
    with mpmath.workprec(bits + 32):
        tt = _mp(t_s, bits)
        c = -2j * mpmath.pi * tt
        residue_sum = mpmath.mpc(0)
        magnitude = mpmath.mpf(0)
        for index, (pole, mult) in enumerate(config.groups):
            order = mult - 1
            p = _mp(pole, bits)
            series = [mpmath.expj(-2 * mpmath.pi * p * tt) * coef for coef in _series_exp(c, order)]
            for other_index, (other, other_mult) in enumerate(config.groups):
                if other_index == index:
                    continue
                gap = p - _mp(other, bits)
                # 1/(w + gap)^m como serie geométrica
                geometric = [(-1) ** n / gap ** (n + 1) for n in range(order + 1)]
                for _ in range(other_mult):
                    series = _series_mul(series, geometric, order)
            residue = series[order]
            residue_sum += residue
            magnitude += abs(residue)
        lam = _mp(volume(simplex), bits)
        factor = (-1) ** d * math.factorial(d) * lam / (2j * mpmath.pi) ** d
        value = factor * residue_sum
        error = abs(factor) * magnitude * mpmath.mpf(2) ** (-bits + 16)
    labels = _labels(y, t)
    return FourierEvaluation(complex(value), METHOD_RESIDUES, float(error), labels[0], labels[1])


def ft_contour(simplex: GeneralSimplex, y: Sequence[ScalarLike], t: ScalarLike, nodes: int = 64,
               tol: float = 1e-10, radius_scale: float = 1.0,
               precision_bits: Optional[int] = None) -> FourierEvaluation:
    """Regla del trapecio sobre |z| = R = 2 max(1, max|p_j|) * radius_scale."""
    if nodes < 16:
        raise ValueError("nodes debe ser >= 16")
    if radius_scale < 1:
        raise ValueError("radius_scale < 1 no garantiza R > max|p_j|")
    config = pole_configuration(simplex, y)
    bits = precision_bits or settings.precision_bits
    d = simplex.d
    t_f = abs(float(as_scalar(t)))
    poles_f = [float(p) for p in config.pole_locations]
    radius = 2.0 * max(1.0, max(abs(p) for p in poles_f)) * radius_scale
    # |e^{-2πizt}| llega a e^{2πRt} en el círculo: bits extra para la cancelación
    extra = int(math.ceil(2 * math.pi * radius * t_f * math.log2(math.e))) + 32
    # el trapecio converge cuando n supera ~ e·2πRt (coeficientes de Taylor de la exponencial)
    floor_nodes = int(math.e * 2 * math.pi * radius * t_f) + 32
    n = max(nodes, 1 << max(4, (floor_nodes - 1).bit_length()))

    with mpmath.workprec(bits + extra):
        tt = _mp(as_scalar(t), bits)
        poles = [_mp(p, bits) for p in config.pole_locations]
        R = mpmath.mpf(radius)
        lam = _mp(volume(simplex), bits)
        factor = (-1) ** d * math.factorial(d) * lam / (2j * mpmath.pi) ** (d + 1)

        def integral(count: int) -> mpmath.mpc:
            total = mpmath.mpc(0)
            for k in range(count):
                z = R * mpmath.expj(2 * mpmath.pi * k / count)
                denom = mpmath.mpc(1)
                for p in poles:
                    denom *= z - p
                total += mpmath.expj(-2 * mpmath.pi * z * tt) / denom * 1j * z
            return total * 2 * mpmath.pi / count

        previous = factor * integral(n)
        for _ in range(3):
            n *= 2
            current = factor * integral(n)
            diff = abs(current - previous)
            if diff <= tol * max(1, abs(current)):
                labels = _labels(y, t)
                return FourierEvaluation(complex(current), METHOD_CONTOUR, float(diff), labels[0], labels[1])
            previous = current
    raise NotConverged("trapecio sin converger con %d nodos (R=%.3g)" % (n, radius))


def _max_nodes(d: int) -> int:
    return {1: 2048, 2: 512}.get(d, 256)


def ft_direct_oracle(simplex: GeneralSimplex, y: Sequence[ScalarLike], t: ScalarLike,
                     tol: float = 1e-10) -> FourierEvaluation:
    """Cuadratura de Gauss-Legendre tensorial tras el colapso de Duffy cubo -> símplice."""
    d = simplex.d
    if d > 3:
        raise ValueError("el oráculo directo solo admite d <= 3")
    if tol < 1e-12:
        raise ValueError("tol debe ser >= 1e-12")
    t_f = float(as_scalar(t))
    yv = np.array([float(as_scalar(c)) for c in y])
    verts = np.array(simplex.float_vertices())
    apex = verts[-1]
    edges = verts[:-1] - apex  # filas v_j - v_{d+1}
    weights_dir = t_f * edges @ yv  # fase lineal en u
    phase0 = t_f * float(apex @ yv)
    jac = abs(float(np.linalg.det(edges))) * t_f ** d

    def integrate(p: int) -> complex:
        nodes, weights = leggauss(p)
        s = 0.5 * (nodes + 1.0)
        w = 0.5 * weights
        if d == 1:
            vals = np.exp(-2j * np.pi * (phase0 + weights_dir[0] * s))
            return complex(np.sum(w * vals)) * jac
        total = 0.0 + 0.0j
        grids = np.meshgrid(*([s] * (d - 1)), indexing="ij")
        wgrid = np.ones_like(grids[0])
        for g in np.meshgrid(*([w] * (d - 1)), indexing="ij"):
            wgrid = wgrid * g
        for s1, w1 in zip(s, w):
            # u_1 = s1, u_k = (1 - s1)...(1 - s_{k-1}) s_k
            remaining = np.full_like(grids[0], 1.0 - s1)
            phase = phase0 + weights_dir[0] * s1
            jac_local = np.full_like(grids[0], (1.0 - s1) ** (d - 1))
            for k in range(1, d):
                sk = grids[k - 1]
                phase = phase + weights_dir[k] * remaining * sk
                if k < d - 1:
                    jac_local = jac_local * (1.0 - sk) ** (d - 1 - k)
                remaining = remaining * (1.0 - sk)
            total += w1 * np.sum(wgrid * jac_local * np.exp(-2j * np.pi * phase))
        return complex(total) * jac

    p = max(16, int(2 * np.abs(weights_dir).sum()) + 16)
    previous = integrate(p)
    while p < _max_nodes(d):
        p *= 2
        current = integrate(p)
        diff = abs(current - previous)
        if diff <= tol:
            labels = _labels(y, t)
            return FourierEvaluation(current, METHOD_DIRECT, float(diff), labels[0], labels[1])
        previous = current
    raise NotConverged("cuadratura directa sin converger (p=%d, d=%d)" % (p, d))


def ft_cross(axes: AxisLengths, y: Sequence[ScalarLike], t: ScalarLike,
             precision_bits: Optional[int] = None) -> FourierEvaluation:
    """Suma sobre los 2^d símplices de esquina de la triangulación."""
    total = 0j
    error = 0.0
    for corner in triangulate_cross(CrossPolytope(axes)):
        part = ft_residues(corner.as_general(), y, t, precision_bits)
        total += part.value
        error += part.error_bound
    labels = _labels(y, t)
    return FourierEvaluation(total, METHOD_RESIDUES, error, labels[0], labels[1])


def ft_simplex(simplex: GeneralSimplex, y: Sequence[ScalarLike], t: ScalarLike, method: str = METHOD_RESIDUES,
               tol: float = 1e-10, nodes: int = 64) -> FourierEvaluation:
    if method == METHOD_CLOSED:
        return ft_closed_form(simplex, y, t)
    if method == METHOD_CONTOUR:
        return ft_contour(simplex, y, t, nodes=nodes, tol=tol)
    if method == METHOD_DIRECT:
        return ft_direct_oracle(simplex, y, t, tol=tol)
    if method == METHOD_RESIDUES:
        return ft_residues(simplex, y, t)
    raise ValueError("método desconocido: %s" % method)
