"""Ajustes log-log de exponentes (mínimos cuadrados con intervalo de confianza)."""

import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import stats

from .core.errors import InsufficientData
from .models import FitSummary


def loglog_fit(xs: Sequence[float], ys: Sequence[float], confidence: float = 0.95) -> FitSummary:
    """Pendiente de log y frente a log x; exige al menos dos puntos positivos."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 2:
        raise InsufficientData("se necesitan al menos dos puntos positivos para el ajuste")
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    if np.ptp(lx) == 0:
        raise InsufficientData("todas las abscisas coinciden")
    result = stats.linregress(lx, ly)
    n = len(pairs)
    if n > 2 and math.isfinite(result.stderr):
        half = float(stats.t.ppf(0.5 + confidence / 2, n - 2)) * result.stderr
    else:
        half = 0.0
    return FitSummary(
        slope=float(result.slope),
        intercept=float(result.intercept),
        ci_low=float(result.slope - half),
        ci_high=float(result.slope + half),
        n=n,
    )


def dyadic_envelope(ts: Sequence[float], values: Sequence[float]) -> List[Tuple[float, float]]:
    """Máximo de |value| por bloque diádico [2^k, 2^{k+1}); abscisa = mayor t muestreado en el bloque."""
    blocks = {}
    for t, v in zip(ts, values):
        if t <= 0:
            continue
        k = math.floor(math.log2(t))
        blocks.setdefault(k, []).append((t, abs(v)))
    envelope = []
    for k in sorted(blocks):
        t_max = max(t for t, _ in blocks[k])
        envelope.append((t_max, max(v for _, v in blocks[k])))
    return envelope
