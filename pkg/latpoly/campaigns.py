"""Campañas de aceptación: cada una escribe CSV/JSON y un resumen PASS/FAIL por criterio."""

import csv
import json
import logging
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence

from .core.config import settings
from .core.errors import (
    EXIT_CRITERION_FAILED,
    EXIT_OK,
    ConfigError,
    DegenerateSimplex,
    NotConverged,
    PoleCollision,
)
from .counting import SlabQuery, count_brute_force, count_cross, count_slab, verify_decomposition
from .diophantine import (
    LiouvilleLike,
    max_term_growth,
    pigeonhole_bound_demo,
    product_sum_table,
    schmidt_check,
)
from .ehrhart import (
    METHOD_DIRECT,
    METHOD_RECIPROCITY,
    coefficient_td_minus_2_formula,
    dedekind_sum,
    ehrhart_by_interpolation,
    formula_main_part,
    reciprocity_defect,
)
from .fitting import loglog_fit
from .fourier import ft_closed_form, ft_contour, ft_direct_oracle, ft_residues
from .mainterm import KIND_CROSS, KIND_SIMPLEX, build_p, build_q, closed_form_coefficient, laurent_exact
from .models import CriterionResult, DiscrepancyRecord, Spacing
from .poisson import (
    FejerWeight,
    cesaro_decomposition,
    cesaro_literal,
    cesaro_mean,
    error_series,
    error_series_literal,
    literal_weights,
    poisson_residual,
)
from .polytope import AxisLengths, CrossPolytope, GeneralSimplex, to_spec
from .scalar import AlgebraicScalar
from .sweep import SweepConfig, fit_exponent, monotonicity_violations, scan_discrepancy, windowed_means, write_csv

logger = logging.getLogger("latpoly.campaigns")


@dataclass
class CampaignContext:
    name: str
    out_dir: str
    quick: bool
    rng: random.Random
    criteria: List[CriterionResult] = field(default_factory=list)
    files: List[str] = field(default_factory=list)

    def criterion(self, name: str, passed: bool, detail: str = "") -> None:
        self.criteria.append(CriterionResult(name=name, passed=bool(passed), detail=detail))
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, "[%s] %s %s: %s", self.name, "PASS" if passed else "FAIL", name, detail)

    def path(self, filename: str) -> str:
        path = os.path.join(self.out_dir, filename)
        self.files.append(path)
        return path

    def write_csv(self, filename: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        with open(self.path(filename), "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)

    def write_json(self, filename: str, payload) -> None:
        with open(self.path(filename), "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")


# --- generadores de instancias -----------------------------------------------------------


def _random_axis(rng: random.Random, family: str) -> AlgebraicScalar:
    if family == "rational":
        return AlgebraicScalar.rational(Fraction(rng.randint(2, 12), rng.randint(2, 6)))
    if family == "sqrt":
        root = AlgebraicScalar.sqrt(rng.choice((2, 3, 5, 6, 7)))
        return root if rng.random() < 0.5 else root.reciprocal()
    return AlgebraicScalar.nth_root(rng.choice((2, 3, 5, 7))) / 2 * rng.randint(1, 3)


def _random_t(rng: random.Random, t_max: int) -> Fraction:
    q = rng.randint(1, 7)
    return Fraction(rng.randint(q, t_max * q), q)


def _random_simplex(rng: random.Random, d: int) -> GeneralSimplex:
    while True:
        vertices = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(d + 1)]
        try:
            return GeneralSimplex.of(vertices)
        except DegenerateSimplex:
            continue


# --- campañas ---------------------------------------------------------------------------


def _decomposition_identities(ctx: CampaignContext) -> None:
    instances = 12 if ctx.quick else 100
    t_max = 5 if ctx.quick else 30
    # ejes más cortos en d alto: t recorre [1, 30] en todas las dimensiones
    shrink = {1: 1, 2: 1, 3: 2, 4: 4}
    rows = []
    failures = 0
    for i in range(instances):
        d = (i % 4) + 1
        family = ("rational", "sqrt", "cbrt")[(i // 4) % 3]
        axes = AxisLengths.of([_random_axis(ctx.rng, family) / shrink[d] for _ in range(d)])
        t = _random_t(ctx.rng, t_max)
        ok = verify_decomposition(axes, t)
        failures += not ok
        rows.append([i, d, family, axes.to_text(), str(t), ok])
    ctx.write_csv("decomposition.csv", ["instance", "d", "family", "axes", "t", "ok"], rows)
    ctx.criterion("descomposición 2^d |tS| = sum_I |tC_I|", failures == 0,
                  "%d/%d instancias" % (instances - failures, instances))

    mismatches = 0
    checks = 6 if ctx.quick else 20
    for i in range(checks):
        d = (i % 3) + 1
        axes = AxisLengths.of([_random_axis(ctx.rng, ("rational", "sqrt", "cbrt")[i % 3]) for _ in range(d)])
        t = _random_t(ctx.rng, 6)
        cross = CrossPolytope(axes)
        if count_cross(cross, t).count != count_brute_force(cross, t).count:
            mismatches += 1
    ctx.criterion("conteo frente a fuerza bruta", mismatches == 0, "%d discrepancias en %d casos" % (mismatches, checks))


def _prop_identities(d: int) -> List[str]:
    axes = AxisLengths.of([1] * d)
    p = build_p(axes)
    q = build_q(axes)
    problems = []
    for k in range(d + 1):
        if (d - k) % 2 and p.coefficient(k):
            problems.append("d=%d: c_%d debería anularse" % (d, k))
    if p.coefficient(d) != {(1,) * d: Fraction(2 ** d, math.factorial(d))}:
        problems.append("d=%d: coeficiente principal de p" % d)
    if q.coefficient(d) != {(1,) * d: Fraction(1, math.factorial(d))}:
        problems.append("d=%d: coeficiente principal de q" % d)
    for offset in (2, 4):
        if d - offset >= 0 and p.coefficient(d - offset) != closed_form_coefficient(KIND_CROSS, d, offset):
            problems.append("d=%d: c_{d-%d} no coincide con la forma cerrada" % (d, offset))
    for offset in (1, 2, 3):
        if d - offset >= 0 and q.coefficient(d - offset) != closed_form_coefficient(KIND_SIMPLEX, d, offset):
            problems.append("d=%d: e_{d-%d} no coincide con la forma cerrada" % (d, offset))
    return problems


def _mainterm_identities(ctx: CampaignContext) -> None:
    max_d = 5 if ctx.quick else 8
    problems: List[str] = []
    rows = []
    for d in range(1, max_d + 1):
        found = _prop_identities(d)
        problems.extend(found)
        rows.append([d, len(found)])
    ctx.write_csv("identities.csv", ["d", "problems"], rows)
    ctx.criterion("identidades simbólicas de p y q (d <= %d)" % max_d, not problems, "; ".join(problems) or "exactas")


def _fourier_crossval(ctx: CampaignContext) -> None:
    cases = 10 if ctx.quick else 100
    max_d = 2 if ctx.quick else 3
    rows = []
    bad_direct = 0
    bad_radius = 0
    bad_closed = 0
    coincident = 0
    for i in range(cases):
        d = (i % max_d) + 1
        simplex = _random_simplex(ctx.rng, d)
        y = [0] * d if i % 5 == 0 else [ctx.rng.randint(-2, 2) for _ in range(d)]
        t = Fraction(ctx.rng.randint(1, 8), 4)
        residues = ft_residues(simplex, y, t)
        try:
            direct = ft_direct_oracle(simplex, y, t, tol=1e-10)
            gap = abs(residues.value - direct.value)
            ok = gap <= 1e-8 + residues.error_bound + direct.error_bound
        except NotConverged as exc:
            logger.warning("Oráculo directo sin converger en el caso %d: %s", i, exc)
            gap, ok = math.inf, False
        bad_direct += not ok
        c1 = ft_contour(simplex, y, t)
        c2 = ft_contour(simplex, y, t, radius_scale=1.5)
        bad_radius += abs(c1.value - c2.value) > c1.error_bound + c2.error_bound + 1e-8
        try:
            closed = ft_closed_form(simplex, y, t)
            bad_closed += abs(closed.value - residues.value) > 1e-8 + closed.error_bound + residues.error_bound
        except PoleCollision:
            coincident += 1
        rows.append([i, d, to_spec(simplex), " ".join(map(str, y)), str(t),
                     repr(residues.value.real), repr(residues.value.imag), repr(gap)])
    ctx.write_csv("crossval.csv", ["case", "d", "simplex", "y", "t", "re", "im", "gap_direct"], rows)
    ctx.criterion("residuos frente a cuadratura directa", bad_direct == 0, "%d fallos en %d casos" % (bad_direct, cases))
    ctx.criterion("invariancia del radio de contorno", bad_radius == 0, "%d fallos" % bad_radius)
    ctx.criterion("forma cerrada frente a residuos", bad_closed == 0,
                  "%d fallos; %d casos con polos coincidentes" % (bad_closed, coincident))
    ctx.criterion("casos con polos coincidentes incluidos", coincident > 0, "%d casos" % coincident)


def _cesaro_convergence(ctx: CampaignContext) -> None:
    axes = AxisLengths.of([AlgebraicScalar.sqrt(2), AlgebraicScalar.sqrt(3)])
    t = 20 if not ctx.quick else 3
    ns = [2 ** k for k in range(4, 11)] if not ctx.quick else [4, 8, 16]
    count = count_cross(CrossPolytope(axes), t).count
    rows = []
    gaps = []
    residuals = []
    decomposition_ok = True
    for N in ns:
        parts = cesaro_decomposition(axes, t, N)
        gap = parts.ces - count
        gaps.append(abs(gap))
        residuals.append(abs(poisson_residual(axes, t, N)))
        decomposition_ok &= abs(parts.ces - parts.origin_average - parts.error_series) <= 1e-9 * (1 + abs(parts.ces))
        rows.append([N, repr(parts.ces), count, repr(parts.error_series), repr(gap)])
    ctx.write_csv("cesaro.csv", ["N", "Ces", "count", "E_N", "gap"], rows)
    fit = loglog_fit(ns, gaps)
    ctx.write_json("cesaro_fit.json", fit.model_dump())
    if ctx.quick:
        ctx.criterion("pendiente log|Ces - conteo| (informativo)", math.isfinite(fit.slope), "%.3f" % fit.slope)
    else:
        ctx.criterion("pendiente log|Ces - conteo| en [-0.65, -0.35]", -0.65 <= fit.slope <= -0.35, "%.3f" % fit.slope)
        ctx.criterion("residuo conteo - p - E_N decrece con N", residuals[-1] < residuals[0],
                      "%.3e -> %.3e" % (residuals[0], residuals[-1]))
    ctx.criterion("Ces = promedio de B_M + E_N", decomposition_ok, "N en %s" % ns)

    weights_ok = True
    for d in (1, 2, 3):
        for N in (2, 3, 4):
            if d == 3 and N == 4 and ctx.quick:
                continue
            weight = FejerWeight(N, d)
            literal = literal_weights(N, d)
            weights_ok &= all(weight.exact(m) == w for m, w in literal.items())
    ctx.criterion("pesos de Fejér = doble suma literal (exacto)", weights_ok, "N <= 4, d <= 3")

    small = AxisLengths.of([1, AlgebraicScalar.sqrt(2)])
    literal_ok = True
    for N in (2, 3, 4):
        literal_ok &= abs(cesaro_literal(CrossPolytope(small), Fraction(5, 2), N)
                          - cesaro_mean(CrossPolytope(small), Fraction(5, 2), N)) <= 1e-9
        literal_ok &= abs(error_series_literal(small, Fraction(5, 2), N)
                          - error_series(small, Fraction(5, 2), N).value) <= 1e-9
    ctx.criterion("formas colapsadas = dobles sumas literales", literal_ok, "d=2, N <= 4")


def _dioph_gamma(ctx: CampaignContext) -> None:
    m_max = 2000 if ctx.quick else 10 ** 5
    golden = (1 + AlgebraicScalar.sqrt(5)) / 2
    cases = [
        ("golden", [golden], 1.3),
        ("sqrt2", [AlgebraicScalar.sqrt(2)], 1.3),
        ("sqrt2,sqrt3", [AlgebraicScalar.sqrt(2), AlgebraicScalar.sqrt(3)], 1.75),
    ]
    summary = {}
    for label, alphas, bound in cases:
        table = product_sum_table(alphas, m_max)
        ctx.write_csv("products_%s.csv" % label.replace(",", "_"), ["M", "S", "L_M"],
                      [[r.M, repr(r.S), repr(r.L)] for r in table.rows])
        summary[label] = table.fit.model_dump() if table.fit else None
        gamma = table.fitted_gamma
        ctx.criterion("γ ajustado %s <= %.2f" % (label, bound), gamma is not None and gamma <= bound,
                      "%.4f" % (gamma if gamma is not None else float("nan")))
        problems = table.invariant_violations()
        ctx.criterion("invariantes de L_M y S(M) para %s" % label, not problems, "; ".join(problems[:3]) or "ok")
        c = max_term_growth(table)
        ctx.criterion("crecimiento lineal del término máximo para %s" % label, c > 0, "c=%.4f" % c)
    ctx.write_json("gamma_fits.json", summary)

    positive = schmidt_check([AlgebraicScalar.sqrt(2)], m_max)
    negative = schmidt_check([LiouvilleLike()], m_max)
    ctx.criterion("Schmidt no marca sqrt2", not positive.flagged, str(positive.decaying))
    ctx.criterion("Schmidt marca el control tipo Liouville", negative.flagged, str(negative.decaying))

    demo = pigeonhole_bound_demo([golden], 100)
    demo2 = pigeonhole_bound_demo([AlgebraicScalar.sqrt(2), AlgebraicScalar.sqrt(3)], 200)
    ctx.criterion("pigeonhole: ocupación <= 1", demo.max_occupancy <= 1 and demo2.max_occupancy <= 1,
                  "d=1: %d, d=2: %d" % (demo.max_occupancy, demo2.max_occupancy))


def _pairwise_coprime_triple(rng: random.Random, limit: int) -> List[int]:
    while True:
        triple = [rng.randint(1, limit) for _ in range(3)]
        if all(math.gcd(x, y) == 1 for x, y in combinations(triple, 2)):
            return triple


def _ehrhart_dedekind(ctx: CampaignContext) -> None:
    base = coefficient_td_minus_2_formula([1, 1, 1])
    interpolated = ehrhart_by_interpolation([1, 1, 1]).coefficient(1)
    ctx.criterion("a=(1,1,1): fórmula = 11/6 = interpolado", base == Fraction(11, 6) == interpolated,
                  "fórmula %s, interpolado %s" % (base, interpolated))

    triples = 5 if ctx.quick else 20
    rows = []
    mismatches = 0
    for _ in range(triples):
        triple = _pairwise_coprime_triple(ctx.rng, 12)
        formula = coefficient_td_minus_2_formula(triple)
        coef = ehrhart_by_interpolation(triple).coefficient(1)
        mismatches += formula != coef
        rows.append([" ".join(map(str, triple)), str(formula), str(coef)])
    ctx.write_csv("ehrhart.csv", ["axes", "formula", "interpolated"], rows)
    ctx.criterion("fórmula = coeficiente interpolado", mismatches == 0, "%d/%d" % (triples - mismatches, triples))

    pairs = 40 if ctx.quick else 200
    defects = 0
    for _ in range(pairs):
        while True:
            a, b = ctx.rng.randint(1, 500), ctx.rng.randint(1, 500)
            if math.gcd(a, b) == 1:
                break
        defects += reciprocity_defect(a, b) != 0
    ctx.criterion("reciprocidad de Dedekind exacta", defects == 0, "%d/%d pares" % (pairs - defects, pairs))

    big_b = 10007 if ctx.quick else 20011
    agree = dedekind_sum(1234, big_b, METHOD_DIRECT).value == dedekind_sum(1234, big_b, METHOD_RECIPROCITY).value
    ctx.criterion("suma directa = recursión euclídea (b > 10^4)", agree, "b=%d" % big_b)

    identity_ok = True
    for triple in ([1, 1, 1], [2, 3, 5], [3, 4, 7]):
        laurent = closed_form_coefficient(KIND_SIMPLEX, 3, 2)
        value = laurent_exact(laurent, AxisLengths.of(triple))
        identity_ok &= value.is_rational and value.value == formula_main_part(triple)
    ctx.criterion("e_{d-2} = parte principal de la fórmula", identity_ok, "d=3")


def _sweep_block(ctx: CampaignContext, label: str, cfg: SweepConfig) -> List[DiscrepancyRecord]:
    records = scan_discrepancy(cfg)
    write_csv(records, ctx.path("sweep_%s.csv" % label))
    violations = monotonicity_violations(records)
    ctx.criterion("conteo monótono en t (%s)" % label, violations == 0, "%d violaciones" % violations)
    return records


def _discrepancy_exponents(ctx: CampaignContext) -> None:
    d2 = "cross d=2 a=[1, 1/sqrt(2)]"
    d3 = "cross d=3 a=[1, 1/sqrt(2), 1/sqrt(3)]"
    if ctx.quick:
        cfg2 = SweepConfig(polytope=d2, t_start=Fraction(1), t_stop=Fraction(200), t_count=120, t_spacing=Spacing.log)
        cfg3 = SweepConfig(polytope=d3, t_start=Fraction(10), t_stop=Fraction(60), t_count=60)
        bound2, windows = 0.5, [10, 20]
    else:
        cfg2 = SweepConfig(polytope=d2, t_start=Fraction(1), t_stop=Fraction(10 ** 4), t_count=2000, t_spacing=Spacing.log)
        cfg3 = SweepConfig(polytope=d3, t_start=Fraction(10), t_stop=Fraction(500), t_count=400)
        bound2, windows = 3 * settings.fit_epsilon, [25, 50, 100, 200]
    fits = {}
    records2 = _sweep_block(ctx, "d2", cfg2)
    fit2 = fit_exponent(records2)
    fits["d2"] = fit2.model_dump()
    ctx.criterion("d=2: pendiente de la envolvente <= %.2f" % bound2, fit2.slope <= bound2, "%.4f" % fit2.slope)

    records3 = _sweep_block(ctx, "d3", cfg3)
    fit3 = fit_exponent(records3)
    fits["d3"] = fit3.model_dump()
    bound3 = 2 / 3 + 3 * settings.fit_epsilon
    if ctx.quick:
        ctx.criterion("d=3: pendiente de la envolvente (informativo)", math.isfinite(fit3.slope), "%.4f" % fit3.slope)
    else:
        ctx.criterion("d=3: pendiente de la envolvente <= %.4f" % bound3, fit3.slope <= bound3, "%.4f" % fit3.slope)

    means = windowed_means(records3, windows)
    smallest = abs(means[windows[0]])
    bounded = all(abs(v) <= 3 * smallest + 1 for v in means.values())
    ctx.criterion("medias de Δ en [T, 2T] acotadas", bounded,
                  ", ".join("T=%s: %.4f" % (T, v) for T, v in means.items()))
    fits["windowed_means"] = {str(T): v for T, v in means.items()}
    ctx.write_json("exponents.json", fits)


def _slab_lemma(ctx: CampaignContext) -> None:
    radii = [10, 20, 40] if ctx.quick else [25, 50, 100, 200]
    width = Fraction(1, 1000)
    rows = []
    counts = []
    for R in radii:
        query = SlabQuery.of([0, 0], R, [1, AlgebraicScalar.sqrt(2)], -width / 2, width)
        n = count_slab(query)
        counts.append(n)
        rows.append([R, n])
    ctx.write_csv("slab.csv", ["R", "count"], rows)
    fit = loglog_fit(radii, counts)
    ctx.criterion("pendiente del conteo en la franja < 1.3", fit.slope < 1.3, "%.4f" % fit.slope)


CAMPAIGNS: Dict[str, Callable[[CampaignContext], None]] = {
    "prop1": _decomposition_identities,
    "mainterm-identities": _mainterm_identities,
    "fourier-crossval": _fourier_crossval,
    "cesaro-convergence": _cesaro_convergence,
    "dioph-gamma": _dioph_gamma,
    "ehrhart-dedekind": _ehrhart_dedekind,
    "discrepancy-exponents": _discrepancy_exponents,
    "slab-lemma": _slab_lemma,
}


def report(campaign: str, out_dir: Optional[str] = None, quick: bool = False, seed: int = 0) -> int:
    """Ejecuta la campaña, escribe sus ficheros y devuelve el código de salida."""
    if campaign not in CAMPAIGNS:
        raise ConfigError("campaña desconocida: %s (opciones: %s)" % (campaign, ", ".join(CAMPAIGNS)))
    target = os.path.join(out_dir or settings.output_dir, campaign)
    os.makedirs(target, exist_ok=True)
    ctx = CampaignContext(name=campaign, out_dir=target, quick=quick, rng=random.Random(seed))
    logger.info("Campaña %s (quick=%s, seed=%d) -> %s", campaign, quick, seed, target)
    CAMPAIGNS[campaign](ctx)
    ctx.write_json("criteria.json", [c.model_dump() for c in ctx.criteria])
    with open(ctx.path("summary.txt"), "w", encoding="utf-8") as handle:
        for c in ctx.criteria:
            handle.write("%s %s: %s\n" % ("PASS" if c.passed else "FAIL", c.name, c.detail))
    failed = [c for c in ctx.criteria if not c.passed]
    logger.info("Campaña %s: %d criterios, %d fallidos", campaign, len(ctx.criteria), len(failed))
    return EXIT_CRITERION_FAILED if failed else EXIT_OK
