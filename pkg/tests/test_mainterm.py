import math
from fractions import Fraction

import pytest

from latpoly.counting import count_cross
from latpoly.mainterm import (
    KIND_CROSS,
    KIND_SIMPLEX,
    build_p,
    build_q,
    closed_form_coefficient,
    evaluate,
    laurent_exact,
    leading_discrepancy_coefficient,
    polynomial_report,
    zeta_even,
)
from latpoly.polytope import AxisLengths, CrossPolytope
from latpoly.scalar import AlgebraicScalar


def test_zeta_even_rationals():
    assert zeta_even(2).value_as_rational_times_pi_power == Fraction(1, 6)
    assert zeta_even(4).value_as_rational_times_pi_power == Fraction(1, 90)
    assert zeta_even(6).value_as_rational_times_pi_power == Fraction(1, 945)
    with pytest.raises(ValueError):
        zeta_even(3)


def test_one_dimensional_main_term():
    axes = AxisLengths.of([Fraction(3, 2)])
    p = build_p(axes)
    assert p.degree == 1
    assert p.coefficient(0) == {}
    assert p.coefficient(1) == {(1,): Fraction(2)}
    q = build_q(axes)
    assert q.coefficient(0) == {(0,): Fraction(1, 2)}


def test_planar_main_term_symbolic():
    p = build_p(AxisLengths.parse("[1, sqrt(2)]"))
    assert p.coefficient(2) == {(1, 1): Fraction(2)}
    assert p.coefficient(1) == {}
    assert p.coefficient(0) == {(-1, 1): Fraction(1, 3), (1, -1): Fraction(1, 3)}
    # (1/3)(a2/a1 + a1/a2) con a = (1, sqrt(2))
    assert p.exact_coefficient(0) == AlgebraicScalar.sqrt(2) / 2
    assert p.exact_coefficient(2) == 2 * AlgebraicScalar.sqrt(2)


def test_parity_and_leading_coefficients():
    for d in range(1, 6):
        axes = AxisLengths.of([1] * d)
        p = build_p(axes)
        q = build_q(axes)
        assert p.coefficient(d) == {(1,) * d: Fraction(2 ** d, math.factorial(d))}
        assert q.coefficient(d) == {(1,) * d: Fraction(1, math.factorial(d))}
        for k in range(d - 1, -1, -2):
            assert p.coefficient(k) == {}


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_cross_closed_forms(d):
    p = build_p(AxisLengths.of([1] * d))
    assert p.coefficient(d - 2) == closed_form_coefficient(KIND_CROSS, d, 2)
    if d >= 4:
        assert p.coefficient(d - 4) == closed_form_coefficient(KIND_CROSS, d, 4)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_simplex_closed_forms(d):
    q = build_q(AxisLengths.of([1] * d))
    for offset in (1, 2, 3):
        if d - offset >= 0:
            assert q.coefficient(d - offset) == closed_form_coefficient(KIND_SIMPLEX, d, offset)


def test_unknown_closed_form():
    with pytest.raises(ValueError):
        closed_form_coefficient(KIND_CROSS, 4, 3)


def test_main_term_matches_integer_diamond():
    # |tC ∩ Z^2| = 2t^2 + 2t + 1 y p(t) = 2t^2 + 2/3 para a = (1, 1)
    p = build_p(AxisLengths.of([1, 1]))
    for t in (1, 2, 5):
        value = evaluate(p, t)
        assert value.mid == pytest.approx(2 * t * t + 2.0 / 3.0, rel=1e-15)
        assert value.width < 1e-60
    assert p(3.0) == pytest.approx(18 + 2.0 / 3.0)


def test_certified_evaluation_bounds_count_gap(algebraic_axes):
    p = build_p(algebraic_axes)
    t = 40
    gap = count_cross(CrossPolytope(algebraic_axes), t).count - float(evaluate(p, t))
    # Δ(t) = O(t^{d-1}) trivialmente
    assert abs(gap) < 10 * t


def test_leading_discrepancy_coefficient():
    value = leading_discrepancy_coefficient(AxisLengths.of([1, 2]))
    # (1/3)(a2/a1 + a1/a2) = 5/6
    assert value.mid == pytest.approx(5.0 / 6.0, rel=1e-15)
    assert value.width < 1e-60
    assert laurent_exact(closed_form_coefficient(KIND_CROSS, 2, 2), AxisLengths.of([1, 2])).value == Fraction(5, 6)


def test_polynomial_report():
    report = polynomial_report(build_p(AxisLengths.parse("[1, sqrt(2)]")), digits=12)
    assert report.kind == KIND_CROSS
    assert report.axes == ["1", "sqrt(2)"]
    assert report.coefficients[2].symbolic == {"a1*a2": "2"}
    assert report.coefficients[0].symbolic == {"a1^-1*a2": "1/3", "a1*a2^-1": "1/3"}
    assert report.coefficients[2].decimal.startswith("2.8284271247")
