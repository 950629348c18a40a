from fractions import Fraction

import pytest

from latpoly.core.errors import NotCoprime, NotPairwiseCoprime
from latpoly.ehrhart import (
    METHOD_DIRECT,
    METHOD_RECIPROCITY,
    coefficient_td_minus_2_formula,
    dedekind_sum,
    ehrhart_by_interpolation,
    ehrhart_report,
    formula_correction,
    formula_main_part,
    reciprocity_defect,
)
from latpoly.polytope import AxisLengths


def test_small_dedekind_sums():
    assert dedekind_sum(1, 3).value == Fraction(1, 18)
    assert dedekind_sum(2, 3).value == Fraction(-1, 18)
    assert dedekind_sum(5, 1).value == 0
    assert dedekind_sum(1, 2).value == 0


@pytest.mark.parametrize("a,b", [(3, 7), (5, 12), (17, 40), (-4, 9), (89, 144)])
def test_reciprocity_path_matches_direct_sum(a, b):
    assert dedekind_sum(a, b, method=METHOD_RECIPROCITY).value == dedekind_sum(a, b, method=METHOD_DIRECT).value


@pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (7, 10), (13, 21), (100, 301)])
def test_reciprocity_law(a, b):
    assert reciprocity_defect(a, b) == 0


def test_dedekind_errors():
    with pytest.raises(NotCoprime):
        dedekind_sum(4, 6)
    with pytest.raises(ValueError):
        dedekind_sum(1, 0)
    with pytest.raises(ValueError):
        dedekind_sum(1, 3, method="tabla")


def test_unit_simplex_polynomial():
    poly = ehrhart_by_interpolation([1, 1, 1])
    assert poly.coefficients == [1, Fraction(11, 6), 1, Fraction(1, 6)]
    # C(t+3, 3)
    assert poly(4) == 35


def test_triangle_polynomial():
    poly = ehrhart_by_interpolation(AxisLengths.of([2, 3]))
    # área 3, frontera 6 puntos
    assert poly.coefficients == [1, 3, 3]
    assert poly.to_text() == "3*t**2 + 3*t + 1"


def test_interpolation_rejects_irrational_axes():
    with pytest.raises(ValueError):
        ehrhart_by_interpolation(AxisLengths.parse("[1, sqrt(2)]"))
    with pytest.raises(ValueError):
        ehrhart_by_interpolation([0, 2])


@pytest.mark.parametrize("axes", [[1, 1], [2, 3], [1, 1, 1], [1, 2, 3], [2, 3, 5], [1, 1, 1, 1], [1, 2, 3, 5]])
def test_formula_matches_interpolation(axes):
    poly = ehrhart_by_interpolation(axes)
    assert coefficient_td_minus_2_formula(axes) == poly.coefficient(len(axes) - 2)


def test_formula_parts_for_unit_cube_corner():
    assert formula_main_part([1, 1, 1]) == 1
    assert formula_correction([1, 1, 1]) == Fraction(5, 6)


def test_formula_needs_pairwise_coprime_axes():
    with pytest.raises(NotPairwiseCoprime):
        coefficient_td_minus_2_formula([2, 4, 3])
    with pytest.raises(ValueError):
        coefficient_td_minus_2_formula([3])


def test_report():
    report = ehrhart_report([1, 2, 3])
    assert report.axes == [1, 2, 3]
    assert report.coefficients == ["1", "3", "3", "1"]
    assert report.interpolated == "3"
    assert report.formula == "3"
    assert report.match is True


def test_report_without_formula():
    report = ehrhart_report([2, 4])
    assert report.formula is None
    assert report.match is None
    assert report.interpolated is not None
