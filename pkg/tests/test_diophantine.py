import math
from fractions import Fraction

import pytest

from latpoly.core.errors import RationalAlpha
from latpoly.diophantine import (
    LiouvilleLike,
    default_checkpoints,
    dist_nearest_integer,
    max_term_growth,
    pigeonhole_bound_demo,
    product_sum_table,
    schmidt_check,
)
from latpoly.scalar import AlgebraicScalar

SQRT2 = AlgebraicScalar.sqrt(2)
GOLDEN = (1 + AlgebraicScalar.sqrt(5)) / 2


def test_dist_nearest_integer():
    assert dist_nearest_integer(SQRT2) == pytest.approx(0.41421356, abs=1e-8)
    assert dist_nearest_integer(3 * SQRT2) == pytest.approx(0.24264069, abs=1e-8)
    assert dist_nearest_integer(Fraction(7, 2)) == 0.5
    assert dist_nearest_integer(-Fraction(1, 3)) == pytest.approx(1 / 3)


def test_liouville_like_expansion():
    alpha = LiouvilleLike()
    assert alpha.exponents(200) == [1, 3, 12, 48, 192]
    assert float(alpha) == pytest.approx(0.5 + 0.125 + 2.0 ** -12 + 2.0 ** -48, abs=1e-18)
    assert alpha.fixed_point(4) == 0b1010
    assert alpha.to_text() == "liouville(1,3,x4)"


def test_small_table_values():
    table = product_sum_table([SQRT2], 3, checkpoints=[1, 2, 3])
    assert [row.M for row in table.rows] == [1, 2, 3]
    assert table.rows[-1].S == pytest.approx(12.364, abs=1e-3)
    assert table.rows[-1].L == pytest.approx(0.17157, abs=1e-5)
    assert table.alphas == ["sqrt(2)"]
    assert table.invariant_violations() == []


def test_table_invariants_in_the_plane():
    table = product_sum_table([SQRT2, AlgebraicScalar.sqrt(3)], 2000)
    assert table.invariant_violations() == []
    assert table.fit is not None
    # Dirichlet: max_{m<=M} 1/∏||mα_k|| crece al menos como M
    assert max_term_growth(table) > 0


def test_golden_ratio_exponent_is_near_one():
    table = product_sum_table([GOLDEN], 20000)
    # S(M) ~ M log M: la pendiente local queda algo por encima de 1
    assert 0.9 < table.fitted_gamma < 1.4


def test_rejects_rational_alpha_and_bad_ranges():
    with pytest.raises(RationalAlpha):
        product_sum_table([Fraction(1, 2)], 10)
    with pytest.raises(ValueError):
        product_sum_table([SQRT2], 0)
    with pytest.raises(ValueError):
        product_sum_table([SQRT2], 10, checkpoints=[5, 11])


def test_default_checkpoints():
    points = default_checkpoints(1000)
    assert points[0] == 1
    assert points[-1] == 1000
    assert points == sorted(set(points))


def test_schmidt_check_flags_liouville_like():
    report = schmidt_check([LiouvilleLike()], 5000)
    assert report.flagged
    assert all(report.decaying.values())


def test_schmidt_check_accepts_quadratic_irrational():
    report = schmidt_check([SQRT2], 5000)
    assert not report.flagged
    for minima in report.minima.values():
        assert minima[0][0] == 1
        assert minima[-1][0] == 5000


@pytest.mark.parametrize("alphas", [[SQRT2], [SQRT2, AlgebraicScalar.sqrt(3)], [LiouvilleLike()]])
def test_pigeonhole_cells_hold_at_most_one_point(alphas):
    report = pigeonhole_bound_demo(alphas, 500)
    assert report.max_occupancy <= 1
    assert report.a2_size >= 1
    assert sum(report.histogram.values()) == report.a2_size
    # lado 1/n < L^(1/d)
    assert report.side < report.L ** (1.0 / len(alphas))
    assert math.isclose(report.side, 1.0 / report.cells_per_axis)
