import math
import random
from fractions import Fraction

import pytest

from latpoly.counting import (
    SlabQuery,
    count_brute_force,
    count_cross,
    count_simplex,
    count_slab,
    verify_decomposition,
)
from latpoly.polytope import AxisLengths, CornerSimplex, CrossPolytope, FacePolytope
from latpoly.scalar import AlgebraicScalar


def test_unit_diamond_counts(unit_axes):
    cross = CrossPolytope(unit_axes)
    result = count_cross(cross, 1)
    assert (result.count, result.boundary_hits, result.certified) == (5, 4, True)
    for t in range(1, 6):
        assert count_cross(cross, t).count == 2 * t * t + 2 * t + 1


def test_unit_corner_counts(unit_axes):
    result = count_simplex(CornerSimplex(unit_axes), 1)
    assert (result.count, result.boundary_hits) == (3, 3)
    assert count_simplex(CornerSimplex(AxisLengths.of([1, 1, 1])), 4).count == 35


def test_one_dimensional_counts():
    axes = AxisLengths.of([Fraction(3, 2)])
    assert count_cross(CrossPolytope(axes), 2).count == 7
    assert count_cross(CrossPolytope(axes), 2).boundary_hits == 2
    assert count_simplex(CornerSimplex(axes), Fraction(5, 3)).count == 3


def test_face_counts():
    axes = AxisLengths.of([1, 2, 3])
    assert count_simplex(FacePolytope(axes, ()), 7).count == 1
    assert count_simplex(FacePolytope(axes, (1,)), 2).count == 9


def test_generic_dilation_has_no_boundary_hits(algebraic_axes):
    for t in (Fraction(7, 3), Fraction(25, 2), 40):
        assert count_cross(CrossPolytope(algebraic_axes), t).boundary_hits == 0


@pytest.mark.parametrize(
    "axes_text",
    ["[1, 1]", "[sqrt(2), 1/2]", "[1/sqrt(3), cbrt(2)]", "[1, 3/2, sqrt(5)]"],
)
def test_matches_brute_force(axes_text):
    axes = AxisLengths.parse(axes_text)
    rng = random.Random(7)
    for _ in range(5):
        t = Fraction(rng.randint(2, 24), rng.randint(2, 4))
        for polytope in (CrossPolytope(axes), CornerSimplex(axes)):
            fast = count_cross(polytope, t) if isinstance(polytope, CrossPolytope) else count_simplex(polytope, t)
            slow = count_brute_force(polytope, t)
            assert fast.count == slow.count
            assert fast.boundary_hits == slow.boundary_hits


def test_corner_orthant_does_not_change_count():
    axes = AxisLengths.parse("[sqrt(2), 3/2]")
    base = count_brute_force(CornerSimplex(axes), 5).count
    assert count_brute_force(CornerSimplex(axes, (-1, 1)), 5).count == base


@pytest.mark.parametrize("axes_text,t", [("[1, 1]", 3), ("[sqrt(2), sqrt(3)]", Fraction(9, 2)), ("[1, 2, cbrt(3)]", 4)])
def test_decomposition_identity(axes_text, t):
    assert verify_decomposition(AxisLengths.parse(axes_text), t)


def test_rejects_non_positive_dilation(unit_axes):
    with pytest.raises(ValueError):
        count_cross(CrossPolytope(unit_axes), 0)


def test_slab_count_on_axis_line():
    query = SlabQuery.of([0, 0], 3, [0, 1], Fraction(-1, 2), 1)
    # la recta m_2 = 0 dentro del disco de radio 3
    assert count_slab(query) == 7


def test_slab_count_irrational_normal_thin():
    query = SlabQuery.of([0, 0], 10, [1, AlgebraicScalar.sqrt(2)], Fraction(-1, 2000), Fraction(1, 1000))
    assert count_slab(query) == 1


def test_slab_query_validation():
    with pytest.raises(ValueError):
        SlabQuery.of([0, 0], 1, [1, 0], 0, 1)
    with pytest.raises(ValueError):
        SlabQuery.of([0, 0], 2, [0, 0], 0, 1)


@pytest.mark.parametrize("K", [700, 1500, 3000])
def test_tiny_axes_keep_boundary_points(K):
    # |k1| + sqrt(2)|k2| <= sqrt(2) K: la fila k2 = ±K toca la frontera en k1 = 0
    axes = AxisLengths((AlgebraicScalar.rational(Fraction(1, 2 ** 23)), AlgebraicScalar.quadratic(0, Fraction(1, 2 ** 24), 2)))
    t = AlgebraicScalar.quadratic(0, K * 2 ** 23, 2)
    expected = sum(2 * math.isqrt(2 * (K - abs(k2)) ** 2) + 1 for k2 in range(-K, K + 1))
    result = count_cross(CrossPolytope(axes), t)
    assert result.count == expected
    assert result.boundary_hits == 2
    assert result.certified
