from fractions import Fraction

import pytest

from latpoly.core.errors import ConfigError, DegenerateSimplex
from latpoly.polytope import (
    AxisLengths,
    CornerSimplex,
    CrossPolytope,
    FacePolytope,
    GeneralSimplex,
    Location,
    contains,
    parse_dilation,
    parse_polytope,
    to_spec,
    triangulate_cross,
    volume,
)
from latpoly.scalar import AlgebraicScalar


def test_axes_must_be_positive():
    with pytest.raises(ConfigError):
        AxisLengths.of([1, 0])
    with pytest.raises(ConfigError):
        AxisLengths.of([])


def test_volumes(unit_axes):
    assert volume(CrossPolytope(unit_axes)) == 2
    assert volume(CornerSimplex(unit_axes)) == Fraction(1, 2)
    assert volume(GeneralSimplex.standard(3)) == Fraction(1, 6)
    axes = AxisLengths.parse("[1, sqrt(2)]")
    assert volume(CrossPolytope(axes)) == 2 * AlgebraicScalar.sqrt(2)


def test_contains_cross(unit_axes):
    cross = CrossPolytope(unit_axes)
    assert contains(cross, [0, 0]) == Location.interior
    assert contains(cross, [1, 0]) == Location.boundary
    assert contains(cross, [1, 1]) == Location.outside
    assert contains(cross, [1, 1], t=2) == Location.boundary


def test_contains_irrational_axes_never_hits_boundary():
    cross = CrossPolytope(AxisLengths.parse("[sqrt(2), sqrt(3)]"))
    assert contains(cross, [1, 0], t=1) == Location.interior
    assert contains(cross, [1, 1], t=1) == Location.outside
    assert contains(cross, [2, 1], t=2) == Location.interior


def test_contains_corner_and_general():
    corner = CornerSimplex(AxisLengths.of([2, 3]), (1, -1))
    assert contains(corner, [1, -1]) == Location.interior
    assert contains(corner, [0, -3]) == Location.boundary
    assert contains(corner, [1, 1]) == Location.outside
    general = corner.as_general()
    for point in ([1, -1], [0, -3], [1, 1]):
        assert contains(general, point) == contains(corner, point)


def test_contains_face():
    face = FacePolytope(AxisLengths.of([1, 1, 1]), (0, 2))
    assert contains(face, [1, 0, 0]) == Location.boundary
    assert contains(face, [0, 1, 0]) == Location.outside
    empty = FacePolytope(AxisLengths.of([1, 1]), ())
    assert contains(empty, [0, 0]) == Location.interior


def test_degenerate_simplex():
    with pytest.raises(DegenerateSimplex):
        GeneralSimplex.of([[0, 0], [1, 1], [2, 2]])


def test_triangulation_covers_all_orthants(unit_axes):
    corners = triangulate_cross(CrossPolytope(unit_axes))
    assert len(corners) == 4
    assert {c.sign for c in corners} == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


@pytest.mark.parametrize(
    "spec",
    [
        "cross d=2 a=[1, sqrt(2)]",
        "simplex d=3 a=[1, 2, 3]",
        "corner d=2 a=[1, 1/2] sign=[1, -1]",
        "face d=3 a=[1, 2, 3] I=[1, 3]",
    ],
)
def test_spec_text_is_stable(spec):
    parsed = parse_polytope(spec)
    assert parse_polytope(to_spec(parsed)) == parsed


def test_parse_general_simplex():
    simplex = parse_polytope("simplex vertices=[[1, 0], [0, 1], [0, 0]]")
    assert isinstance(simplex, GeneralSimplex)
    assert simplex.d == 2
    assert isinstance(parse_polytope("standard d=2"), GeneralSimplex)


@pytest.mark.parametrize("spec", ["sphere d=2 a=[1, 1]", "cross d=3 a=[1, 1]", "cross d=2", "cross a"])
def test_parse_polytope_errors(spec):
    with pytest.raises(ConfigError):
        parse_polytope(spec)


def test_parse_dilation_positive():
    assert parse_dilation("5/2").value == Fraction(5, 2)
    with pytest.raises(ConfigError):
        parse_dilation("0")
