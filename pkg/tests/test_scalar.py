from fractions import Fraction

import pytest

from latpoly.core.config import settings
from latpoly.core.errors import PrecisionExhausted, ScalarSyntaxError
from latpoly.scalar import (
    AlgebraicScalar,
    ScalarForm,
    Trichotomy,
    compare_to_integer_multiple,
    detect_rational_dependence,
    fixed_point,
    floor_scalar,
    parse_scalar,
    parse_scalar_list,
    sign_of_combination,
    split_top_level,
)


def test_parse_rational_forms():
    assert parse_scalar("3/2").value == Fraction(3, 2)
    assert parse_scalar("0.25").value == Fraction(1, 4)
    assert parse_scalar(" -7 ").value == -7


def test_parse_quadratic_normalises_radicand():
    x = parse_scalar("sqrt(8)")
    assert x.form == ScalarForm.quadratic
    assert x.surd == 2 and x.radicand == 2
    assert parse_scalar("1/2*sqrt(2)") == parse_scalar("sqrt(1/2)")
    assert parse_scalar("sqrt(9)").is_rational


def test_parse_root_degrades_to_quadratic():
    x = parse_scalar("root(1,0,-3; 1, 2)")
    assert x.form == ScalarForm.quadratic
    assert x == AlgebraicScalar.sqrt(3)


@pytest.mark.parametrize("text", ["", "abc", "2sqrt(2)", "sqrt(-2)", "root(1,0,-3; 2, 3)", "1/0"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ScalarSyntaxError):
        parse_scalar(text)


def test_quadratic_arithmetic_is_exact():
    r2 = AlgebraicScalar.sqrt(2)
    assert (r2 * r2).is_rational and (r2 * r2).value == 2
    assert r2.reciprocal() == r2 / 2
    assert (1 + r2) * (r2 - 1) == 1
    assert (r2 - r2).sign() == 0


def test_cube_root_power_returns_to_rational():
    c = AlgebraicScalar.nth_root(2, 3)
    assert c.form == ScalarForm.root
    cube = c ** 3
    assert cube.is_rational and cube.value == 2


def test_mixed_radicands_order():
    s = AlgebraicScalar.sqrt(2) + AlgebraicScalar.sqrt(3)
    assert float(s) == pytest.approx(3.1462643699419726)
    assert s > Fraction(3146, 1000)
    assert s < Fraction(3147, 1000)


def test_sign_of_combination_cancels_exactly():
    r2 = AlgebraicScalar.sqrt(2)
    r8 = AlgebraicScalar.sqrt(8)
    assert sign_of_combination([(2, r2), (-1, r8)]) == 0
    assert sign_of_combination([(1, r2)], constant=-Fraction(1414, 1000)) == 1


def test_integer_multiple_trichotomy():
    r2 = AlgebraicScalar.sqrt(2)
    assert compare_to_integer_multiple(r2, r2, 2) == Trichotomy.equal
    assert compare_to_integer_multiple(r2, 3, 4) == Trichotomy.greater
    assert compare_to_integer_multiple(Fraction(1, 3), 9, 3) == Trichotomy.equal


def test_floor_and_fixed_point():
    assert floor_scalar(parse_scalar("100*sqrt(2)")) == 141
    assert floor_scalar(parse_scalar("-sqrt(2)")) == -2
    assert fixed_point(AlgebraicScalar.sqrt(2), 10) == 1448


def test_refine_beyond_cap_raises():
    with pytest.raises(PrecisionExhausted):
        AlgebraicScalar.sqrt(2).refine(settings.precision_cap * 2)


def test_detect_rational_dependence():
    r2 = AlgebraicScalar.sqrt(2)
    assert detect_rational_dependence([1, r2, 1 + r2]) == (1, 1, -1)


def test_near_relation_is_rejected_at_higher_precision():
    # 1 - 2y = -2^-39 sqrt(2): pasa la tolerancia de 64 bits, no la de 128
    y = AlgebraicScalar.quadratic(Fraction(1, 2), Fraction(1, 2 ** 40), 2)
    assert detect_rational_dependence([1, y], 64) is None


def test_split_and_list_parsing():
    assert split_top_level("1, root(1,0,-2; 1, 2), sqrt(3)") == ["1", "root(1,0,-2; 1, 2)", "sqrt(3)"]
    values = parse_scalar_list("[1, sqrt(2), cbrt(3)]")
    assert [v.form for v in values] == [ScalarForm.rational, ScalarForm.quadratic, ScalarForm.root]
    with pytest.raises(ScalarSyntaxError):
        parse_scalar_list("[1, , 2]")
