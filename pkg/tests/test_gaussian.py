from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from p5iso.errors import DivisionByZero
from p5iso.gaussian import GaussianRational, gauss, gauss_rational_arith, parse_gaussian


def rationals(max_num=50, max_den=12):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


gaussians = st.builds(GaussianRational, rationals(), rationals())


def test_conjugate_sum():
    a = gauss(Fraction(1, 2), Fraction(1, 3))
    b = gauss(Fraction(1, 2), Fraction(-1, 3))
    assert a + b == GaussianRational(1)


def test_norm_of_one_plus_i():
    assert gauss(1, 1) * gauss(1, -1) == GaussianRational(2)


def test_inverse_of_i():
    assert gauss(0, 1).inverse() == gauss(0, -1)


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        GaussianRational(0).inverse()


def test_arith_dispatch():
    i = gauss(0, 1)
    assert gauss_rational_arith(i, i, "mul") == GaussianRational(-1)
    assert gauss_rational_arith(i, None, "neg") == gauss(0, -1)
    assert gauss_rational_arith(i, None, "inv") == gauss(0, -1)
    assert gauss_rational_arith(i, GaussianRational(1), "add") == gauss(1, 1)


def test_canonical_zero():
    z = gauss(Fraction(1, 2)) - gauss(Fraction(1, 2))
    assert z.re_num == 0 and z.re_den == 1 and z.im_num == 0 and z.im_den == 1


@settings(max_examples=60, deadline=None)
@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == GaussianRational(0)
    if a:
        assert a * a.inverse() == GaussianRational(1)


@settings(max_examples=60, deadline=None)
@given(gaussians)
def test_string_roundtrip(a):
    assert parse_gaussian(str(a)) == a


def test_parse_forms():
    assert parse_gaussian("i") == gauss(0, 1)
    assert parse_gaussian("-i") == gauss(0, -1)
    assert parse_gaussian("3/4") == gauss(Fraction(3, 4))
    assert parse_gaussian("-1/2+3/5*i") == gauss(Fraction(-1, 2), Fraction(3, 5))


def test_powers_and_norm():
    a = gauss(Fraction(2, 3), Fraction(-1, 4))
    assert a ** 3 == a * a * a
    assert a ** -2 == (a * a).inverse()
    assert a.norm2() == a.re * a.re + a.im * a.im
