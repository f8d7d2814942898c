from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from p5iso.errors import UnknownSymbol
from p5iso.gaussian import GaussianRational, gauss
from p5iso.multipoly import MultiPoly, parse_poly, poly_derivative
from p5iso.ratfunc import RationalFunction, poly_content_gcd

VARS = ("z", "b0", "th0", "t")


def coeffs():
    return st.builds(
        GaussianRational,
        st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4)),
        st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4)),
    )


def polys(max_terms=5, max_exp=4):
    exponents = st.tuples(*[st.integers(0, max_exp) for _ in VARS])
    term = st.tuples(exponents, coeffs())
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum(
            (MultiPoly(VARS, {e: c}) for e, c in ts if c),
            MultiPoly(VARS),
        )
    )


def v(name):
    return MultiPoly.variable(name, VARS)


def test_power_rule():
    z, b0 = v("z"), v("b0")
    assert poly_derivative(z ** 2 * b0, "z") == 2 * z * b0


def test_constant_derivative():
    assert poly_derivative(v("th0"), "z").is_zero()


def test_t_derivative():
    t = v("t")
    assert poly_derivative(t ** 2 * Fraction(1, 4), "t") == t * Fraction(1, 2)


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        v("z").derivative("w")


@settings(max_examples=50, deadline=None)
@given(polys(), polys())
def test_product_rule(p, q):
    lhs = (p * q).derivative("z")
    rhs = p.derivative("z") * q + p * q.derivative("z")
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(polys())
def test_serialization_roundtrip(p):
    assert parse_poly(str(p), VARS) == p


def test_no_zero_terms_stored():
    p = v("z") - v("z")
    assert p.terms == {}
    q = MultiPoly(VARS, {(0, 0, 0, 0): GaussianRational(0)})
    assert q.terms == {}


def test_subs_polynomial():
    z, b0 = v("z"), v("b0")
    p = z ** 2 + b0
    out = p.subs({"z": b0 + 1})
    assert out == (b0 + 1) ** 2 + b0


def test_coeffs_in():
    z, b0 = v("z"), v("b0")
    p = z ** 2 * b0 + z * 3 + 1
    parts = p.coeffs_in("z")
    assert parts[2] == MultiPoly.variable("b0", ("b0", "th0", "t"))
    assert parts[0].constant_value() == GaussianRational(1)


def test_exact_division():
    z, b0 = v("z"), v("b0")
    p = (z + b0) * (z ** 2 - b0 + 2)
    assert p.exact_div(z + b0) == z ** 2 - b0 + 2
    with pytest.raises(ValueError):
        (z + 1).exact_div(z + b0)


def test_eval_exact_and_complex():
    z, t = v("z"), v("t")
    p = z * t + gauss(0, 1)
    val = p.eval_exact({"z": 2, "t": Fraction(1, 2), "b0": 0, "th0": 0})
    assert val == gauss(1, 1)
    approx = p.eval_complex({"z": 2.0, "t": 0.5, "b0": 0.0, "th0": 0.0})
    assert abs(approx - (1 + 1j)) < 1e-15


def test_gcd_cancellation():
    z, b0 = v("z"), v("b0")
    common = z + b0
    r = RationalFunction(common ** 2 * (z - 1), common * (z + 1))
    assert r.numerator == (z + b0) * (z - 1)
    assert r.denominator == z + 1


def test_gcd_of_coprime():
    z, b0 = v("z"), v("b0")
    g = poly_content_gcd(z + 1, b0 + 2)
    assert g.is_constant()


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3, max_exp=2), polys(max_terms=3, max_exp=2))
def test_rf_cross_multiplication_equality(p, q):
    if q.is_zero():
        return
    r1 = RationalFunction(p, q)
    r2 = RationalFunction(p * (q + 1), q * (q + 1))
    assert r1 == r2
