"""Arithmetic in the exact coefficient ring."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetmod.scalars import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussRat,
    Scalar,
    ScalarError,
    format_scalar,
    parse_gauss,
    parse_scalar,
)

fractions = st.fractions(max_denominator=50)
gauss = st.builds(GaussRat, fractions, fractions)
scalars = st.builds(lambda cs: Scalar.make(cs),
                    st.lists(gauss, max_size=4))


def test_gauss_basic():
    x = GaussRat.of("1/2", "-3")
    assert x.re == Fraction(1, 2) and x.im == Fraction(-3)
    assert x + (-x) == GR_ZERO
    assert x.conjugate().conjugate() == x
    assert GR_I * GR_I == -GR_ONE


def test_gauss_division_inverts_multiplication():
    x = GaussRat.of("3/7", "2")
    y = GaussRat.of(-2, "1/3")
    assert (x * y) / y == x
    with pytest.raises(ZeroDivisionError):
        x / GR_ZERO


@given(gauss, gauss)
@settings(max_examples=50, deadline=None)
def test_gauss_conjugation_is_multiplicative(x, y):
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


def test_scalar_structure():
    a = Scalar.var()
    s = Scalar.of(2) + a * a
    assert s.degree == 2
    assert s.coefficient(0) == GaussRat.of(2)
    assert s.coefficient(1) == GR_ZERO
    assert s.coefficient(2) == GR_ONE
    # trailing zeros are stripped, so equality is structural
    assert Scalar.make([GR_ONE, GR_ZERO]) == Scalar.of(1)


def test_scalar_evaluate_horner():
    a = Scalar.var()
    s = Scalar.of(1) - Scalar.of(4) * a + a * a
    a0 = GaussRat.of("1/2")
    assert s.evaluate(a0) == GR_ONE - GaussRat.of(2) + a0 * a0


def test_scalar_conjugate_fixes_the_variable():
    # a is a real parameter: conjugation touches coefficients only
    s = Scalar.of(0, 1) * Scalar.var()
    c = s.conjugate()
    assert c.degree == 1
    assert c.coefficient(1) == -GR_I


def test_scalar_division_by_constant_only():
    s = Scalar.var() * Scalar.of(3)
    assert s / Scalar.of(3) == Scalar.var()
    with pytest.raises(ScalarError):
        s / Scalar.var()


@given(scalars, scalars, scalars)
@settings(max_examples=40, deadline=None)
def test_scalar_ring_laws(x, y, z):
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x


@given(scalars)
@settings(max_examples=40, deadline=None)
def test_format_parse_round_trip(s):
    assert parse_scalar(format_scalar(s)) == s


def test_parse_examples():
    assert parse_scalar("1/2 + 3/4 i a^2").degree == 2
    assert parse_scalar("-a") == -Scalar.var()
    assert parse_gauss("-2/3") == GaussRat.of("-2/3")
    with pytest.raises(ScalarError):
        parse_gauss("a")
    with pytest.raises(ScalarError):
        parse_scalar("1 +")
