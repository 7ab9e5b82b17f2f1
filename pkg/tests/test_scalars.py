from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mouldkit.scalars import ONE, ZERO, Scalar, as_scalar, format_scalar, multiplier_power, parse_scalar

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(Scalar, rationals, rationals)
vectors = st.lists(st.integers(-4, 4), min_size=2, max_size=2)


def test_rational_addition():
    assert Scalar(Fraction(1, 2)) + Scalar(Fraction(1, 3)) == Scalar(Fraction(5, 6))


def test_i_squared():
    i = Scalar(0, 1)
    assert i * i == Scalar(-1)


def test_self_division():
    z = Scalar(1, 1)
    assert z / z == ONE


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Scalar(3) / ZERO


def test_lowest_terms():
    z = Scalar(Fraction(2, 4), Fraction(-6, 8))
    assert z.re == Fraction(1, 2) and z.im == Fraction(-3, 4)
    assert z._d > 0


def test_floats_refused():
    with pytest.raises(TypeError):
        as_scalar(0.5)


@pytest.mark.parametrize(
    "mu, n, expected",
    [((2,), (3,), 8), ((2, Fraction(1, 2)), (1, 1), 1), ((2,), (-1,), Fraction(1, 2))],
)
def test_multiplier_power(mu, n, expected):
    assert multiplier_power(tuple(Scalar(m) for m in mu), n) == Scalar(expected)


def test_multiplier_power_length_mismatch():
    with pytest.raises(ValueError):
        multiplier_power((Scalar(2),), (1, 1))


@pytest.mark.parametrize(
    "text, re, im",
    [
        ("3/2", Fraction(3, 2), 0),
        ("-1/3+2i", Fraction(-1, 3), 2),
        ("1+2*i", 1, 2),
        ("2i", 0, 2),
        ("i", 0, 1),
        ("-i", 0, -1),
        ("5-1/2i", 5, Fraction(-1, 2)),
        ("−7", -7, 0),
    ],
)
def test_parse(text, re, im):
    z = parse_scalar(text)
    assert (z.re, z.im) == (re, im)


@pytest.mark.parametrize("bad", ["", "abc", "1/0x", "1..2", "2ii"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(bad)


@given(scalars)
def test_text_roundtrip(z):
    assert parse_scalar(format_scalar(z)) == z


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == ZERO
    if a:
        assert a * a.reciprocal() == ONE


@given(scalars)
def test_hash_consistent_with_equality(z):
    assert hash(Scalar(z.re, z.im)) == hash(z)
    if z.is_real():
        assert hash(z) == hash(z.re)


@given(vectors, vectors)
def test_power_is_multiplicative(m, n):
    mu = (Scalar(2), Scalar(1, 1))
    total = [a + b for a, b in zip(m, n)]
    assert multiplier_power(mu, total) == multiplier_power(mu, m) * multiplier_power(mu, n)
