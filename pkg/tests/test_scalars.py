"""Base field scalars: exact rationals and odd prime fields."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from azulift.errors import FormatError
from azulift.scalars import QQ, PrimeField, Rationals


def test_rationals_singleton_equality():
    assert QQ == Rationals()
    assert QQ.char == 0


@given(st.fractions(max_denominator=10**6))
@settings(max_examples=100, deadline=None)
def test_rational_fmt_parse_round_trip(f):
    c = QQ.coerce(f)
    assert QQ.parse(QQ.fmt(c)) == c


def test_rational_fmt_is_canonical():
    assert QQ.fmt(QQ.parse("4/6")) == "2/3"
    assert QQ.fmt(QQ.parse("-4/-6")) == "2/3"
    assert QQ.fmt(QQ.parse("7/1")) == "7"
    assert QQ.fmt(QQ.zero) == "0"


@pytest.mark.parametrize("bad", ["1.5", "", "1e3", "2/", "/3", "1 / 2", "0x10", "½"])
def test_rational_parse_rejects_noninteger_forms(bad):
    with pytest.raises(FormatError):
        QQ.parse(bad)


def test_rational_squares():
    assert QQ.is_square(QQ.coerce(Fraction(9, 4)))
    r = QQ.sqrt(QQ.coerce(Fraction(9, 4)))
    assert r * r == QQ.coerce(Fraction(9, 4))
    assert not QQ.is_square(QQ.coerce(2))
    assert not QQ.is_square(QQ.coerce(-1))


def test_rational_random_scalar_height_bound():
    import random

    rng = random.Random(1)
    for _ in range(200):
        v = QQ.random_scalar(rng, 7)
        assert abs(v.numerator) <= 7 and v.denominator == 1
    assert all(QQ.random_scalar(rng, 3, nonzero=True) != 0 for _ in range(50))


def test_prime_field_arithmetic():
    F = PrimeField(7)
    a, b = F.coerce(3), F.coerce(5)
    assert F.fmt(a + b) == "1"
    assert F.fmt(a * b) == "1"
    assert F.fmt(-a) == "4"
    assert F.fmt(a / b) == F.fmt(a * b ** (-1))
    assert F.parse("10") == F.coerce(3)
    assert F.parse("1/2") == F.coerce(4)


def test_prime_field_squares():
    F = PrimeField(7)
    squares = {F.coerce(i * i) for i in range(1, 7)}
    for i in range(1, 7):
        c = F.coerce(i)
        assert F.is_square(c) == (c in squares)
        if F.is_square(c):
            r = F.sqrt(c)
            assert r * r == c
    assert F.is_square(F.zero)


@pytest.mark.parametrize("p", [2, 9, 15, 1, 0, -7])
def test_prime_field_rejects_bad_modulus(p):
    with pytest.raises(ValueError):
        PrimeField(p)


def test_prime_fields_are_distinct():
    assert PrimeField(7) == PrimeField(7)
    assert PrimeField(7) != PrimeField(11)
    assert PrimeField(7) != QQ
