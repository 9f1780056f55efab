import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tuberec.exactnum import IncompatibleRadicals, QNum, exact_sqrt, qnum

rationals = st.fractions(max_denominator=50)
radicands = st.sampled_from([2, 3, 5, 7, 11, 31, 47])


def qn(a, b, d):
    return QNum(a, b, d)


def test_canonicalization():
    assert QNum(1, 3, 4) == QNum(7)            # 1 + 3*2
    assert QNum(0, 2, 8) == QNum(0, 4, 2)      # sqrt(8) = 2 sqrt(2)
    assert QNum(5, 0, 7) == QNum(5)
    assert QNum(2, 1, 1) == QNum(3)
    assert QNum(Fraction(1, 2), Fraction(1, 3), 27) == QNum(Fraction(1, 2), 1, 3)


def test_sign_cases():
    assert qn(1, 1, 2).sign() == 1
    assert qn(-1, -1, 2).sign() == -1
    assert qn(3, -2, 2).sign() == 1      # 3 > 2 sqrt2? 9 > 8 yes
    assert qn(2, -3, 2).sign() == -1     # 2 < 3 sqrt2
    assert qn(-3, 2, 2).sign() == -1
    assert qn(-2, 3, 2).sign() == 1
    assert qn(0, 0, 0).sign() == 0
    assert qn(0, 1, 5).sign() == 1
    assert qn(0, -1, 5).sign() == -1
    # sharp case: 7 - 5 sqrt(2) < 0 since 49 < 50
    assert qn(7, -5, 2).sign() == -1
    assert qn(7, -5, 2) < 0 < qn(5, -2, 2)


def test_incompatible_radicals():
    with pytest.raises(IncompatibleRadicals):
        _ = qn(0, 1, 2) + qn(0, 1, 3)
    # rational operands adopt the other radicand silently
    assert qn(1, 0, 0) + qn(0, 1, 3) == qn(1, 1, 3)


def test_division():
    x = qn(1, 1, 2)
    assert x / x == QNum(1)
    assert QNum(1) / x == qn(-1, 1, 2)  # 1/(1+s2) = s2-1
    with pytest.raises(ZeroDivisionError):
        _ = x / QNum(0)


def test_float_refused():
    with pytest.raises(TypeError):
        qnum(0.5)


def test_exact_sqrt():
    assert exact_sqrt(QNum(Fraction(9, 4))) == QNum(Fraction(3, 2))
    r = exact_sqrt(QNum(2))
    assert r == qn(0, 1, 2)
    assert exact_sqrt(QNum(Fraction(4, 7))) == qn(0, Fraction(2, 7), 7)
    assert exact_sqrt(qn(1, 1, 2)) is None
    with pytest.raises(ValueError):
        exact_sqrt(QNum(-1))
    # sqrt(q)^2 == q round trip
    for q in [Fraction(3, 5), Fraction(31, 4), Fraction(7)]:
        r = exact_sqrt(QNum(q))
        assert r * r == QNum(q)


@settings(derandomize=True, max_examples=200)
@given(rationals, rationals, rationals, rationals, radicands)
def test_ring_laws(a1, b1, a2, b2, d):
    x = QNum(a1, b1, d)
    y = QNum(a2, b2, d)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) * (x - y) == x * x - y * y
    if y != QNum(0):
        assert (x / y) * y == x


@settings(derandomize=True, max_examples=200)
@given(rationals, rationals, radicands)
def test_order_agrees_with_float(a, b, d):
    x = QNum(a, b, d)
    f = float(a) + float(b) * math.sqrt(d)
    if abs(f) > 1e-9:  # away from the rounding cliff
        assert (x.sign() > 0) == (f > 0)
    assert abs(float(x) - f) < 1e-12 * max(1.0, abs(f))


@settings(derandomize=True, max_examples=100)
@given(rationals, rationals, rationals, rationals, radicands)
def test_trichotomy(a1, b1, a2, b2, d):
    x = QNum(a1, b1, d)
    y = QNum(a2, b2, d)
    assert (x < y) + (x == y) + (x > y) == 1
