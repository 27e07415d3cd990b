from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2local.exactalg import (
    ONE, LaurentPoly, RationalFunc, arith, geometric_sum, j_normalizer, local_zeta, mono,
)

small = st.integers(-3, 3)
monos = st.builds(lambda a, b, c, d, k: mono(q=a, u=b, x1=c, x2=d, coeff=k),
                  small, small, small, small, st.integers(-5, 5))
polys = st.lists(monos, min_size=0, max_size=4).map(lambda ms: sum(ms, LaurentPoly()))
nonzero = polys.filter(lambda p: not p.is_zero())
point = {"q": Fraction(7, 3), "u": Fraction(-2, 5), "x1": Fraction(3, 2), "x2": Fraction(5, 7)}


def test_examples():
    u = mono(u=1)
    assert arith(ONE - u, ONE + u, "mul") == RationalFunc(ONE - mono(u=2))
    assert arith(mono(x1=1), mono(x1=1), "div") == RationalFunc(ONE)
    a = RationalFunc(ONE, ONE - u)
    b = RationalFunc(u, ONE - u)
    assert arith(a, b, "sub") == RationalFunc(ONE)


def test_geometric_sum():
    u = mono(u=1)
    assert geometric_sum(u, 0) == RationalFunc(ONE, ONE - u)
    x = mono(q=-1, u=5)
    assert geometric_sum(x, 2) == RationalFunc(mono(q=-2, u=10), ONE - x)
    assert geometric_sum(u, 1) - geometric_sum(u, 0) == RationalFunc(-ONE)
    with pytest.raises(ValueError):
        geometric_sum(ONE + u)


def test_local_zeta():
    assert local_zeta(5, 0) == RationalFunc(ONE, ONE - mono(u=5))
    assert local_zeta(5, 1) == RationalFunc(ONE, ONE - mono(q=-1, u=5))
    with pytest.raises(ZeroDivisionError):
        local_zeta(0, 0)
    assert j_normalizer().u_series(1)[0] == 1


def test_zero_coefficients_dropped():
    p = mono(u=1) - mono(u=1) + mono(q=2, coeff=0)
    assert p.is_zero() and len(p.terms()) == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert -(-a) == a


@settings(max_examples=60, deadline=None)
@given(polys, nonzero, polys, nonzero)
def test_fraction_field(a, b, c, d):
    x, y = RationalFunc(a, b), RationalFunc(c, d)
    assert (x + y) - y == x
    assert (x * y) == RationalFunc(a * c, b * d)
    assert (x == y) == (a * d - c * b).is_zero()
    lhs = (x + y).evaluate(point)
    assert lhs == x.evaluate(point) + y.evaluate(point)
    assert x.evaluate(point) == a.evaluate(point) / b.evaluate(point)


@settings(max_examples=40, deadline=None)
@given(nonzero, polys)
def test_exact_div_roundtrip(a, b):
    assert (a * b).exact_div(a) == b


@settings(max_examples=40, deadline=None)
@given(polys, nonzero)
def test_json_and_reduce(a, b):
    x = RationalFunc(a, b)
    assert RationalFunc.from_json(x.to_json()) == x
    assert x.reduce() == x


def test_subs_and_series():
    x = RationalFunc(ONE, ONE - mono(q=-1, u=5))
    at5 = x.subs(q=Fraction(5))
    assert at5 == RationalFunc(ONE, ONE - mono(u=5, coeff=Fraction(1, 5)))
    series = RationalFunc(ONE, ONE - mono(u=1)).u_series(4)
    assert list(series) == [1, 1, 1, 1, 1]
