import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2local import macdonald
from g2local.exactalg import ONE, RationalFunc, mono
from g2local.macdonald import ORIGIN, OMEGA1_VARPI, TorusValuation
from g2local.rootdata import weyl_group
from g2local.satake import SatakeParam, act, l_factor, q_hat, std_trace

SIX_TERMS = sum((mono(q=k) for k in range(1, 7)), start=mono(q=1) - mono(q=1))
nonzero_q = st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(lambda x: x not in (0, 1, -1))


def test_dominant_cone():
    cone = macdonald.dominant_cone(4)
    assert ORIGIN in cone and OMEGA1_VARPI in cone
    for t in cone:
        assert t.n >= 0 and t.m >= t.n
    assert not TorusValuation(1, 1).is_dominant()


def test_volumes():
    assert macdonald.double_coset_volume(ORIGIN) == ONE
    assert macdonald.double_coset_volume(OMEGA1_VARPI) == SIX_TERMS
    with pytest.raises(ValueError):
        macdonald.double_coset_volume(TorusValuation(1, 1))


def test_c_function_has_six_factors():
    assert len(macdonald._c_formal().den) == 6


def test_spherical_normalization():
    assert macdonald.spherical_value(SatakeParam(), ORIGIN) == RationalFunc(ONE)
    formal = macdonald.spherical_value(SatakeParam(), OMEGA1_VARPI)
    for w in weyl_group():
        assert act(w, formal) == formal


def test_a1_identity():
    lhs, rhs = macdonald.a1_identity_sides()
    assert lhs == rhs
    lhs, rhs = macdonald.a1_identity_sides(SatakeParam.trivial())
    assert rhs == 7 and lhs == 7


@pytest.mark.parametrize("t", [(0, 0), (1, 2), (2, 3), (2, 4), (3, 5), (4, 6)])
def test_two_routes_to_satake_transform(t):
    t = TorusValuation(*t)
    formal = SatakeParam()
    assert macdonald.satake_of_indicator(formal, t) == macdonald.satake_of_indicator_via_characters(formal, t)


def test_macdonald_identity_formal():
    lhs, rhs = macdonald.macdonald_identity_sides()
    assert lhs == rhs
    lhs, rhs = macdonald.macdonald_identity_sides(sign=1)
    assert lhs != rhs


def test_d_hat_leading_term():
    p = SatakeParam(Fraction(2), Fraction(3, 5))
    assert macdonald.d_hat(p).subs(q=Fraction(5)).u_series(0)[0] == ONE


@settings(max_examples=5, deadline=None)
@given(nonzero_q, nonzero_q)
def test_truncated_sum_matches_closed_form(x1, x2):
    try:
        trunc = macdonald.d_hat_truncated(5, float(x1), float(x2), 0.01, limit=30)
    except ValueError:
        return  # singular parameter; the Weyl-sum form is undefined there
    p = SatakeParam(x1, x2)
    exact = (l_factor(p, (5, -2)) * q_hat(p)).evaluate({"q": Fraction(5), "u": Fraction(1, 100)})
    assert abs(complex(trunc) - float(exact)) < 1e-9 * max(1.0, abs(float(exact)))


def test_truncated_sum_rejects_singular_parameter():
    with pytest.raises(ValueError):
        macdonald.d_hat_truncated(5, 1.0, 1.0, 0.01, limit=3)


@pytest.mark.parametrize("q", [5, 7])
def test_invertibility(q):
    s0, values = macdonald.invertibility_bound(q)
    assert math.isfinite(s0)
    after = [f for s, f in values if s > s0]
    assert after and all(f < 1 for f in after)
    assert all(a >= b for a, b in zip(after, after[1:]))
    p0, p1 = macdonald.check_p_polys_limits(q)
    assert abs(p0 - 1) < 1e-12 and abs(p1) < 1e-12


def test_invertibility_rejects_bad_q():
    with pytest.raises(ValueError):
        macdonald.invertibility_bound(1)


def test_std_trace_is_first_hecke_eigenvalue():
    p = SatakeParam(Fraction(2), Fraction(3, 5))
    lhs, rhs = macdonald.a1_identity_sides(p)
    assert lhs == rhs == RationalFunc(std_trace(p))
