from fractions import Fraction

from hypothesis import given, settings, strategies as st

from g2local.exactalg import ONE, LaurentPoly, RationalFunc, local_zeta, mono
from g2local.rootdata import OMEGA1, OMEGA2, ZERO_WEIGHT, weyl_group
from g2local.satake import (
    SatakeParam, act, character_weights, formal_character, l_factor, p_polys, q_hat,
    std_rep_weights, std_trace, sym_power_trace, weight_monomial, weyl_character,
    weyl_dimension,
)

nonzero_q = st.fractions(min_value=-9, max_value=9, max_denominator=9).filter(lambda x: x != 0)
params = st.builds(SatakeParam, nonzero_q, nonzero_q)
TRIVIAL = SatakeParam.trivial()


def test_dimensions():
    assert weyl_character(OMEGA1, TRIVIAL) == 7
    assert weyl_character(OMEGA2, TRIVIAL) == 14
    assert weyl_character(ZERO_WEIGHT, SatakeParam(Fraction(3), Fraction(-2))) == 1
    assert weyl_dimension(OMEGA1) == 7 and weyl_dimension(OMEGA2) == 14


def test_character_is_weyl_invariant():
    for hw in (OMEGA1, OMEGA2, OMEGA1 + OMEGA2):
        ch = formal_character(hw)
        for g in weyl_group():
            assert act(g, ch) == ch
        assert sum(character_weights(hw).values()) == weyl_dimension(hw)


def test_std_weights():
    ws = std_rep_weights()
    assert len(ws) == 7 and ws.count(ZERO_WEIGHT) == 1
    assert sorted(-w for w in ws) == ws
    assert std_trace(TRIVIAL) == 7


def test_weight_monomial_is_homomorphism():
    a, b = OMEGA1, OMEGA2
    assert weight_monomial(a + b) == weight_monomial(a) * weight_monomial(b)


def test_sym_power_examples():
    assert sym_power_trace(0) == ONE
    assert sym_power_trace(1, TRIVIAL) == 7
    assert sym_power_trace(2, TRIVIAL) == 28


def test_l_factor_trivial():
    assert l_factor(TRIVIAL) == RationalFunc(ONE, (ONE - mono(u=1)) ** 7)


@settings(max_examples=15, deadline=None)
@given(params)
def test_poincare_series(p):
    coeffs = l_factor(p).u_series(8)
    for j, c in enumerate(coeffs):
        assert c == sym_power_trace(j, p)


def test_l_factor_weyl_invariant():
    formal = l_factor()
    for g in weyl_group():
        assert act(g, formal) == formal


def test_p_polys_at_zero():
    p0, p1 = p_polys(LaurentPoly())
    assert p0 == RationalFunc(ONE) and p1.is_zero()


def test_p_polys_coefficients():
    z = mono(x1=1)
    p0, p1 = p_polys(z)
    parts = p0.num.split_by("x1")
    assert parts[3] == mono(q=-2) + mono(q=-1)
    assert parts[0] == ONE
    assert p_polys()[1] == RationalFunc(mono(q=3, u=10))


def test_q_hat_limits():
    assert q_hat().u_series(0)[0] == ONE
    lhs = q_hat(TRIVIAL)
    p0, p1 = p_polys()
    zetas = local_zeta(5, -1) * local_zeta(5, 1) * local_zeta(5, -2)
    assert lhs == (p0 - p1 * 7) / zetas
