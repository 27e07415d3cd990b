from hypothesis import given, strategies as st

from g2local.rootdata import (
    ALPHA, BETA, OMEGA1, OMEGA2, ZERO_WEIGHT, Weight, fundamental_coords, is_dominant,
    longest_element, pairing, poincare_coeffs, positive_roots, reflect, rho, roots,
    stabilizer, weyl_group, weyl_orbit,
)

weights = st.builds(Weight, st.integers(-6, 6), st.integers(-6, 6))


def test_positive_roots():
    pos = positive_roots()
    assert len(pos) == 6 and Weight(2, 1) in pos


def test_cartan_pairings():
    assert pairing(ALPHA, "alpha") == 2
    assert pairing(BETA, "beta") == 2
    assert pairing(BETA, "alpha") == -3
    assert pairing(ALPHA, "beta") == -1
    assert fundamental_coords(OMEGA1) == (1, 0)
    assert fundamental_coords(OMEGA2) == (0, 1)


def test_reflection_closure():
    phi = set(roots())
    for r in phi:
        for g in ("alpha", "beta"):
            assert reflect(r, g) in phi


def test_weyl_group():
    w = weyl_group()
    assert len(w) == 12
    assert len({g.matrix for g in w}) == 12
    assert poincare_coeffs(w) == [1, 2, 2, 2, 2, 2, 1]
    w0 = longest_element()
    assert w0.length == 6
    assert all(w0(r) == -r for r in roots())
    for g in w:
        assert {g(r) for r in roots()} == set(roots())
        assert g.det() == g.sign()


def test_orbits():
    assert weyl_orbit(ZERO_WEIGHT) == {ZERO_WEIGHT}
    assert len(weyl_orbit(OMEGA1)) == 6
    assert len(weyl_orbit(OMEGA2)) == 6
    short = {Weight(1, 0), Weight(1, 1), Weight(2, 1)}
    assert weyl_orbit(OMEGA1) == short | {-r for r in short}
    assert rho() == OMEGA1 + OMEGA2


@given(weights)
def test_orbit_has_one_dominant_member(w):
    orbit = weyl_orbit(w)
    dom = [x for x in orbit if is_dominant(x)]
    assert len(dom) == 1
    assert len(orbit) * len(stabilizer(dom[0])) == 12


@given(weights, weights)
def test_weyl_elements_are_linear(a, b):
    for g in weyl_group():
        assert g(a + b) == g(a) + g(b)
        assert g(-a) == -g(a)
