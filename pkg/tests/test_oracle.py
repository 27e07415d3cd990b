from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2local import oracle
from g2local.closedforms import e_k_closed, printed_fiber_volumes
from g2local.heisenberg import GroupElementNF, R, RPoly, RegionSpec, full_region

r1, r2, r3, r4, r5 = R
toral = GroupElementNF.toral


def test_region_measure_examples():
    assert oracle.region_measure(RegionSpec(((r1, 0),)), 5) == 1
    assert oracle.region_measure(RegionSpec(((r1, 1), (r4, 1), (r1 * r4, 1))), 5) == 9
    assert oracle.fiber_volumes(toral(0, 0), 1, 5)["00"] == 45


def test_measuring_lemma_examples():
    assert oracle.measuring_lemma_check(5, 0, 0, 0) == (1, 1)
    assert oracle.measuring_lemma_check(5, 1, 1, 1) == (9, 9)
    assert oracle.measuring_lemma_check(7, 2, 1, 2) == (91, 91)
    with pytest.raises(ValueError):
        oracle.measuring_lemma(5, 1, 1, 3)


@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("a,b,c", [(0, 1, 1), (1, 2, 2), (2, 2, 1), (2, 1, 3)])
def test_grid_and_adaptive_engines_agree(p, a, b, c):
    grid, want = oracle.measuring_lemma_check(p, a, b, c, engine="grid")
    adaptive, _ = oracle.measuring_lemma_check(p, a, b, c, engine="adaptive")
    assert grid == adaptive == want


@pytest.mark.parametrize("n,m,k", [(0, 0, 0), (0, 0, 1), (0, 0, 2), (1, 2, 2), (1, 1, 2), (0, 1, 1), (2, 3, 3)])
def test_e_k_paths_agree(n, m, k):
    g = toral(n, m)
    res = oracle.e_k_oracle(g, k, 5, paths=("direct", "adaptive", "unreduced"))
    want = e_k_closed(g, k).subs(q=Fraction(5))
    want = Fraction(0) if want.is_zero() else Fraction(want.evaluate({}))
    assert res["direct"] == res["adaptive"] == res["unreduced"] == want
    assert abs(res["direct_complex"] - float(want)) < 1e-9


@pytest.mark.parametrize("n,m,k", [(0, 0, 0), (0, 0, 1), (1, 2, 2), (2, 3, 2), (2, 3, 3), (2, 4, 4)])
def test_four_volume_route_matches_direct(n, m, k):
    g = toral(n, m)
    res = oracle.e_k_oracle(g, k, 5, paths=("direct", "four_volume"))
    assert res["four_volume"] == res["direct"]
    assert res["fiber_volumes"] == printed_fiber_volumes(n, m, k, 5)


def test_e_k_spec_examples():
    assert oracle.e_k_direct(toral(0, 0), 0, 5)[0] == 1
    assert oracle.e_k_direct(toral(0, 0), 1, 5)[0] == 50
    assert oracle.e_k_direct(toral(0, 0), 2, 5)[0] == 0
    assert oracle.e_k_direct(toral(1, 3), 1, 5)[0] == 0
    report = oracle.e_k_report(toral(0, 0), 1, 5)
    assert report["value"] == 50 and report["points_enumerated"] >= 1


def test_nontoral_vanishing_cases():
    cases = oracle.nontoral_vanishing_cases(5)
    assert len(cases) == 10
    with_b_unit = [g for g, _ in cases if g.b_val() == 0]
    assert len(with_b_unit) >= 5
    for g, k in cases:
        exact, cval = oracle.e_k_direct(g, k, 5)
        assert exact == 0 and abs(cval) < 1e-9


def test_nontoral_b_small_four_volume_cancellation():
    g = oracle.nontoral_element(3, 4, Fraction(1, 5))
    assert g.b_val() > 0
    for k in (3, 4):
        vols = oracle.fiber_volumes(g, k, 5)
        assert vols["00"] - vols["01"] - vols["10"] + vols["11"] == 0


@settings(max_examples=12, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.sampled_from([0, 3, 4]))
def test_translation_invariance(c1, c4, idx):
    spec = RegionSpec(((r1, 1), (r4, 1), (r1 * r4, 1), (r1 + r4 * 2, 1)))
    shifted = spec.subs({0: r1 + RPoly.const(c1), 3: r4 + RPoly.const(c4)})
    assert oracle.region_measure(shifted, 5) == oracle.region_measure(spec, 5)


def test_reduction_does_not_change_volumes():
    spec = full_region(toral(1, 2), 2, 5)
    a = oracle.integrate(spec, 5, weight={1: 1, 2: 1})
    b = oracle.integrate(spec, 5, weight={1: 1, 2: 1}, reduce=False)
    assert a.character_sum(5) == b.character_sum(5)
    assert a.total == b.total


def test_budget_is_enforced(monkeypatch):
    spec = full_region(toral(2, 3), 3, 5)
    with pytest.raises(oracle.BudgetExceeded):
        oracle.integrate(spec, 5, weight={1: 1, 2: 1}, max_evals=10, reduce=False)
    monkeypatch.setenv("G2LOCAL_BUDGET", "123")
    assert oracle.budget() == 123


def test_excluded_primes():
    with pytest.raises(ValueError):
        oracle.region_measure(RegionSpec(((r1, 0),)), 3)


def test_cyclotomic_value():
    p = 5
    assert oracle.cyclotomic_value({j: 1 for j in range(25)}, p, 25) == 0
    assert oracle.cyclotomic_value({0: 3, 5: 1, 10: 1, 15: 1, 20: 1}, p, 25) == 2
    with pytest.raises(ArithmeticError):
        oracle.cyclotomic_value({1: 1}, p, 5)


def test_padic_approx():
    x = oracle.PAdicApprox(Fraction(50), 4, 5)
    assert x.valuation() == 2
    assert oracle.PAdicApprox(Fraction(625), 4, 5).valuation() is None
    assert (x * x).precision == 6
    assert oracle.EnumWindow(1, 1).cells(5) == 25


def test_nontoral_small_b_fiber_values():
    # |d alpha(t)| = q^l with l = -1: the k = n fibers have volume q^{-l}, and the
    # k = n + 1 fibers have m00 = m10 = q^{2-l}(2 - 1/q), m01 = m11 = q^{1-l}(q - 1).
    g = oracle.nontoral_element(3, 4, Fraction(1, 5))
    assert oracle.fiber_volumes(g, 3, 5) == {"00": 5, "01": 0, "10": 5, "11": 0}
    assert oracle.fiber_volumes(g, 4, 5) == {"00": 225, "01": 100, "10": 225, "11": 100}
    assert oracle.fiber_volumes(g, 4, 5) == oracle.fiber_volumes(g, 4, 5, source="full")
    g = oracle.nontoral_element(4, 5, Fraction(1, 5))
    assert oracle.fiber_volumes(g, 4, 5) == {"00": 25, "01": 0, "10": 25, "11": 0}
    assert oracle.fiber_volumes(g, 5, 5) == {"00": 1125, "01": 500, "10": 1125, "11": 500}
