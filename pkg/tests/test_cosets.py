import cmath
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from g2local import cosets
from g2local.closedforms import f_pi, raw_convolution_cases
from g2local.exactalg import mono
from g2local.heisenberg import UnipotentCoords, iota_torus, iota_unipotent, iota_x_alpha, matmul


def test_count_identity_symbolic():
    q = mono(q=1)
    want = sum((mono(q=k) for k in range(1, 7)), start=q - q)
    assert cosets.total_count(q) == want


def test_counts_at_five():
    assert cosets.total_count(5) == 19530
    assert len(cosets.left_coset_reps(5)) == 19530
    by_label = {}
    for label, *_ in cosets.right_coset_reps(5):
        by_label[label] = by_label.get(label, 0) + 1
    assert by_label["-omega"] == 1
    assert by_label["omega"] == 5 ** 6
    omega = next(r for r in cosets.COSET_TABLE if r.label == "omega")
    assert dict(omega.params)["r5"] == "Z"
    with pytest.raises(ValueError):
        cosets.right_coset_reps(3)


def test_coset_table_at_five():
    r = cosets.verify_coset_table(5)
    assert r["count"] == r["expected"] == 19530
    assert r["height_ok"] and r["distinct"]


def _random_k(rng):
    m = iota_unipotent(UnipotentCoords(*(Fraction(rng.randint(-9, 9)) for _ in range(5))))
    m = matmul(m, iota_x_alpha(rng.randint(-9, 9)))
    return matmul(m, iota_torus(rng.choice([1, 2, -3]), rng.choice([1, -1, 4])))


def test_lattice_key_is_right_k_invariant():
    rng = random.Random(7)
    reps = cosets.right_coset_reps(5)
    for _ in range(60):
        label, u, z, torus = reps[rng.randrange(len(reps))]
        m = cosets.rep_matrix(u, z, torus, 5)
        assert cosets.lattice_key(matmul(m, _random_k(rng)), 5) == cosets.lattice_key(m, 5)


def _masses_reference(t, p):
    """class_masses recomputed from the explicit row-0 decomposition of every t b'_i."""
    out = {}
    for label, u, z, torus in cosets.right_coset_reps(p):
        h, D, r2, r3 = cosets.decompose_row0(t, u, z, torus, p)
        nf = cosets._nf_of(h, D, p)
        key = (nf.n, nf.m, f_pi(nf) if nf.n >= 0 else 0, nf.is_toral())
        jk = cosets.padic_frac(r2 + r3, p)
        slot = out.setdefault(key, {})
        slot[jk] = slot.get(jk, 0) + 1
    return out


@pytest.mark.parametrize("t", [(0, 0), (1, 2), (2, 3), (1, 1)])
def test_fast_masses_match_matrix_route(t):
    fast = cosets.class_masses(t, 5)
    ref = _masses_reference(t, 5)
    assert {k: v["masses"] for k, v in fast.items()} == ref


def test_convolution_matches_case_one_at_a_point():
    exact, _ = cosets.convolve_indicator((0, 0), 5)
    pt = {"u": Fraction(1, 10)}
    want = raw_convolution_cases(0, 0).subs(q=Fraction(5)).evaluate(pt)
    assert exact.evaluate(pt) == want


def test_convolution_vanishes_off_support():
    exact, summary = cosets.convolve_indicator((-3, -3), 5)
    assert exact.is_zero() and not summary


@pytest.mark.parametrize("t", [(0, 0), (2, 4), (3, 4)])
def test_complex_route_matches_exact(t):
    s = complex(0.4, 2.1)
    classes = cosets.class_masses(t, 5)
    exact, _ = cosets.convolve_indicator(t, 5, classes)
    cval = cosets.convolve_indicator_complex(t, 5, s, classes)
    want = complex(exact.evaluate({"u": 5.0 ** (-s)}))
    assert abs(cval - want) < 1e-9


def test_gauss_sums():
    p = 7
    assert cosets.residue_character_sum({(j, 1): 1 for j in range(p)}, p) == 0
    assert cosets.residue_character_sum({(0, 0): p}, p) == p


def test_double_sum_against_brute_force():
    p = 5
    t1 = t2 = Fraction(1)
    masses, brute = {}, 0j
    for r in range(p):
        for y in range(p):
            x = -Fraction(y, p) * ((t2 / t1) * y + t1) * r
            jk = cosets.padic_frac(x, p)
            masses[jk] = masses.get(jk, 0) + 1
            j, K = jk
            brute += cmath.exp(2j * cmath.pi * j / p ** K)
    exact = cosets.residue_character_sum(masses, p)
    assert exact == 2 * p
    assert abs(p * brute - 1 - (p * exact - 1)) < 1e-12


@settings(max_examples=50)
@given(st.integers(-10 ** 6, 10 ** 6), st.integers(0, 4), st.integers(1, 50))
def test_padic_frac(num, k, unit):
    p = 5
    if unit % p == 0:
        unit += 1
    x = Fraction(num, unit * p ** k)
    j, K = cosets.padic_frac(x, p)
    rest = x - Fraction(j, p ** K)
    assert rest.denominator % p != 0
    assert 0 <= j < max(p ** K, 1)
