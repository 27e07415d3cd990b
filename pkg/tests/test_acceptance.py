"""The nine end-to-end acceptance checks, each printing one PASS/FAIL line."""

import random
import time
from fractions import Fraction

from g2local import closedforms, cosets, heisenberg, macdonald, oracle, satake
from g2local.exactalg import mono
from g2local.heisenberg import GroupElementNF, UnipotentCoords


RESULTS = []


def report(label, ok, started, limit):
    elapsed = time.perf_counter() - started
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"[{status}] {label} ({elapsed:.2f}s, limit {limit}s)"
    RESULTS.append(line)
    print("\n" + line)
    return status == "PASS"


def _exact_at(rfunc, q):
    v = rfunc.subs(q=Fraction(q))
    return Fraction(0) if v.is_zero() else Fraction(v.evaluate({}))


def test_criterion_1_poincare():
    t0 = time.perf_counter()
    rng = random.Random(1)
    ok = True
    for _ in range(10):
        p = satake.SatakeParam(Fraction(rng.randint(-20, 20), rng.randint(1, 13)),
                               Fraction(rng.choice([-1, 1]) * rng.randint(1, 20), rng.randint(1, 13)))
        coeffs = satake.l_factor(p).u_series(12)
        assert len(coeffs) == 13
        for j, c in enumerate(coeffs):
            ok &= c == satake.sym_power_trace(j, p)
    assert report("1 Poincare identity truncation", ok, t0, 10)


def test_criterion_2_macdonald():
    t0 = time.perf_counter()
    lhs, rhs = macdonald.macdonald_identity_sides()
    formal = lhs == rhs
    q, u = 5, Fraction(1, 100)
    errs = []
    for x1, x2 in [(Fraction(1, 2), Fraction(2, 3)), (Fraction(3, 7), Fraction(5, 4)), (Fraction(-2, 3), Fraction(7, 5))]:
        trunc = complex(macdonald.d_hat_truncated(q, float(x1), float(x2), float(u), limit=40))
        p = satake.SatakeParam(x1, x2)
        exact = (satake.l_factor(p, (5, -2)) * satake.q_hat(p)).evaluate({"q": Fraction(q), "u": u})
        errs.append(abs(trunc - float(exact)))
    ok = formal and max(errs) < 1e-9
    assert report("2 Macdonald identity (formal and truncated)", ok, t0, 60)


def test_criterion_3_a1():
    t0 = time.perf_counter()
    lhs, rhs = macdonald.a1_identity_sides()
    vol = macdonald.double_coset_volume(macdonald.OMEGA1_VARPI)
    want = mono(q=6) + mono(q=5) + mono(q=4) + mono(q=3) + mono(q=2) + mono(q=1)
    ok = lhs == rhs and vol == want
    ok &= all(Fraction(vol.evaluate({"q": p})) == cosets.total_count(p) for p in (5, 7, 11))
    ok &= all(sum(cosets.class_counts(p).values()) == cosets.total_count(p) for p in (5, 7))
    assert report("3 A1 consistency and double coset volume", ok, t0, 10)


def test_criterion_4_basic_identity():
    t0 = time.perf_counter()
    res = closedforms.verify_basic_identity(6, 6, routes=("structured", "printed"))
    off = closedforms.off_support_samples(20)
    ok = res["pass"] and len(off) == 20 and res["off_support"] == 20
    for g in off:
        ok &= closedforms.d_psi_closed(g).value.is_zero()
        ok &= not g.is_toral() or closedforms.p_convolve_closed(g.n, g.m).value.is_zero()
    assert report("4 basic identity n,m<=6 plus 20 off-support samples", ok, t0, 30)


def test_criterion_5_convolution():
    t0 = time.perf_counter()
    ok = True
    s = complex(0.25, 1.3)
    for p in (5, 7):
        ok &= cosets.total_count(p) == len(cosets.left_coset_reps(p))
        for n, m in ((0, 0), (1, 2), (2, 4), (1, 1), (2, 2), (2, 3), (3, 4), (3, 5)):
            classes = cosets.class_masses((n, m), p)
            exact, _ = cosets.convolve_indicator((n, m), p, classes)
            raw = closedforms.raw_convolution_cases(n, m)
            ok &= exact == raw.subs(q=Fraction(p))
            cval = cosets.convolve_indicator_complex((n, m), p, s, classes)
            pval = complex(raw.evaluate({"q": float(p), "u": float(p) ** (-s)}))
            ok &= abs(cval - pval) < 1e-9
            assembled = closedforms.assemble_convolution(closedforms.f_toral(n, m), exact)
            ok &= assembled.subs(q=Fraction(p)) == closedforms.p_convolve_closed(n, m).value.subs(q=Fraction(p))
    assert report("5 four-case convolution at p=5,7", ok, t0, 300)


def test_criterion_6_oracle():
    t0 = time.perf_counter()
    ok = True
    for p in (5, 7):
        for a in range(4):
            for b in range(4):
                for c in range(a + b + 1):
                    got, want = oracle.measuring_lemma_check(p, a, b, c)
                    ok &= got == want
    p = 5
    for n in range(3):
        for m in range(3):
            g = GroupElementNF.toral(n, m)
            for k in (n, n + 1, n + 2):
                res = oracle.e_k_oracle(g, k, p, paths=("direct",))
                want = _exact_at(closedforms.e_k_closed(g, k), p)
                ok &= res["direct"] == want
                ok &= abs(res["direct_complex"] - float(want)) < 1e-9
                if k == n + 2 and n <= m <= 2 * n:
                    ok &= want == 0 and res["direct"] == 0
        for m in range(n, 2 * n + 1):
            g = GroupElementNF.toral(n, m)
            for k in (n, n + 1, n + 2):
                ok &= oracle.fiber_volumes(g, k, p, source="full") == closedforms.printed_fiber_volumes(n, m, k, p)
    vols = closedforms.printed_fiber_volumes(1, 2, 2, 5)
    ok &= vols["00"] == 2 * 25 - 5 and vols["11"] == 5 and vols["01"] == vols["10"] == 0
    assert report("6 measuring lemma, E_k oracle, fiber volumes", ok, t0, 600)


def test_criterion_7_nontoral_vanishing():
    t0 = time.perf_counter()
    cases = oracle.nontoral_vanishing_cases(5)
    ok = len(cases) == 10
    ok &= any(g.bp1_val is not None for g, _ in cases)
    for g, k in cases:
        assert not g.is_toral()
        exact, cval = oracle.e_k_direct(g, k, 5)
        ok &= exact == 0 and abs(cval) < 1e-9
    assert report("7 non-toral vanishing on 10 instances", ok, t0, 600)


def test_criterion_8_iota():
    t0 = time.perf_counter()
    ok = True
    for p in (5, 7):
        pi = Fraction(p)
        for n in range(6):
            for m in range(n, 6):
                mat = heisenberg.iota(t=(pi ** n, pi ** m), p=p)
                ok &= heisenberg.preserves_form(mat)
                if macdonald.TorusValuation(n, m).is_dominant():
                    ok &= heisenberg.gamma_height(mat, p) == Fraction(p) ** n
        for r in ((1, 2, 3, 4, 5), (Fraction(1, 5), 0, 2, 0, Fraction(3, 7))):
            mat = heisenberg.iota(UnipotentCoords(*map(Fraction, r)), t=(pi, pi ** 2), d=Fraction(2, 3), p=p)
            ok &= heisenberg.preserves_form(mat)
    assert report("8 iota J-orthogonality and Gamma on T+", ok, t0, 5)


def test_criterion_9_invertibility():
    t0 = time.perf_counter()
    ok = True
    for q in (5, 7):
        s0, values = macdonald.invertibility_bound(q)
        ok &= s0 == s0 and abs(s0) != float("inf")
        ok &= all(f < 1 for s, f in values if s > s0)
        tail = [macdonald.invertibility_quantity(q, s) for s in (s0 + 1, s0 + 3, s0 + 10)]
        ok &= tail[0] > tail[1] > tail[2] and tail[2] < 1e-6
    assert report("9 invertibility bound at q=5,7", ok, t0, 5)
