"""K omega1(varpi) K as a union of cosets, and convolution of M_Psi functions against it.

Right cosets b' K are listed as u(r) x_alpha(z) h with h a torus element.  The
double coset is stable under inversion, so K omega1 K = union of K b'^{-1} and
(H * 1)(g) = sum_i H(g b'_i).
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpq

from .closedforms import f_value, f_pi
from .exactalg import ONE, RationalFunc, mono
from .heisenberg import (
    GroupElementNF,
    UnipotentCoords,
    gamma_exponent,
    iota_torus,
    iota_unipotent,
    iota_x_alpha,
    matmul,
    torus_diagonal,
    vp,
)
from .oracle import cyclotomic_value


@dataclass(frozen=True)
class CosetRep:
    """One family of representatives: torus valuations, unipotent shape, parameter ranges.

    ``params`` maps a name to "Y" (O/varpi), "Y*" (nonzero classes) or "Z" (O/varpi^2).
    ``build`` turns parameter values (and the prime) into (UnipotentCoords, z).
    """

    label: str
    torus: tuple
    params: tuple
    build: object

    def count(self, q):
        c = 1
        for _, kind in self.params:
            c *= {"Y": q, "Y*": q - 1, "Z": q * q}[kind]
        return c

    def expand(self, p):
        ranges = []
        for _, kind in self.params:
            ranges.append({"Y": range(p), "Y*": range(1, p), "Z": range(p * p)}[kind])
        names = [n for n, _ in self.params]
        for vals in itertools.product(*ranges):
            yield self.build(dict(zip(names, vals)), p)


def _u(*r):
    return UnipotentCoords(*(Fraction(x) for x in r))


COSET_TABLE = (
    CosetRep("-omega", (-1, -2), (), lambda v, p: (_u(0, 0, 0, 0, 0), None)),
    CosetRep(
        "omega",
        (1, 2),
        (("r1", "Y"), ("r2", "Y"), ("r3", "Y"), ("r4", "Y"), ("r5", "Z")),
        lambda v, p: (_u(v["r1"], v["r2"], v["r3"], v["r4"], v["r5"]), None),
    ),
    CosetRep("-alpha-beta", (-1, -1), (("r1", "Y"),), lambda v, p: (_u(v["r1"], 0, 0, 0, 0), None)),
    CosetRep(
        "-beta",
        (0, -1),
        (("r4", "Y"), ("z", "Y")),
        lambda v, p: (_u(0, 0, 0, v["r4"], 0), Fraction(v["z"])),
    ),
    CosetRep(
        "beta",
        (0, 1),
        (("r1", "Z"), ("r2", "Y"), ("r5", "Y")),
        lambda v, p: (_u(v["r1"], v["r2"], 0, 0, v["r5"]), None),
    ),
    CosetRep(
        "alpha+beta",
        (1, 1),
        (("r3", "Y"), ("r4", "Z"), ("r5", "Y"), ("z", "Y")),
        lambda v, p: (_u(0, 0, v["r3"], v["r4"], v["r5"]), Fraction(v["z"])),
    ),
    CosetRep("1:a", (0, 0), (("r5", "Y*"),), lambda v, p: (_u(0, 0, 0, 0, Fraction(v["r5"], p)), None)),
    CosetRep(
        "1:b",
        (0, 0),
        (("r1", "Y*"), ("r5", "Y")),
        lambda v, p: (_u(Fraction(v["r1"], p), 0, 0, 0, Fraction(v["r5"], p)), None),
    ),
    CosetRep(
        "1:c",
        (0, 0),
        (("r1", "Y*"), ("r5", "Y"), ("y", "Y")),
        lambda v, p: (_curve_rep(v["r1"], v["y"], v["r5"], p), None),
    ),
)


def _curve_rep(r1, y, r5, p):
    """u(y^3 c, y^2 c, y c, c, r5/varpi) with c = r1/varpi.

    In these coordinates the central entry also absorbs -y^3 c^2, which keeps
    the element inside K omega1 K; r2 + r3 (hence the character) is unchanged.
    """
    c = Fraction(r1, p)
    return _u(y ** 3 * c, y ** 2 * c, y * c, c, Fraction(r5, p) - y ** 3 * c * c)


def class_counts(q):
    """Cosets per class mod M(O): 1, q^6, q(q+1), q^4(q+1), q^3 - 1."""
    by = {}
    groups = {"-omega": "h(-omega)", "omega": "h(omega)", "-alpha-beta": "h(alpha)h(beta)",
              "-beta": "h(alpha)h(beta)", "beta": "h(omega2)", "alpha+beta": "h(omega2)"}
    for rep in COSET_TABLE:
        key = groups.get(rep.label, "1")
        by[key] = by.get(key, 0) + rep.count(q)
    return by


def total_count(q):
    return sum(rep.count(q) for rep in COSET_TABLE)


def rep_matrix(rep_u, z, torus, p):
    """iota(u(r) x_alpha(z) h) for h = h_alpha(p^a) h_beta(p^b)."""
    m = iota_unipotent(rep_u)
    if z:
        m = matmul(m, iota_x_alpha(z))
    diag = torus_diagonal(Fraction(p) ** torus[0], Fraction(p) ** torus[1])
    return [[x * diag[j] for j, x in enumerate(row)] for row in m]


@lru_cache(maxsize=4)
def right_coset_reps(p):
    """All b'_i at the prime p as a tuple of (label, UnipotentCoords, z, torus)."""
    if p in (2, 3):
        raise ValueError("p = 2, 3 are excluded")
    out = []
    for rep in COSET_TABLE:
        for u, z in rep.expand(p):
            out.append((rep.label, u, z, rep.torus))
    return tuple(out)


def left_coset_reps(p):
    """Left coset representatives b_i = b'_i^{-1}, returned as the matrices of b'_i and a flag."""
    return [(label, u, z, torus, "inverse") for label, u, z, torus in right_coset_reps(p)]


# -- lattice normal form -------------------------------------------------------------


def _int_mod(x, p, mod):
    x = Fraction(x)
    return (x.numerator * pow(x.denominator, -1, mod)) % mod


def lattice_key(matrix, p):
    """Hermite normal form over Z_(p) of the column lattice of p * matrix, modulo p^2.

    Valid for matrices g with g, g^{-1} of height <= q, where p^2 O^7 lies in
    the lattice; two such g give the same key iff g K = g' K.
    """
    mod = p * p
    cols = [[_int_mod(p * matrix[i][j], p, mod) for i in range(7)] for j in range(7)]

    def val(x):
        if x % mod == 0:
            return 2
        return 0 if x % p else 1

    pivots = []
    remaining = cols
    basis = []
    for i in range(7):
        best = min(range(len(remaining)), key=lambda j: val(remaining[j][i]), default=None)
        v = 2 if best is None else val(remaining[best][i])
        if v == 2:
            basis.append([0] * 7)  # the column p^2 e_i, zero mod p^2
            pivots.append(2)
            continue
        col = remaining.pop(best)
        unit = (col[i] // p ** v) % mod
        inv = pow(unit, -1, mod)
        col = [(x * inv) % mod for x in col]
        for other in remaining:
            c = other[i] // p ** v
            if c:
                for k in range(7):
                    other[k] = (other[k] - c * col[k]) % mod
        if v == 1:
            # p * col vanishes in row i mod p^2 but still belongs to the lattice
            extra = [(p * x) % mod for x in col]
            if any(extra):
                remaining.append(extra)
        basis.append(col)
        pivots.append(v)
    # reduce entries below each pivot by the later pivot columns
    for i in range(7):
        if pivots[i] == 2:
            continue
        col = basis[i]
        for k in range(i + 1, 7):
            step = p ** pivots[k]
            c = col[k] // step
            if c and pivots[k] < 2:
                col_k = basis[k]
                for r in range(7):
                    col[r] = (col[r] - c * col_k[r]) % mod
            elif pivots[k] == 2:
                col[k] %= mod
    return tuple(pivots), tuple(tuple(c) for c in basis)


def verify_coset_table(p, check_distinct=True):
    """Height q for every representative, pairwise distinct cosets, and the total count."""
    seen = set()
    bad_height = []
    n = 0
    for label, u, z, torus in right_coset_reps(p):
        m = rep_matrix(u, z, torus, p)
        n += 1
        if gamma_exponent(m, p) != 1:
            bad_height.append(label)
        if check_distinct:
            seen.add(lattice_key(m, p))
    return {
        "count": n,
        "expected": total_count(p),
        "height_ok": not bad_height,
        "distinct": len(seen) == n if check_distinct else None,
    }


# -- the convolution, by valuation classes ------------------------------------------------


def _n_y(n, m):
    """#{y mod varpi : y ((t2/t1) y + t1) = 0 mod varpi} for t1 = varpi^n, t2 = varpi^m."""
    c1, c2 = n > 0, (m - n) > 0
    if c1 and c2:
        return None  # all q classes
    if not c1 and not c2:
        return 2
    return 1


def _f_nontoral_class(n, m, d_val, bp1):
    return f_value(GroupElementNF(n, m, d_val, bp1)).value


def convolve_indicator_symbolic(n, m):
    """(F * 1_{K omega1(varpi) K})(t) for t = h_alpha(varpi^n) h_beta(varpi^m), symbolic in q."""
    q = mono(q=1)

    def F(a, b):
        return f_value(GroupElementNF.toral(a, b)).value

    def psi_factor(v, value):
        if value.is_zero():
            return value
        s = _psi_residue_sum_sym(v)
        return value * s

    total = RationalFunc()
    # -omega
    total = total + F(n - 1, m - 2)
    # omega: r1, r4 in Y, r5 in Z, psi((t2/t1) r2 + t1 r3) over r2, r3 in Y
    term = F(n + 1, m + 2) * mono(q=4)
    term = psi_factor(m - n, term)
    term = psi_factor(n, term)
    total = total + term
    # -alpha-beta
    total = total + F(n - 1, m - 1) * mono(q=1)
    # -beta with x_alpha(z): x_alpha moves to x_alpha(z / alpha(h)), alpha(h) = varpi
    total = total + _z_sum_sym(n, m - 1) * mono(q=1)
    # beta: r1 in Z, r5 in Y, psi over r2
    total = total + psi_factor(m - n, F(n, m + 1) * mono(q=3))
    # alpha+beta with x_alpha(z): r4 in Z, r5 in Y, psi over r3
    total = total + psi_factor(n, _z_sum_sym(n + 1, m + 1) * mono(q=3))
    # identity class: (q^2 N_y - 1) F(t)
    f0 = F(n, m)
    if not f0.is_zero():
        ny = _n_y(n, m)
        ny_poly = q if ny is None else mono(coeff=ny)
        total = total + f0 * (mono(q=2) * ny_poly - ONE)
    return total


def _psi_residue_sum_sym(v):
    if v >= 0:
        return RationalFunc(mono(q=1))
    if v == -1:
        return RationalFunc()
    raise ValueError("character sum over representatives depends on the choice")


def _z_sum_sym(n, m):
    total = f_value(GroupElementNF.toral(n, m)).value
    if 2 * n - m - 1 == 0:
        total = total + _f_nontoral_class(n, m, -1, 10 ** 6)
        total = total + _f_nontoral_class(n, m, -1, 0) * RationalFunc(mono(q=1) - mono(coeff=2))
    else:
        total = total + _f_nontoral_class(n, m, -1, 0) * RationalFunc(mono(q=1) - ONE)
    return total


# -- the convolution, representative by representative ------------------------------------


def padic_frac(x, p):
    """(j, K) with the p-fractional part of x equal to j / p^K."""
    x = Fraction(x)
    v = vp(x, p)
    if v is None or v >= 0:
        return 0, 0
    K = -v
    mod = p ** K
    num = x.numerator
    den = x.denominator // mod
    return (num * pow(den, -1, mod)) % mod, K


def decompose_row0(t, rep_u, z, torus, p):
    """Write t b' = u'' h x_alpha(D) using row 0 of its image; returns (h valuations, D, r2'', r3'')."""
    t1, t2 = Fraction(p) ** t[0], Fraction(p) ** t[1]
    dt = torus_diagonal(t1, t2)
    row = [x * dt[0] for x in iota_unipotent(rep_u)[0]]
    if z:
        xa = iota_x_alpha(z)
        row = [sum(row[k] * xa[k][j] for k in range(7)) for j in range(7)]
    di = torus_diagonal(Fraction(p) ** torus[0], Fraction(p) ** torus[1])
    row = [x * di[j] for j, x in enumerate(row)]
    h = [dt[j] * di[j] for j in range(7)]
    D = row[1] / row[0]
    r2 = row[2] / h[2]
    r3 = (row[3] + D * row[2]) / h[3]
    return h, D, r2, r3


def _nf_of(h, D, p):
    t1 = h[0]
    t2 = h[0] * h[1]
    if D == 0 or vp(D, p) >= 0:
        return GroupElementNF.toral(vp(t1, p), vp(t2, p))
    return GroupElementNF.from_values(t1, t2, D, p)


def _frac_mpq(x, p):
    """padic_frac for an mpq."""
    den = x.denominator
    if den == 1:
        return 0, 0
    rest, K = gmpy2.remove(den, p)
    if K == 0:
        return 0, 0
    mod = p ** K
    return int((x.numerator * gmpy2.invert(rest, mod)) % mod), K


def class_masses(t, p):
    """Group the t b'_i by the normal form F sees and the residue of r2'' + r3''.

    Row 0 of iota(u(r) x_alpha(z)) starts [1, z, r2, r3 - z r2], so with the
    torus parts fixed r2'' + r3'' is linear in (r2, r3); the coefficients and
    the normal form depend only on (torus, z) and are computed once each.
    """
    P = Fraction(p)
    dt = torus_diagonal(P ** t[0], P ** t[1])
    prep = {}
    classes = {}
    for label, u, z, torus in right_coset_reps(p):
        pre = prep.get((torus, z))
        if pre is None:
            di = torus_diagonal(P ** torus[0], P ** torus[1])
            h = [dt[j] * di[j] for j in range(7)]
            zz = z or 0
            D = zz * di[1] / di[0]
            nf = _nf_of(h, D, p)
            key = (nf.n, nf.m, f_pi(nf) if nf.n >= 0 else 0, nf.is_toral())
            c2 = dt[0] / dt[2] + dt[0] * (D * di[2] - zz * di[3]) / h[3]
            c3 = dt[0] * di[3] / h[3]
            pre = (key, nf, mpq(c2), mpq(c3))
            prep[(torus, z)] = pre
        key, nf, c2, c3 = pre
        jk = _frac_mpq(c2 * mpq(u.r2) + c3 * mpq(u.r3), p)
        slot = classes.setdefault(key, {"nf": nf, "masses": {}})
        slot["masses"][jk] = slot["masses"].get(jk, 0) + 1
    return classes


def convolve_indicator(t, p, classes=None):
    """(F * 1_{K omega1 K})(t) at the prime p by summing F(t b'_i) over all representatives.

    Returns (exact RationalFunc with q = p, dict of class weights) where the
    character values are resolved exactly in the cyclotomic field.
    """
    classes = classes or class_masses(t, p)
    total = RationalFunc()
    summary = {}
    for key, slot in sorted(classes.items()):
        val = f_value(slot["nf"]).value
        if val.is_zero():
            continue
        weight = residue_character_sum(slot["masses"], p)
        summary[key] = weight
        if weight:
            total = total + val * weight
    return total.subs(q=Fraction(p)), summary


def residue_character_sum(masses, p):
    """Exact sum of psi over residues {(j, K): count}; rational by orthogonality."""
    K = max((k for _, k in masses), default=0)
    mod = p ** K
    lifted = {}
    for (j, k), c in masses.items():
        jj = j * p ** (K - k)
        lifted[jj] = lifted.get(jj, 0) + Fraction(c)
    return cyclotomic_value(lifted, p, mod)


def convolve_indicator_complex(t, p, s, classes=None):
    """Same sum with psi(x) = exp(2 pi i {x}_p) in floating point and F at a complex s."""
    q = float(p)
    u = q ** (-s)
    classes = classes or class_masses(t, p)
    total = 0j
    for key, slot in sorted(classes.items()):
        val = complex(f_value(slot["nf"]).value.evaluate({"q": q, "u": u}))
        if val == 0:
            continue
        chi = math.fsum(c * math.cos(2 * math.pi * j / p ** K) for (j, K), c in slot["masses"].items())
        chi_im = math.fsum(c * math.sin(2 * math.pi * j / p ** K) for (j, K), c in slot["masses"].items())
        total += val * complex(chi, chi_im)
    return total
