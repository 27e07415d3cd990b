"""Brute-force p-adic integration over regions in U.

A region is a list of conditions |P(r)| <= q^e.  Variables are cut into cells
varpi^{-a} O / varpi^{b} O; the window (a, b) is derived from the conditions so
that membership is constant on each cell.  A variable entering every condition
linearly with a constant coefficient is integrated out exactly (intersection
of balls).  The last two enumerated variables are scanned as a numpy grid.
"""

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .heisenberg import (
    NR,
    R,
    GroupElementNF,
    RegionSpec,
    RPoly,
    full_region,
    printed_nontoral_region,
    printed_toral_region,
    reduction_constraints,
    vp,
)

DEFAULT_BUDGET = 4 * 10 ** 8
INT64_SAFE = 3 * 10 ** 9


class BudgetExceeded(RuntimeError):
    pass


def budget():
    env = os.environ.get("G2LOCAL_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class PAdicApprox:
    """A rational known modulo p^precision."""

    value: Fraction
    precision: int
    p: int

    def valuation(self):
        v = vp(self.value, self.p)
        if v is None or v >= self.precision:
            return None
        return v

    def __add__(self, o):
        return PAdicApprox(self.value + o.value, min(self.precision, o.precision), self.p)

    def __mul__(self, o):
        va = vp(self.value, self.p)
        vb = vp(o.value, self.p)
        va = self.precision if va is None else va
        vb = o.precision if vb is None else vb
        return PAdicApprox(self.value * o.value, min(self.precision + vb, o.precision + va), self.p)


@dataclass(frozen=True)
class EnumWindow:
    """|r| <= q^a, known modulo varpi^b."""

    a: int
    b: int

    def cells(self, p):
        return p ** (self.a + self.b)

    def values(self, p):
        step = Fraction(1, p ** self.a)
        return [i * step for i in range(self.cells(p))]


@dataclass
class IntegrationResult:
    """Mass per residue of the weight (or a single total), plus bookkeeping."""

    masses: dict
    modulus: int
    cells: int

    @property
    def total(self):
        return sum(self.masses.values(), Fraction(0))

    def character_sum(self, p):
        return cyclotomic_value(self.masses, p, self.modulus)

    def character_sum_complex(self, dps=40):
        """Floating-point value of sum w_j exp(-2 pi i j / modulus).

        Masses reach q^8 and cancel almost completely, so the sum is taken in
        ``dps`` decimal digits before rounding to a Python complex.
        """
        n = self.modulus
        with mpmath.workdps(dps):
            tot = mpmath.mpc(0)
            for j, w in self.masses.items():
                w = Fraction(w)
                tot += mpmath.mpf(w.numerator) / w.denominator * mpmath.expjpi(mpmath.mpf(-2 * j) / n)
            return complex(tot)


def cyclotomic_value(masses, p, modulus):
    """Exact sum of w_j * zeta^{-j} (zeta of order ``modulus`` = p^K).

    Reduces to the power basis 1, zeta, ..., zeta^{phi-1}; returns the rational
    value, or raises if the sum is not rational.
    """
    if modulus == 1:
        return sum(masses.values(), Fraction(0))
    K = round(math.log(modulus, p))
    if p ** K != modulus:
        raise ValueError("modulus must be a power of p")
    half = p ** (K - 1)
    phi = (p - 1) * half
    coeffs = {}
    for j, w in masses.items():
        e = (-j) % modulus
        if e < phi:
            coeffs[e] = coeffs.get(e, 0) + w
        else:
            r = e - phi
            for i in range(p - 1):
                key = r + i * half
                coeffs[key] = coeffs.get(key, 0) - w
    rest = {e: c for e, c in coeffs.items() if e and c}
    if rest:
        raise ArithmeticError("character sum is not rational")
    return Fraction(coeffs.get(0, 0))


# -- constraint manipulation -------------------------------------------------


def _fold(cons, p):
    kept = []
    for P, e in cons:
        if P.is_constant():
            v = vp(P.constant(), p)
            if v is not None and -v > e:
                return None
        else:
            kept.append((P, e))
    return kept


def _eliminable(cons, j):
    hits = [(P, e) for P, e in cons if j in P.variables()]
    if not hits:
        return False
    for P, _ in hits:
        if P.degree_in(j) != 1:
            return False
        co, _ = P.linear_split(j)
        if not co.is_constant():
            return False
    return True


def _eliminate(cons, j, p):
    """Integrate r_j out; returns (new constraints, log_p of the fiber measure)."""
    hits, others = [], []
    for P, e in cons:
        (hits if j in P.variables() else others).append((P, e))
    balls = []
    for P, e in hits:
        co, rest = P.linear_split(j)
        c = co.constant()
        # |c r + rest| <= q^e  <=>  |r + rest/c| <= q^{e + v(c)}
        balls.append((rest * (1 / c), e + vp(c, p)))
    balls.sort(key=lambda b: b[1])
    center, rad = balls[0]
    derived = [(ctr - center, r) for ctr, r in balls[1:]]
    return others + derived, rad


def _propagate_bounds(cons, variables, p, preset=None):
    bounds = dict(preset or {})
    for _ in range(64):
        changed = False
        for P, e in cons:
            for j in P.variables():
                pure, rest = [], []
                for ex, c in P.t.items():
                    if ex[j] and all(k == 0 for i, k in enumerate(ex) if i != j):
                        pure.append((ex[j], c))
                    else:
                        rest.append((ex, c))
                if len(pure) != 1:
                    continue
                deg, c = pure[0]
                top = e
                ok = True
                for ex, cc in rest:
                    s = -vp(cc, p)
                    for i, k in enumerate(ex):
                        if k:
                            if i not in bounds:
                                ok = False
                                break
                            s += k * bounds[i]
                    if not ok:
                        break
                    top = max(top, s)
                if not ok:
                    continue
                a = (top + vp(c, p)) // deg
                if j not in bounds or a < bounds[j]:
                    bounds[j] = a
                    changed = True
        if not changed:
            break
    missing = [j for j in variables if j not in bounds]
    if missing:
        raise ValueError(f"region is unbounded in r{missing[0] + 1}")
    return bounds


def _precisions(cons, bounds, p, weight_vars):
    prec = {j: -bounds[j] for j in bounds}
    for j, c in weight_vars.items():
        prec[j] = max(prec[j], -vp(c, p))
    for P, e in cons:
        for ex, c in P.t.items():
            tot = -vp(c, p) + sum(k * bounds[i] for i, k in enumerate(ex) if k)
            for j, k in enumerate(ex):
                if k:
                    prec[j] = max(prec[j], tot - bounds[j] - e)
                    if k >= 2:
                        prec[j] = max(prec[j], _ceil_half(-vp(c, p) - e))
    return prec


def _ceil_half(x):
    return -((-x) // 2)


def _smith_basis(rows, n, p):
    """Basis B of {r : A r in O^R} for a full-column-rank A over Q (as a local ring at p).

    Row and column operations with p-integral multipliers give P A Q =
    diag(a_1..a_n) stacked on zeros; then r = Q diag(1/a) s with s in O^n.
    Returns (B as list of columns, log_q of the lattice volume), or None
    when A does not have full column rank.
    """
    A = [list(r) for r in rows]
    Q = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R = len(A)
    diag = []
    for t in range(n):
        best = None
        for i in range(t, R):
            for j in range(t, n):
                v = vp(A[i][j], p)
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            return None
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in Q:
            row[t], row[j] = row[j], row[t]
        piv = A[t][t]
        for i in range(t + 1, R):
            f = A[i][t] / piv
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[t])]
        for j in range(t + 1, n):
            f = A[t][j] / piv
            if f:
                for row in A:
                    row[j] -= f * row[t]
                for row in Q:
                    row[j] -= f * row[t]
        diag.append(piv)
    B = [[Q[i][k] / diag[k] for i in range(n)] for k in range(n)]
    return B, sum(vp(d, p) for d in diag)


def _lattice_transform(cons, weight, p, skip=()):
    """Replace the variables cut out by homogeneous linear constraints with lattice coordinates.

    Returns (constraints, weight, preset bounds, log_q volume factor).
    """
    lin, other = [], []
    for P, e in cons:
        homog = all(sum(ex) == 1 for ex in P.t) and not (set(P.variables()) & set(skip))
        (lin if homog else other).append((P, e))
    if not lin:
        return cons, weight, {}, 0
    V = sorted({j for P, _ in lin for j in P.variables()})
    rows = []
    for P, e in lin:
        scale = Fraction(p) ** e
        row = [Fraction(0)] * len(V)
        for ex, c in P.t.items():
            row[V.index(ex.index(1))] = c * scale
        rows.append(row)
    res = _smith_basis(rows, len(V), p)
    if res is None:
        return cons, weight, {}, 0
    B, log_vol = res
    sub = {}
    for a, j in enumerate(V):
        expr = RPoly()
        for k, col in enumerate(B):
            if col[a]:
                expr = expr + RPoly.var(V[k]) * col[a]
        sub[j] = expr
    new = [(P.subs(sub), e) for P, e in other]
    w2 = {}
    for j, c in weight.items():
        if j in sub:
            for ex, cc in sub[j].t.items():
                k = ex.index(1)
                w2[k] = w2.get(k, 0) + c * cc
        else:
            w2[j] = w2.get(j, 0) + c
    w2 = {j: c for j, c in w2.items() if c}
    return new, w2, {j: 0 for j in V}, log_vol


def _drop_implied(cons, preset, p):
    """Drop constraints that hold identically once the preset variables lie in O."""
    out = []
    for P, e in cons:
        if set(P.variables()) <= set(preset) and all(vp(c, p) >= -e for c in P.t.values()):
            continue
        out.append((P, e))
    return out


def _prepare(spec, p, weight, fixed, keep, reduce=True):
    """Fold, integrate out linear variables, pass to lattice coordinates.

    Returns None for an empty region, else (cons, weight, preset, log_measure, present).
    """
    weight = {j: Fraction(c) for j, c in (weight or {}).items()}
    if spec.empty:
        return None
    cons = list(spec.constraints)
    if fixed:
        cons = [(P.subs(fixed), e) for P, e in cons]
    cons = _fold(cons, p)
    if cons is None:
        return None
    present = sorted({j for P, _ in cons for j in P.variables()} | set(weight))
    log_measure = 0
    preset = {}
    if reduce:
        order = [4, 3, 0, 2, 1]
        progress = True
        while progress:
            progress = False
            for j in order:
                if j in weight or j in keep or j not in present:
                    continue
                if _eliminable(cons, j):
                    cons, rad = _eliminate(cons, j, p)
                    log_measure += rad
                    present.remove(j)
                    cons = _fold(cons, p)
                    if cons is None:
                        return None
                    progress = True
                    break
        cons, weight, preset, lat = _lattice_transform(cons, weight, p, skip=keep)
        log_measure += lat
        cons = _fold(_drop_implied(cons, preset, p), p)
        if cons is None:
            return None
    remaining = sorted({j for P, _ in cons for j in P.variables()} | set(weight))
    lost = [j for j in present if j not in remaining and j not in preset]
    if lost:
        raise ValueError(f"region is unbounded in r{lost[0] + 1}")
    return cons, weight, {j: preset[j] for j in remaining if j in preset}, log_measure, remaining


def _weight_key(weight, point, p):
    w = sum((c * point[j] for j, c in weight.items()), Fraction(0))
    return _frac_key(w, p)


def _lift(masses, p):
    K = max((kk for _, kk in masses), default=0)
    lifted = {}
    for (jj, kk), m in masses.items():
        key = jj * p ** (K - kk)
        lifted[key] = lifted.get(key, 0) + m
    return lifted, p ** K


# -- the scan ----------------------------------------------------------------


class _Compiled:
    """A constraint split as sum over inner exponents of (outer polynomial) * inner monomial."""

    def __init__(self, P, e, inner):
        self.e = e
        self.groups = {}
        for ex, c in P.t.items():
            key = tuple(ex[i] for i in inner)
            outer = tuple(k if i not in inner else 0 for i, k in enumerate(ex))
            self.groups.setdefault(key, []).append((outer, c))
        self.vars = set(P.variables())

    def coeffs(self, point):
        out = {}
        for key, terms in self.groups.items():
            acc = Fraction(0)
            for outer, c in terms:
                t = c
                for i, k in enumerate(outer):
                    if k:
                        t *= point[i] ** k
                acc += t
            if acc:
                out[key] = acc
        return out


def _residues(values, modulus):
    """values (Python ints) mod modulus as an int64 array (or object when too big)."""
    if modulus <= INT64_SAFE:
        return np.array([v % modulus for v in values], dtype=np.int64)
    return np.array([v % modulus for v in values], dtype=object)


def _mask_for(coeffs, e, inner_windows, grids, p):
    """Boolean mask of the inner grid where |sum coeffs * y^u| <= q^e."""
    scaled = {}
    for key, c in coeffs.items():
        sh = sum(k * w.a for k, w in zip(key, inner_windows))
        scaled[key] = c / Fraction(p) ** sh
    if not scaled:
        return None
    lcm = 1
    for c in scaled.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    N = vp(lcm, p) - e
    if N <= 0:
        return None
    mod = p ** N
    mask = None
    acc = None
    for key, c in scaled.items():
        coef = int(c * lcm) % mod
        if coef == 0:
            continue
        term = None
        for idx, k in enumerate(key):
            for _ in range(k):
                g = grids[idx] % mod
                term = g if term is None else (term * g) % mod
        if term is None:
            term = coef
        else:
            term = (term * coef) % mod
        acc = term if acc is None else (acc + term) % mod
    if acc is None:
        return None
    mask = np.asarray(acc == 0)
    return mask


def integrate(spec, p, weight=None, fixed=None, keep=(), max_evals=None, reduce=True):
    """Measure of a region, optionally split by the residue of a linear weight.

    ``weight`` is a dict {var index: rational coefficient}; the result's masses
    are keyed by j with (weight mod O) = j / modulus.  ``reduce`` turns on the
    exact elimination and lattice change of variables before the scan.
    """
    if p in (2, 3):
        raise ValueError("p = 2, 3 are excluded")
    max_evals = budget() if max_evals is None else max_evals
    prep = _prepare(spec, p, weight, fixed, keep, reduce)
    if prep is None:
        return IntegrationResult({}, 1, 0)
    cons, weight, preset, log_measure, remaining = prep
    if not remaining:
        return IntegrationResult({0: Fraction(p) ** log_measure}, 1, 1)
    bounds = _propagate_bounds(cons, remaining, p, preset)
    prec = _precisions(cons, bounds, p, weight)
    windows = {j: EnumWindow(bounds[j], max(prec[j], -bounds[j])) for j in remaining}
    non_weight = sorted((j for j in remaining if j not in weight), key=lambda j: windows[j].cells(p))
    inner = non_weight[-2:]
    outer = [j for j in remaining if j not in inner]
    outer.sort(key=lambda j: (j not in weight, windows[j].cells(p)))
    n_outer = 1
    for j in outer:
        n_outer *= windows[j].cells(p)
    n_inner = 1
    for j in inner:
        n_inner *= windows[j].cells(p)
    if n_outer * n_inner * max(len(cons), 1) > max_evals:
        raise BudgetExceeded(
            f"scan of {n_outer} x {n_inner} cells exceeds the budget of {max_evals} evaluations"
        )
    cell_log = -sum(windows[j].b for j in remaining)
    compiled = [_Compiled(P, e, inner) for P, e in cons]
    # level at which a constraint without inner variables can be checked
    check_at = {}
    for idx, cc in enumerate(compiled):
        if not (cc.vars & set(inner)):
            lvl = max((outer.index(j) for j in cc.vars), default=-1)
            check_at.setdefault(lvl, []).append(idx)
    mixed = [cc for cc in compiled if cc.vars & set(inner)]
    inner_w = [windows[j] for j in inner]
    base = [np.arange(w.cells(p), dtype=np.int64) if w.cells(p) <= INT64_SAFE else None for w in inner_w]
    if any(b is None for b in base):
        raise BudgetExceeded("inner window too large")
    counts = {}
    outer_values = [windows[j].values(p) for j in outer]

    def walk(level, point):
        for idx in check_at.get(level - 1, []):
            cc = compiled[idx]
            val = sum(cc.coeffs(point).values(), Fraction(0)) if cc.groups else Fraction(0)
            v = vp(val, p)
            if v is not None and -v > cc.e:
                return
        if level == len(outer):
            c = _scan_impl(point)
            if c:
                key = _weight_key(weight, point, p) if weight else (0, 0)
                counts[key] = counts.get(key, 0) + c
            return
        j = outer[level]
        for v in outer_values[level]:
            point[j] = v
            walk(level + 1, point)
        point.pop(j, None)

    def _scan_impl(point):
        if not inner:
            return 1
        masks1 = [np.ones(w.cells(p), dtype=bool) for w in inner_w]
        two = []
        for cc in mixed:
            co = cc.coeffs(point)
            if not co:
                continue
            zero_key = tuple(0 for _ in inner)
            if all(key == zero_key for key in co):
                vv = vp(co[zero_key], p)
                if vv is not None and -vv > cc.e:
                    return 0
                continue
            used = [any(key[i] for key in co) for i in range(len(inner))]
            if sum(used) == 1:
                i = used.index(True)
                grids = [None] * len(inner)
                grids[i] = base[i]
                m = _mask_for(co, cc.e, inner_w, grids, p)
                if m is not None:
                    masks1[i] &= m
            else:
                two.append((co, cc.e))
        idx = [np.nonzero(m)[0] for m in masks1]
        if any(len(ix) == 0 for ix in idx):
            return 0
        if len(inner) == 1 or not two:
            tot = 1
            for ix in idx:
                tot *= len(ix)
            return tot
        gi = idx[0][:, None]
        gj = idx[1][None, :]
        mask = np.ones((len(idx[0]), len(idx[1])), dtype=bool)
        for co, e in two:
            m = _mask_for(co, e, inner_w, [gi, gj], p)
            if m is not None:
                mask &= m
        return int(mask.sum())

    walk(0, {})
    scale = Fraction(p) ** (log_measure + cell_log)
    masses, modulus = _lift({k: c * scale for k, c in counts.items()}, p)
    return IntegrationResult(masses, modulus, n_outer * n_inner)


# -- adaptive refinement ------------------------------------------------------
#
# A second, independent engine.  A box is prod_j (c_j + varpi^{k_j} O).  On a
# box, P = P(c) + (terms each carrying some varpi^{k_j} s_j); if the constant
# term decides |P| <= q^e against a lower bound for the rest, the box is kept
# or dropped whole, otherwise the coarsest undecided variable is split.


def _rest_valuation(P, center, k, p):
    """(lower bound for v(P(c + varpi^k s) - P(c)) over s in O^n, variables moving in a worst term)."""
    best, movers = None, ()
    for ex, coef in P.t.items():
        base = vp(coef, p)
        opts = []
        for j, e in enumerate(ex):
            if not e:
                continue
            vc = vp(center.get(j, 0), p)
            choices = []
            for l in range(e + 1):
                if l < e and vc is None:
                    continue
                vb = vp(Fraction(math.comb(e, l)), p)
                choices.append((j, l, vb + (e - l) * (vc or 0) + l * k[j]))
            opts.append(choices)
        for combo in itertools.product(*opts):
            if not any(l for _, l, _ in combo):
                continue
            v = base + sum(x for _, _, x in combo)
            if best is None or v < best:
                best, movers = v, tuple(j for j, l, _ in combo if l)
    return best, movers


def _decide(P, e, center, k, p):
    """(True / False / None for holds, fails, undecided on the box; variables to refine)."""
    v0 = vp(P.evaluate(center), p)
    vr, movers = _rest_valuation(P, center, k, p)
    if vr is None or vr >= -e:
        if v0 is None or v0 >= -e:
            return True, ()
        if vr is None or vr > v0:
            return False, ()
        return None, movers
    if v0 is not None and v0 < -e and vr > v0:
        return False, ()
    return None, movers


def integrate_adaptive(spec, p, weight=None, fixed=None, max_boxes=None, reduce=True):
    """Same contract as ``integrate`` by recursive box refinement (no grids)."""
    if p in (2, 3):
        raise ValueError("p = 2, 3 are excluded")
    max_boxes = budget() // 100 if max_boxes is None else max_boxes
    prep = _prepare(spec, p, weight, fixed, (), reduce)
    if prep is None:
        return IntegrationResult({}, 1, 0)
    cons, weight, preset, log_measure, present = prep
    if not present:
        return IntegrationResult({0: Fraction(p) ** log_measure}, 1, 1)
    bounds = _propagate_bounds(cons, present, p, preset)
    masses = {}
    boxes = 0
    stack = [({j: Fraction(0) for j in present}, {j: -bounds[j] for j in present}, cons)]
    while stack:
        center, k, live = stack.pop()
        boxes += 1
        if boxes > max_boxes:
            raise BudgetExceeded(f"adaptive refinement exceeds {max_boxes} boxes")
        pending = []
        movers = set()
        dead = False
        for P, e in live:
            d, mv = _decide(P, e, center, k, p)
            if d is False:
                dead = True
                break
            if d is None:
                pending.append((P, e))
                movers.update(mv)
        if dead:
            continue
        if not pending:
            if any(vp(c, p) + k[j] < 0 for j, c in weight.items()):
                continue  # psi integrates to zero over the box
            w = sum((c * center[j] for j, c in weight.items()), Fraction(0))
            key = _frac_key(w, p)
            vol = Fraction(p) ** (log_measure - sum(k.values()))
            masses[key] = masses.get(key, 0) + vol
            continue
        j = min(movers, key=lambda i: (k[i], i))
        step = Fraction(p) ** k[j]
        for i in range(p):
            c2 = dict(center)
            c2[j] = center[j] + i * step
            k2 = dict(k)
            k2[j] = k[j] + 1
            stack.append((c2, k2, pending))
    lifted, modulus = _lift(masses, p)
    return IntegrationResult(lifted, modulus, boxes)


def _frac_key(w, p):
    v = vp(w, p)
    if v is None or v >= 0:
        return 0, 0
    mod = p ** (-v)
    return (w.numerator * pow(w.denominator // mod, -1, mod)) % mod, -v


def region_measure(spec, p, fixed=None, max_evals=None):
    return integrate(spec, p, fixed=fixed, max_evals=max_evals).total


def measuring_lemma(q, a, b, c):
    """vol{|x| <= q^a, |y| <= q^b, |xy| <= q^c} for c <= a + b."""
    if c > a + b:
        raise ValueError("formula needs c <= a + b")
    q = Fraction(q)
    return q ** c * (1 + (a + b - c) * (1 - 1 / q))


def measuring_lemma_check(p, a, b, c, engine="adaptive"):
    """(enumerated volume, closed form); ``engine`` is "adaptive" or "grid"."""
    x, y = R[0], R[3]
    spec = RegionSpec(((x, a), (y, b), (x * y, c)))
    if engine == "grid":
        got = region_measure(spec, p)
    else:
        got = integrate_adaptive(spec, p).total
    return got, measuring_lemma(p, a, b, c)


# -- E_k(g) ------------------------------------------------------------------


FIBERS = {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}


def _printed_region(g, k, p):
    t1, t2, d = g.concrete(p)
    if g.is_toral():
        return printed_toral_region(g.n, g.m, k)
    b = d * t1 * t1 / t2
    return printed_nontoral_region(g.n, g.m, k, b, with_sum_bound=False)


def fiber_volumes(g, k, p, source="printed", max_evals=None):
    """Volumes of the fibers over r2, r3 in {0, varpi^{-1}} of the region for E_k(g).

    ``source="printed"`` uses the short printed lists; ``"full"`` uses U_k(g)
    itself.  Keys follow (|r2|, |r3|) = (q^i, q^j).
    """
    spec = _printed_region(g, k, p) if source == "printed" else full_region(g, k, p)
    inv = Fraction(1, p)
    out = {}
    for key, (i, j) in FIBERS.items():
        fixed = {1: inv * i, 2: inv * j}
        out[key] = region_measure(spec, p, fixed=fixed, max_evals=max_evals)
    return out


def e_k_four_volume(g, k, p, source="printed", max_evals=None):
    m = fiber_volumes(g, k, p, source=source, max_evals=max_evals)
    return m["00"] - m["01"] - m["10"] + m["11"], m


def e_k_direct(g, k, p, reduced=True, max_evals=None):
    """Integral of psi-bar(r2 + r3) over U_k(g) as (exact rational, complex value).

    With ``reduced`` the domain is cut by |r2|, |r3| <= q (toral) or
    |r2 + r3| <= q (non-toral), which does not change the value.
    """
    res = _e_k_integration(g, k, p, reduced, max_evals)
    if res is None:
        return Fraction(0), 0j
    return res.character_sum(p), res.character_sum_complex()


def e_k_report(g, k, p, max_evals=None):
    """E_k(g) with bookkeeping: {value, complex, method, points_enumerated}."""
    res = _e_k_integration(g, k, p, True, max_evals)
    if res is None:
        return {"value": Fraction(0), "complex": 0j, "method": "empty region", "points_enumerated": 0}
    return {
        "value": res.character_sum(p),
        "complex": res.character_sum_complex(),
        "method": "enumeration, cyclotomic reduction",
        "points_enumerated": res.cells,
    }


def _e_k_integration(g, k, p, reduced, max_evals):
    spec = full_region(g, k, p)
    if spec.empty:
        return None
    if reduced:
        spec = spec.with_constraints(reduction_constraints(g))
    if reduced and not g.is_toral():
        # x = r2 + r3 takes the place of r2
        spec = spec.subs({1: R[1] - R[2]})
        return integrate(spec, p, weight={1: 1}, max_evals=max_evals)
    return integrate(spec, p, weight={1: 1, 2: 1}, max_evals=max_evals)


def e_k_oracle(g, k, p, paths=("direct", "four_volume"), max_evals=None):
    out = {}
    if "direct" in paths:
        exact, cx = e_k_direct(g, k, p, max_evals=max_evals)
        out["direct"] = exact
        out["direct_complex"] = cx
    if "four_volume" in paths:
        val, vols = e_k_four_volume(g, k, p, max_evals=max_evals)
        out["four_volume"] = val
        out["fiber_volumes"] = vols
    if "adaptive" in paths:
        spec = full_region(g, k, p)
        if spec.empty:
            out["adaptive"] = Fraction(0)
        else:
            out["adaptive"] = integrate_adaptive(spec, p, weight={1: 1, 2: 1}, max_boxes=max_evals).character_sum(p)
    if "unreduced" in paths:
        out["unreduced"] = e_k_direct(g, k, p, reduced=False, max_evals=max_evals)[0]
    return out


def nontoral_vanishing_oracle(g, k, p, max_evals=None):
    """E_k(g) for non-toral g with |d alpha(t)| >= 1 (or |b| = 1), computed directly."""
    return e_k_direct(g, k, p, max_evals=max_evals)[0]


def nontoral_element(n, m, d, t1=None, t2=None, p=5):
    """Convenience: g = h_alpha(t1) h_beta(t2) x_alpha(d) with defaults t1 = p^n, t2 = p^m."""
    t1 = Fraction(p) ** n if t1 is None else Fraction(t1)
    t2 = Fraction(p) ** m if t2 is None else Fraction(t2)
    return GroupElementNF.from_values(t1, t2, d, p)


# (n, m, d, t2 or None, k): non-toral g = t x_alpha(d) outside S_Psi U T K at p = 5
NONTORAL_VANISHING_CASES = (
    (2, 3, Fraction(1, 5), None, 2),  # |b| = 1, b + 1 a unit
    (2, 3, Fraction(1, 5), Fraction(250), 3),  # |b| = 1, b = 1/2
    (1, 1, Fraction(1, 5), None, 1),  # |b| = 1
    (3, 5, Fraction(1, 5), None, 4),  # |b| = 1
    (4, 6, Fraction(1, 25), None, 5),  # |b| = 1, |p| = q^2
    (2, 2, Fraction(1, 25), Fraction(25, 4), 3),  # b = -1 mod varpi only, |p| = q
    (3, 4, Fraction(1, 25), Fraction(625, 4), 5),  # same, larger t
    (3, 4, Fraction(1, 5), None, 3),  # |b| < 1
    (3, 4, Fraction(1, 5), None, 4),  # |b| < 1
    (2, 4, Fraction(1, 5), None, 3),  # |b| > 1
)


def nontoral_vanishing_cases(p=5):
    return [(nontoral_element(n, m, d, None, t2, p), k) for n, m, d, t2, k in NONTORAL_VANISHING_CASES]
