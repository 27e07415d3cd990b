"""The Heisenberg parabolic: unipotent coordinates, the split character, the
7-dimensional embedding, the height Gamma, and integration regions in U.

Unipotent coordinates r1..r5 belong to the roots beta, alpha+beta, 2alpha+beta,
3alpha+beta, 3alpha+2beta.  Polynomials in them are ``RPoly`` objects; regions
are lists of conditions |P(r)| <= q^e.
"""

from dataclasses import dataclass, field
from fractions import Fraction

NR = 5
R_NAMES = ("r1", "r2", "r3", "r4", "r5")


def vp(x, p):
    """p-adic valuation of a rational; None for 0."""
    x = Fraction(x)
    if x == 0:
        return None
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


class RPoly:
    """Polynomial in r1..r5 with rational coefficients."""

    __slots__ = ("t",)

    def __init__(self, terms=None):
        self.t = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    self.t[tuple(e)] = self.t.get(tuple(e), 0) + c
            self.t = {e: c for e, c in self.t.items() if c}

    @classmethod
    def const(cls, c):
        return cls({(0,) * NR: c})

    @classmethod
    def var(cls, i):
        e = [0] * NR
        e[i] = 1
        return cls({tuple(e): 1})

    def _co(self, o):
        return o if isinstance(o, RPoly) else RPoly.const(o)

    def __add__(self, o):
        o = self._co(o)
        t = dict(self.t)
        for e, c in o.t.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        out = RPoly()
        out.t = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = RPoly()
        out.t = {e: -c for e, c in self.t.items()}
        return out

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        t = {}
        for e1, c1 in self.t.items():
            for e2, c2 in o.t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        out = RPoly()
        out.t = {e: c for e, c in t.items() if c}
        return out

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def __eq__(self, o):
        return self.t == self._co(o).t

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def __bool__(self):
        return bool(self.t)

    def is_constant(self):
        return all(not any(e) for e in self.t)

    def constant(self):
        return self.t.get((0,) * NR, Fraction(0))

    def variables(self):
        return sorted({i for e in self.t for i, k in enumerate(e) if k})

    def degree_in(self, i):
        return max((e[i] for e in self.t), default=0)

    def linear_split(self, i):
        """Return (coefficient poly, rest) with self = coeff * r_i + rest; needs degree <= 1 in r_i."""
        if self.degree_in(i) > 1:
            raise ValueError("not linear in this variable")
        co, rest = {}, {}
        for e, c in self.t.items():
            if e[i]:
                e2 = list(e)
                e2[i] = 0
                co[tuple(e2)] = c
            else:
                rest[e] = c
        return RPoly(co), RPoly(rest)

    def subs(self, values):
        """Substitute numbers or RPolys for variables given as {index: value}."""
        out = RPoly()
        cache = {}
        for e, c in self.t.items():
            term = RPoly.const(c)
            e2 = list(e)
            for i, v in values.items():
                k = e[i]
                if k:
                    e2[i] = 0
                    key = (i, k)
                    if key not in cache:
                        cache[key] = _power(v, k)
                    term = term * cache[key]
            term = term * RPoly({tuple(e2): 1})
            out = out + term
        return out

    def evaluate(self, values):
        total = Fraction(0)
        for e, c in self.t.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term *= Fraction(values[i]) ** k
            total += term
        return total

    def to_json(self):
        return [[list(e), f"{c.numerator}/{c.denominator}"] for e, c in sorted(self.t.items())]

    @classmethod
    def from_json(cls, data):
        return cls({tuple(e): Fraction(c) for e, c in data})

    def __repr__(self):
        if not self.t:
            return "0"
        parts = []
        for e, c in sorted(self.t.items(), reverse=True):
            m = "*".join(R_NAMES[i] + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append((str(c) if c != 1 or not m else "") + ("*" if m and c != 1 else "") + m)
        return " + ".join(parts)


def _power(v, k):
    if isinstance(v, RPoly):
        out = RPoly.const(1)
        for _ in range(k):
            out = out * v
        return out
    return RPoly.const(Fraction(v) ** k)


R = tuple(RPoly.var(i) for i in range(NR))


@dataclass(frozen=True)
class UnipotentCoords:
    r1: object = 0
    r2: object = 0
    r3: object = 0
    r4: object = 0
    r5: object = 0

    def as_tuple(self):
        return (self.r1, self.r2, self.r3, self.r4, self.r5)

    @classmethod
    def symbolic(cls):
        return cls(*R)


def psi_split(u):
    """Argument of the split character: r2 + r3."""
    return u.r2 + u.r3


# -- the embedding into SO_7 -------------------------------------------------


def _zero():
    return Fraction(0)


def iota_unipotent(u):
    """Upper unitriangular matrix of u(r1, ..., r5)."""
    r1, r2, r3, r4, r5 = u.as_tuple()
    h = Fraction(1, 2)
    z = _zero()
    one = Fraction(1)
    return [
        [one, z, r2, r3, -r4 * h, (r2 * r3 + r5) * h, (r2 * r4 - r3 * r3) * h],
        [z, one, r1, r2, -r3 * h, (r1 * r3 - r2 * r2) * h, (r1 * r4 - 2 * r2 * r3 - r5) * h],
        [z, z, one, z, z, r3 * h, r4 * h],
        [z, z, z, one, z, -r2, -r3],
        [z, z, z, z, one, -r1, -r2],
        [z, z, z, z, z, one, z],
        [z, z, z, z, z, z, one],
    ]


def torus_diagonal(t1, t2):
    t1, t2 = Fraction(t1), Fraction(t2)
    return [t1, t2 / t1, t1 * t1 / t2, Fraction(1), t2 / (t1 * t1), t1 / t2, 1 / t1]


def iota_torus(t1, t2):
    d = torus_diagonal(t1, t2)
    return [[d[i] if i == j else Fraction(0) for j in range(7)] for i in range(7)]


def iota_x_alpha(d):
    d = Fraction(d)
    m = [[Fraction(int(i == j)) for j in range(7)] for i in range(7)]
    m[0][1] = d
    m[2][3] = -d
    m[2][4] = -d * d / 2
    m[3][4] = d
    m[5][6] = -d
    return m


def matmul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                x, y = a[i][k], b[k][j]
                if _is_zero(x) or _is_zero(y):
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(Fraction(0) if acc is None else acc)
        out.append(row)
    return out


def _is_zero(x):
    if isinstance(x, RPoly):
        return not x
    return x == 0


def transpose(a):
    return [list(r) for r in zip(*a)]


J7 = [[Fraction(int(i + j == 6)) for j in range(7)] for i in range(7)]


def iota(u=None, t=(1, 1), d=None, p=None):
    """iota(u * h_alpha(t1) h_beta(t2) * x_alpha(d)) as a 7x7 matrix."""
    if p is not None and p in (2, 3):
        raise ValueError("p = 2, 3 are excluded")
    m = iota_torus(*t)
    if u is not None:
        m = matmul(iota_unipotent(u), m)
    if d is not None:
        m = matmul(m, iota_x_alpha(d))
    return m


def preserves_form(m):
    return matmul(matmul(transpose(m), J7), m) == J7


def gamma_exponent(m, p):
    """e with Gamma = max |entry| = p^e."""
    best = None
    for row in m:
        for x in row:
            v = vp(x, p)
            if v is not None and (best is None or -v > best):
                best = -v
    return best


def gamma_height(m, p):
    return Fraction(p) ** gamma_exponent(m, p)


# -- normal forms on B_M -----------------------------------------------------


@dataclass(frozen=True)
class GroupElementNF:
    """h_alpha(t1) h_beta(t2) x_alpha(d) by valuations.

    ``d_val`` is None when d lies in O (then d is represented by 1).  When
    |b| = 1 for b = d t1^2 / t2, ``bp1_val`` is the valuation of b + 1.
    ``values`` optionally carries concrete (t1, t2, d) rationals at a prime.
    """

    n: int
    m: int
    d_val: object = None
    bp1_val: int = 0
    values: tuple = field(default=None, compare=False)
    prime: object = field(default=None, compare=False)

    @classmethod
    def toral(cls, n, m):
        return cls(n, m)

    @classmethod
    def from_values(cls, t1, t2, d, p):
        t1, t2 = Fraction(t1), Fraction(t2)
        n, m = vp(t1, p), vp(t2, p)
        if d is None or (Fraction(d) != 0 and vp(d, p) >= 0) or Fraction(d) == 0:
            return cls(n, m, None, 0, (t1, t2, None if d is None else Fraction(d)), p)
        d = Fraction(d)
        b = d * t1 * t1 / t2
        bp1 = vp(b + 1, p)
        bp1 = 10 ** 6 if bp1 is None else bp1
        return cls(n, m, vp(d, p), bp1 if vp(b, p) == 0 else 0, (t1, t2, d), p)

    def is_toral(self):
        return self.d_val is None

    def alpha_val(self):
        """Valuation of alpha(t) = t1^2 / t2."""
        return 2 * self.n - self.m

    def b_val(self):
        return self.d_val + self.alpha_val()

    def p_val(self):
        """Valuation of d^2 alpha(t) + d = d (b + 1); for d in O, d = 1."""
        if self.is_toral():
            a = self.alpha_val()
            return min(a, 0) if a != 0 else max(self.bp1_val, 0)
        bv = self.b_val()
        inner = min(bv, 0) if bv != 0 else self.bp1_val
        return self.d_val + inner

    def concrete(self, p):
        """(t1, t2, d) rationals; defaults to t1 = p^n, t2 = p^m, d = p^{d_val}."""
        if self.values is not None and (self.prime is None or self.prime == p):
            return self.values
        t1, t2 = Fraction(p) ** self.n, Fraction(p) ** self.m
        if self.is_toral():
            return (t1, t2, None)
        if self.b_val() == 0 and self.bp1_val:
            raise ValueError("need concrete values to realise v(b+1) > 0")
        return (t1, t2, Fraction(p) ** self.d_val)


def support_conditions(g, space="M0"):
    """Whether g can carry a nonzero value of a function in M0_Psi ("M0") or of F ("M").

    "M0": t1, t2/t1 integral, and for non-toral g also |p| <= 1 where
    p = d^2 alpha(t) + d; such g reduce to t.  "M": t1 integral and
    |p~ t2/t1| <= 1 with p~ = p when |p| > 1 and 1 otherwise.
    """
    if space not in ("M", "M0"):
        raise ValueError("space must be 'M' or 'M0'")
    if g.n < 0:
        return False
    if space == "M0":
        return g.m >= g.n and (g.is_toral() or g.p_val() >= 0)
    return g.m - g.n - max(-g.p_val(), 0) >= 0


def printed_support_conditions(g, space="M0", p=None):
    """The condition lists as usually stated (they miss the b = -1 mod varpi^-v(d) case).

    Necessary conditions for a function in M_Psi ("M") or M0_Psi ("M0") to be nonzero at g."""
    d_val = g.d_val if g.d_val is not None else 0
    if space == "M0":
        return g.n >= 0 and g.m - g.n >= 0 and 2 * d_val + g.n >= 0 and d_val + g.m - g.n >= 0
    if space != "M":
        raise ValueError("space must be 'M' or 'M0'")
    if g.values is not None or p is not None:
        t1, t2, d = g.concrete(p if p is not None else g.prime)
        d = Fraction(1) if d is None else d
        pp = p if p is not None else g.prime
        vals = [t1, d * t1 + t2 / t1, 2 * d * t2 / t1 + d * d * t1]
        return all(x == 0 or vp(x, pp) >= 0 for x in vals)
    # valuation-only: decide when no cancellation is possible
    if g.n < 0:
        return False
    a, b = d_val + g.n, g.m - g.n
    if a != b and min(a, b) < 0:
        return False
    c1, c2 = d_val + g.m - g.n, 2 * d_val + g.n
    if c1 != c2 and min(c1, c2) < 0:
        return False
    if (a == b and a < 0) or (c1 == c2 and c1 < 0):
        raise ValueError("valuations alone do not decide; pass concrete values")
    return True


# -- regions -----------------------------------------------------------------


@dataclass(frozen=True)
class RegionSpec:
    """Conditions |poly| <= q^e; ``empty`` marks a region excluded outright."""

    constraints: tuple
    empty: bool = False

    def with_constraints(self, extra):
        return RegionSpec(self.constraints + tuple(extra), self.empty)

    def subs(self, values):
        return RegionSpec(tuple((P.subs(values), e) for P, e in self.constraints), self.empty)

    def contains(self, r, p):
        if self.empty:
            return False
        for P, e in self.constraints:
            v = vp(P.evaluate(r), p)
            if v is not None and -v > e:
                return False
        return True

    def to_json(self):
        return {
            "empty": self.empty,
            "constraints": [{"poly": P.to_json(), "bound_exp": e} for P, e in self.constraints],
        }

    @classmethod
    def from_json(cls, data):
        cons = tuple((RPoly.from_json(c["poly"]), int(c["bound_exp"])) for c in data["constraints"])
        return cls(cons, bool(data.get("empty", False)))


def _entries_region(m, k):
    cons = []
    empty = False
    seen = set()
    for row in m:
        for x in row:
            P = x if isinstance(x, RPoly) else RPoly.const(x)
            if not P:
                continue
            key = (P, k)
            if key not in seen:
                seen.add(key)
                cons.append((P, k))
    return cons, empty


def full_region(g, k, p):
    """U_k(g) = {u : Gamma(u g) <= q^k}, read off the entries of iota(u) iota(g)."""
    t1, t2, d = g.concrete(p)
    m = matmul(iota_unipotent(UnipotentCoords.symbolic()), iota_torus(t1, t2))
    if d is not None:
        m = matmul(m, iota_x_alpha(d))
    cons, _ = _entries_region(m, k)
    return _fold_constants(cons, p)


def _fold_constants(cons, p):
    kept = []
    for P, e in cons:
        if P.is_constant():
            v = vp(P.constant(), p)
            if v is not None and -v > e:
                return RegionSpec((), True)
        else:
            kept.append((P, e))
    return RegionSpec(tuple(kept))


def _c(P, e):
    return (P, e)


def printed_toral_region(n, m, k):
    """The short list of conditions describing the reduced domain for toral t with |alpha(t)| <= 1."""
    if m > 2 * n or n < 0 or m < n:
        raise ValueError("printed toral list covers t1, t2/t1 in O with |alpha(t)| <= 1")
    if k < n:
        return RegionSpec((), True)
    r1, r2, r3, r4, r5 = R
    a, b = k + n - m, k - n
    cons = [
        _c(r2, 1), _c(r3, 1),
        _c(r1, a), _c(r2, a), _c(r3, a), _c(r2 * r3 + r5, a), _c(r1 * r3 - r2 * r2, a),
        _c(r2, b), _c(r3, b), _c(r4, b), _c(r2 * r4 - r3 * r3, b), _c(r1 * r4 - 2 * r2 * r3 - r5, b),
    ]
    return RegionSpec(tuple(cons))


def printed_nontoral_region(n, m, k, b, with_sum_bound=True):
    """Conditions for g = t x_alpha(d) with |d| > 1, |d alpha(t)| <= 1, b = d t1^2/t2."""
    if k < n:
        return RegionSpec((), True)
    b = Fraction(b)
    r1, r2, r3, r4, r5 = R
    a, c = k + n - m, k - n
    cons = [
        _c(r1, a), _c(r2, a), _c(r3, a), _c(r2 * r3 + r5, a), _c(r1 * r3 - r2 * r2, a),
        _c(b * r1 - r2, c), _c(b * r2 - r3, c), _c(b * r3 - r4, c),
        _c(r2 * r4 - r3 * r3 - b * r2 * r3 - b * r5, c),
        _c(r1 * r4 - 2 * r2 * r3 + b * r2 * r2 - b * r1 * r3 - r5, c),
    ]
    if with_sum_bound:
        cons.insert(0, _c(r2 + r3, 1))
    return RegionSpec(tuple(cons))


def region(g, k, variant="U", p=None):
    """Integration region for E_k(g).

    ``U``: the full U_k(g) from the matrix entries (needs p or concrete values).
    ``Ubar``: the printed reduced list (toral with |alpha(t)| <= 1, or non-toral with |b| < 1).
    ``Uhat``: the printed non-toral list with |r2 + r3| <= q.
    """
    if variant == "U":
        return full_region(g, k, p if p is not None else g.prime)
    if variant == "Ubar":
        if g.is_toral():
            return printed_toral_region(g.n, g.m, k)
        if g.b_val() <= 0:
            raise ValueError("Ubar for non-toral g needs |b| < 1")
        return printed_nontoral_region(g.n, g.m, k, _b_value(g, p), with_sum_bound=False).with_constraints(
            [_c(R[1], 1), _c(R[2], 1)]
        )
    if variant == "Uhat":
        if g.is_toral():
            raise ValueError("Uhat is the non-toral reduction")
        if g.b_val() < 0:
            raise ValueError("printed list assumes |d alpha(t)| <= 1")
        return printed_nontoral_region(g.n, g.m, k, _b_value(g, p))
    raise ValueError(f"unknown variant {variant!r}")


def _b_value(g, p):
    t1, t2, d = g.concrete(p if p is not None else g.prime)
    return d * t1 * t1 / t2


def reduction_constraints(g):
    """Extra conditions of the reduced domains: |r2|,|r3| <= q (toral) or |r2 + r3| <= q."""
    if g.is_toral():
        return [_c(R[1], 1), _c(R[2], 1)]
    return [_c(R[1] + R[2], 1)]
