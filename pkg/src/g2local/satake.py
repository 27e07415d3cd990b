"""Characters of the dual group on the Satake torus, the standard L-factor, and P0, P1, Q.

A dual-group weight a*alpha + b*beta (in the abstract root lattice shared with
``rootdata``) is sent to the monomial x1^b * x2^a.  With this choice the
coordinates (x1, x2) are the values of the unramified character on
h_alpha(varpi) and h_beta(varpi); the seven weights of the standard
representation become 1, x2^{+-1}, (x1 x2)^{+-1}, (x1 x2^2)^{+-1}.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactalg import ONE, X1, X2, LaurentPoly, RationalFunc, local_zeta, mono
from .rootdata import (
    OMEGA1,
    ZERO_WEIGHT,
    Weight,
    is_dominant,
    positive_roots,
    rho,
    weyl_group,
)


@dataclass(frozen=True)
class SatakeParam:
    """Values of (x1, x2); ``None`` means formal."""

    x1: object = None
    x2: object = None

    @classmethod
    def formal(cls):
        return cls()

    @classmethod
    def trivial(cls):
        return cls(Fraction(1), Fraction(1))

    def is_formal(self):
        return self.x1 is None

    def values(self):
        return {"x1": self.x1, "x2": self.x2}

    def apply(self, poly):
        """Evaluate a LaurentPoly / RationalFunc in x1, x2 at this parameter."""
        if self.is_formal():
            return poly
        if isinstance(poly, LaurentPoly):
            return poly.subs(x1=self.x1, x2=self.x2)
        return poly.subs(x1=self.x1, x2=self.x2)


def weight_monomial(w):
    return mono(x1=w.b, x2=w.a)


def monomial_weight(exps):
    """Inverse of weight_monomial on exponent vectors (eq, eu, e1, e2)."""
    return Weight(exps[3], exps[2])


def torus_matrix(g):
    """Matrix of a Weyl element acting on (x1, x2) exponents."""
    (p, r), (s, t) = g.matrix
    return ((t, s), (r, p))


def act(g, f):
    """Weyl action on a Laurent polynomial or rational function in x1, x2."""
    return f.map_torus(torus_matrix(g))


def weyl_dimension(highest):
    num = Fraction(1)
    rh = rho()
    for r in positive_roots():
        num *= Fraction(_inner(highest + rh, r), _inner(rh, r))
    return num


def _inner(w, r):
    # W-invariant form on the root lattice: (alpha, alpha) = 2, (beta, beta) = 6,
    # (alpha, beta) = -3.
    return 2 * w.a * r.a - 3 * (w.a * r.b + w.b * r.a) + 6 * w.b * r.b


@lru_cache(maxsize=None)
def formal_character(highest):
    """Weyl character formula as an exact quotient in the Laurent ring."""
    if not is_dominant(highest):
        raise ValueError(f"{highest} is not dominant")
    rh = rho()
    num = LaurentPoly()
    den = LaurentPoly()
    for g in weyl_group():
        sgn = g.sign()
        num = num + weight_monomial(g(highest + rh)).scale(sgn)
        den = den + weight_monomial(g(rh)).scale(sgn)
    quot = num.exact_div(den)
    if quot is None:
        raise ArithmeticError("Weyl denominator does not divide the alternant")
    return quot


def weyl_character(highest, p=SatakeParam()):
    return p.apply(formal_character(highest))


def character_weights(highest):
    """Weight multiplicities read off from the character."""
    out = Counter()
    for exps, c in formal_character(highest).terms():
        if c.denominator != 1 or c < 0:
            raise ArithmeticError("character has a non-natural coefficient")
        out[monomial_weight(exps)] += int(c)
    return out


def std_rep_weights():
    """Weights of the 7-dimensional representation, extracted from its character."""
    weights = character_weights(OMEGA1)
    if sum(weights.values()) != 7 or weights[ZERO_WEIGHT] != 1:
        raise ArithmeticError(f"unexpected standard weights {weights}")
    for w in weights:
        if weights[-w] != weights[w]:
            raise ArithmeticError("standard weights not closed under negation")
    return sorted(weights.elements())


def std_trace(p=SatakeParam()):
    t = LaurentPoly()
    for w in std_rep_weights():
        t = t + weight_monomial(w)
    return p.apply(t)


def sym_power_trace(j, p=SatakeParam()):
    """Trace of Sym^j(st): complete homogeneous polynomial in the weight monomials."""
    if j < 0:
        raise ValueError("j must be >= 0")
    ys = [weight_monomial(w) for w in std_rep_weights()]
    # h[k] after processing the first i variables
    h = [ONE] + [LaurentPoly()] * j
    for y in ys:
        powers = [ONE]
        for _ in range(j):
            powers.append(powers[-1] * y)
        new = []
        for k in range(j + 1):
            acc = LaurentPoly()
            for t in range(k + 1):
                if h[k - t]:
                    acc = acc + powers[t] * h[k - t]
            new.append(acc)
        h = new
    return p.apply(h[j])


def l_factor(p=SatakeParam(), shift=(1, 0)):
    """1 / prod_lambda (1 - mono(lambda) q^{-d} u^c) for shift (c, d)."""
    c, d = shift
    den = RationalFunc(ONE)
    for w in std_rep_weights():
        den = den * (ONE - weight_monomial(w) * mono(q=-d, u=c))
    return p.apply(RationalFunc(ONE) / den)


def z_value():
    """z = q^{2-5s} = q^2 u^5."""
    return mono(q=2, u=5)


def p_polys(z=None):
    """(P0(z), P1(z)) with P0 = z^4/q^2 + (1/q^2 + 1/q) z^3 + z^2/q + (1/q + 1) z + 1."""
    if z is None:
        z = z_value()
    qi = mono(q=-1)
    p0 = qi * qi * z ** 4 + (qi * qi + qi) * z ** 3 + qi * z ** 2 + (qi + ONE) * z + ONE
    p1 = qi * z ** 2
    return RationalFunc(p0), RationalFunc(p1)


def q_hat(p=SatakeParam(), sign=-1):
    """(P0 + sign * P1 * tr st) / (zeta(5s-1) zeta(5s+1) zeta(5s-2)).

    ``sign=-1`` is the combination that satisfies the Macdonald identity; the
    other sign is kept so the discrepancy can be exhibited.
    """
    p0, p1 = p_polys()
    core = p0 + p1 * RationalFunc(std_trace()) * sign
    zetas = local_zeta(5, -1) * local_zeta(5, 1) * local_zeta(5, -2)
    return p.apply(core / zetas)
