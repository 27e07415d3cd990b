"""Spherical functions, double coset volumes, and the generating sum over T+.

A torus element t = h_alpha(t1) h_beta(t2) with valuations (n, m) is the
cocharacter n*alpha^vee + m*beta^vee.  Under the dual identification used in
``satake`` it corresponds to the dual weight Weight(m, n), whose monomial is
x1^n x2^m.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactalg import ONE, LaurentPoly, RationalFunc, geometric_sum, local_zeta, mono
from .rootdata import (
    Weight,
    is_dominant,
    positive_roots,
    rho,
    stabilizer,
    weyl_group,
)
from .satake import (
    SatakeParam,
    act,
    formal_character,
    l_factor,
    p_polys,
    q_hat,
    std_trace,
    weight_monomial,
)


@dataclass(frozen=True, order=True)
class TorusValuation:
    n: int
    m: int

    def weight(self):
        return Weight(self.m, self.n)

    def alpha_pairing(self):
        """<alpha, lambda> = 2n - m; |alpha(t)| = q^{m - 2n}."""
        return 2 * self.n - self.m

    def beta_pairing(self):
        return 2 * self.m - 3 * self.n

    def is_dominant(self):
        return self.alpha_pairing() >= 0 and self.beta_pairing() >= 0

    def rho_pairing(self):
        return self.n + self.m


ORIGIN = TorusValuation(0, 0)
OMEGA1_VARPI = TorusValuation(1, 2)


def dominant_cone(limit):
    """All dominant (n, m) with n <= limit."""
    out = []
    for n in range(limit + 1):
        for m in range(0, 2 * n + 1):
            t = TorusValuation(n, m)
            if t.is_dominant():
                out.append(t)
    return out


def _poincare(elements):
    """sum_w t^{l(w)} with t = q^{-1}, as a LaurentPoly in q."""
    out = LaurentPoly()
    for e in elements:
        out = out + mono(q=-e.length)
    return out


def weyl_poincare():
    return _poincare(weyl_group())


def stabilizer_poincare(t):
    return _poincare(stabilizer(t.weight()))


def _require_dominant(t):
    if not t.is_dominant():
        raise ValueError(f"{t} is not dominant")


def double_coset_volume(t):
    """|K t K / K| = q^{2<rho, lambda>} W(q^-1) / W_lambda(q^-1)."""
    _require_dominant(t)
    ratio = weyl_poincare().exact_div(stabilizer_poincare(t))
    return ratio * mono(q=2 * t.rho_pairing())


@lru_cache(maxsize=None)
def _c_formal():
    c = RationalFunc(ONE)
    for r in positive_roots():
        inv = weight_monomial(-r)
        c = c * RationalFunc(ONE - mono(q=-1) * inv, ONE - inv)
    return c


def c_function(p=SatakeParam(), w=None):
    """prod over positive coroots of (1 - q^-1 z^{-gamma}) / (1 - z^{-gamma}), twisted by w."""
    c = _c_formal()
    if w is not None:
        c = act(w, c)
    return p.apply(c)


@lru_cache(maxsize=None)
def _spherical_formal(t):
    z = RationalFunc(weight_monomial(t.weight()))
    total = RationalFunc()
    for w in weyl_group():
        total = total + act(w, z * _c_formal())
    total = total * mono(q=-t.rho_pairing()) / weyl_poincare()
    return total.reduce()


def spherical_value(p, t):
    """Macdonald's formula: q^{-<rho,lambda>} / W(q^-1) * sum_w w(z^lambda c(z))."""
    _require_dominant(t)
    return p.apply(_spherical_formal(t))


def satake_of_indicator(p, t):
    """Satake transform of the indicator of K t K: vol * spherical value."""
    return p.apply(_spherical_formal(t) * double_coset_volume(t))


def a1_identity_sides(p=SatakeParam()):
    """(q^-3 (1 + vol * omega(omega1(varpi))), tr st)."""
    lhs = (satake_of_indicator(p, OMEGA1_VARPI) + ONE) * mono(q=-3)
    return lhs, RationalFunc(std_trace(p))


# -- independent route: characters -> Hall-Littlewood polynomials --------


def q_kostant(nu, t):
    """q-analogue of Kostant's partition function for the dual positive roots.

    ``t`` is a LaurentPoly (or number); returns sum over decompositions of nu
    into positive roots of t^{number of parts}.
    """
    a, b = nu.a, nu.b
    if a < 0 or b < 0:
        return LaurentPoly()
    table = {(0, 0): ONE}
    for r in positive_roots():
        new = {}
        for i in range(a + 1):
            for j in range(b + 1):
                acc = table.get((i, j), LaurentPoly())
                prev = (i - r.a, j - r.b)
                if prev[0] >= 0 and prev[1] >= 0 and prev in new:
                    acc = acc + new[prev] * t
                if acc:
                    new[(i, j)] = acc
        table = new
    return table.get((a, b), LaurentPoly())


def kostka_foulkes(lam, mu, t):
    rh = rho()
    out = LaurentPoly()
    for w in weyl_group():
        term = q_kostant(w(lam + rh) - (mu + rh), t)
        if term:
            out = out + term.scale(w.sign())
    return out


def _dominant_below(lam):
    """Dominant mu with lam - mu a nonnegative combination of simple roots."""
    out = []
    for a in range(lam.a + 1):
        for b in range(lam.b + 1):
            mu = Weight(lam.a - a, lam.b - b)
            if is_dominant(mu):
                out.append(mu)
    return out


@lru_cache(maxsize=None)
def hall_littlewood(lam):
    """P_lam(z; q^-1) by inverting s_lam = sum_mu K_{lam,mu}(q^-1) P_mu."""
    t = mono(q=-1)
    out = formal_character(lam)
    for mu in _dominant_below(lam):
        if mu == lam:
            continue
        out = out - kostka_foulkes(lam, mu, t) * hall_littlewood(mu)
    return out


def satake_of_indicator_via_characters(p, t):
    """q^{<rho,lambda>} P_lambda(z; q^-1): uses only Weyl characters and root combinatorics."""
    _require_dominant(t)
    return p.apply(hall_littlewood(t.weight()) * mono(q=t.rho_pairing()))


# -- the sum over T+ ---------------------------------------------------------


def cone_generating_function():
    """sum over dominant lambda of X^n q^{<rho,lambda>} z^lambda / W_lambda(q^-1), X = q^-1 u^5.

    The cone is lambda = a*(2,3) + b*(1,2) in (n, m) coordinates; the origin,
    the two walls and the interior are each products of geometric series.
    """
    x = mono(q=-1, u=5)
    gen_a, gen_b = TorusValuation(2, 3), TorusValuation(1, 2)

    def step(g):
        return x ** g.n * mono(q=g.rho_pairing()) * weight_monomial(g.weight())

    ga, gb = step(gen_a), step(gen_b)
    wall = RationalFunc(ONE, ONE + mono(q=-1))
    origin = RationalFunc(ONE, weyl_poincare())
    return (
        origin
        + (geometric_sum(ga, 1) + geometric_sum(gb, 1)) * wall
        + geometric_sum(ga, 1) * geometric_sum(gb, 1)
    )


@lru_cache(maxsize=None)
def _d_hat_formal():
    inner = _c_formal() * cone_generating_function()
    total = RationalFunc()
    for w in weyl_group():
        total = total + act(w, inner)
    return total


def d_hat(p=SatakeParam()):
    """sum over T+ of q^{-(5s+1) n} vol(KtK) omega(t), in closed form."""
    return p.apply(_d_hat_formal())


def macdonald_identity_sides(p=SatakeParam(), sign=-1):
    return d_hat(p), l_factor(p, (5, -2)) * q_hat(p, sign=sign)


def d_hat_truncated(q, x1, x2, u, limit=40):
    """Direct truncated sum at a numeric point (n <= limit over the dominant cone).

    Uses the Weyl-sum form of the spherical function, so the Satake parameter
    must be regular (no root monomial equal to 1).
    """
    pt = {"q": q, "u": u, "x1": x1, "x2": x2}
    wq = weyl_poincare().evaluate(pt)
    # c(w z) evaluated once per Weyl element; then each lambda costs one monomial per w.
    cs = []
    for w in weyl_group():
        try:
            cw = act(w, _c_formal()).evaluate(pt)
        except ZeroDivisionError:
            raise ValueError("singular Satake parameter: a root monomial equals 1") from None
        cs.append((w, cw))
    x = mono(q=-1, u=5).evaluate(pt)
    total = 0
    for t in dominant_cone(limit):
        s = 0
        for w, cw in cs:
            s += cw * act(w, weight_monomial(t.weight())).evaluate(pt)
        omega = s / (q ** t.rho_pairing() * wq)
        vol = double_coset_volume(t).evaluate(pt)
        total += x ** t.n * vol * omega
    return total


# -- invertibility -----------------------------------------------------------


def a1_norm_bound(q):
    vol = double_coset_volume(OMEGA1_VARPI).evaluate({"q": q})
    return float(Fraction(1, q ** 3) * (1 + vol))


def invertibility_quantity(q, s):
    """|P1/P0|(q^{2-5s}) times the l1 bound of A1."""
    z = float(q) ** (2 - 5 * s)
    p0 = z ** 4 / q ** 2 + (1 / q ** 2 + 1 / q) * z ** 3 + z ** 2 / q + (1 / q + 1) * z + 1
    p1 = z ** 2 / q
    return abs(p1 / p0) * a1_norm_bound(q)


def invertibility_grid(lo=-4.0, hi=6.0, step=0.001):
    count = int(round((hi - lo) / step))
    return [lo + i * step for i in range(count + 1)]


def invertibility_bound(q, grid=None):
    """Largest grid point s0 where the quantity is still >= 1; beyond it, < 1.

    Returns (s0, values) with values the list of (s, quantity) on the grid.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    grid = grid or invertibility_grid()
    values = [(s, invertibility_quantity(q, s)) for s in grid]
    s0 = None
    for s, f in values:
        if f >= 1:
            s0 = s
    if s0 is None:
        s0 = grid[0]
    if math.isclose(s0, grid[-1]):
        raise ArithmeticError("bound not reached on the grid")
    return s0, values


def check_p_polys_limits(q, big_s=50.0):
    z = float(q) ** (2 - 5 * big_s)
    p0, p1 = p_polys()
    pt = {"q": Fraction(q), "u": Fraction(z)}
    return float(p0.evaluate(pt)), float(p1.evaluate(pt))
