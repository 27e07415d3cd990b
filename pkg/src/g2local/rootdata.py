"""Root system of G2 in the basis of simple roots (alpha short, beta long)."""

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True, order=True)
class Weight:
    """a*alpha + b*beta."""

    a: int
    b: int

    def __add__(self, other):
        return Weight(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return Weight(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return Weight(-self.a, -self.b)

    def __mul__(self, k):
        return Weight(k * self.a, k * self.b)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.a
        yield self.b


ALPHA = Weight(1, 0)
BETA = Weight(0, 1)
ZERO_WEIGHT = Weight(0, 0)
OMEGA1 = Weight(2, 1)
OMEGA2 = Weight(3, 2)
SIMPLE = {"alpha": ALPHA, "beta": BETA}

# <a*alpha + b*beta, gamma^vee> for gamma simple: rows are the coroots.
CARTAN = {"alpha": (2, -3), "beta": (-1, 2)}


def pairing(w, coroot_of):
    ca, cb = CARTAN[coroot_of]
    return ca * w.a + cb * w.b


def positive_roots():
    return [ALPHA, BETA, Weight(1, 1), Weight(2, 1), Weight(3, 1), Weight(3, 2)]


def short_positive_roots():
    return [ALPHA, Weight(1, 1), Weight(2, 1)]


def long_positive_roots():
    return [BETA, Weight(3, 1), Weight(3, 2)]


def roots():
    pos = positive_roots()
    return pos + [-r for r in pos]


def two_rho():
    total = ZERO_WEIGHT
    for r in positive_roots():
        total = total + r
    return total


def rho():
    tr = two_rho()
    return Weight(tr.a // 2, tr.b // 2)


def reflect(w, gamma):
    """Simple reflection s_gamma(w) = w - <w, gamma^vee> gamma."""
    return w - SIMPLE[gamma] * pairing(w, gamma)


@dataclass(frozen=True)
class WeylElement:
    """Integer matrix acting on (a, b) column vectors, with its length."""

    matrix: tuple
    length: int
    word: tuple = ()

    def __call__(self, w):
        (p, r), (s, t) = self.matrix
        return Weight(p * w.a + r * w.b, s * w.a + t * w.b)

    def det(self):
        (p, r), (s, t) = self.matrix
        return p * t - r * s

    def sign(self):
        return (-1) ** self.length

    def compose(self, other):
        """self o other, as an element of the group table."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        m = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return _by_matrix()[m]


def _reflection_matrix(gamma):
    ea = reflect(ALPHA, gamma)
    eb = reflect(BETA, gamma)
    return ((ea.a, eb.a), (ea.b, eb.b))


@lru_cache(maxsize=None)
def weyl_group():
    """All 12 elements, found by breadth-first search over reduced words."""
    ident = ((1, 0), (0, 1))
    gens = {g: _reflection_matrix(g) for g in ("alpha", "beta")}
    seen = {ident: WeylElement(ident, 0, ())}
    frontier = [seen[ident]]
    while frontier:
        nxt = []
        for w in frontier:
            for g, m in gens.items():
                (a, b), (c, d) = m
                (e, f), (gg, h) = w.matrix
                prod = ((a * e + b * gg, a * f + b * h), (c * e + d * gg, c * f + d * h))
                if prod not in seen:
                    el = WeylElement(prod, w.length + 1, (g,) + w.word)
                    seen[prod] = el
                    nxt.append(el)
        frontier = nxt
    return tuple(sorted(seen.values(), key=lambda w: (w.length, w.word)))


@lru_cache(maxsize=None)
def _by_matrix():
    return {w.matrix: w for w in weyl_group()}


def longest_element():
    return max(weyl_group(), key=lambda w: w.length)


def weyl_orbit(w):
    return {g(w) for g in weyl_group()}


def is_dominant(w):
    return pairing(w, "alpha") >= 0 and pairing(w, "beta") >= 0


def dominant_from_fundamental(i, j):
    """i*omega1 + j*omega2."""
    return OMEGA1 * i + OMEGA2 * j


def fundamental_coords(w):
    """(<w, alpha^vee>, <w, beta^vee>) = coordinates in the fundamental weights."""
    return pairing(w, "alpha"), pairing(w, "beta")


def stabilizer(w):
    return [g for g in weyl_group() if g(w) == w]


def poincare_coeffs(elements):
    """Coefficients of sum_{w} t^{l(w)} as a list indexed by length."""
    top = max(e.length for e in elements)
    out = [0] * (top + 1)
    for e in elements:
        out[e.length] += 1
    return out
