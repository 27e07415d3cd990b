"""Exact Laurent polynomials and rational functions in the variables q, u, x1, x2.

Here ``u`` stands for q^{-s}; ``x1`` and ``x2`` are coordinates on the dual torus.
Coefficients are exact rationals (gmpy2 ``mpq`` internally, ``Fraction`` at the
API boundary).  A rational function keeps its denominator as a multiset of
normalized factors, so sums only ever multiply by the factors that are missing.
"""

from fractions import Fraction
from numbers import Number, Rational

import gmpy2
from gmpy2 import mpq

VARS = ("q", "u", "x1", "x2")
NVARS = len(VARS)

# Exponent vectors are packed into one integer: a biased 16-bit field per
# variable, most significant first, so integer order is lex order and adding
# two packed keys (minus one bias) adds the exponent vectors.
_BITS = 16
_BIAS = 1 << 14
_MASK = (1 << _BITS) - 1
_ZERO = sum(_BIAS << (_BITS * (NVARS - 1 - i)) for i in range(NVARS))
_SHIFTS = tuple(_BITS * (NVARS - 1 - i) for i in range(NVARS))


def _pack(exps):
    key = 0
    for e, sh in zip(exps, _SHIFTS):
        if not -_BIAS < e < _BIAS:
            raise OverflowError(f"exponent {e} out of range")
        key |= (e + _BIAS) << sh
    return key


def _unpack(key):
    return tuple(((key >> sh) & _MASK) - _BIAS for sh in _SHIFTS)


def _to_mpq(c):
    if isinstance(c, type(mpq())):
        return c
    if isinstance(c, bool):
        return mpq(int(c))
    if isinstance(c, (int, Fraction)) or isinstance(c, Rational):
        return mpq(c)
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


def _as_fraction(c):
    return Fraction(int(c.numerator), int(c.denominator))


def _exps_of(spec):
    """Accept an exponent tuple or a {name: exponent} mapping."""
    if isinstance(spec, dict):
        unknown = set(spec) - set(VARS)
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
        return tuple(int(spec.get(v, 0)) for v in VARS)
    exps = tuple(int(e) for e in spec)
    if len(exps) != NVARS:
        raise ValueError(f"need {NVARS} exponents, got {len(exps)}")
    return exps


def _is_exact(value):
    return isinstance(value, (int, Fraction, type(mpq()))) or isinstance(value, Rational)


class LaurentPoly:
    """Sparse Laurent polynomial with rational coefficients.

    Immutable.  Construct from ``{exponent_tuple: coeff}`` or use the
    generators ``Q, U, X1, X2`` and ordinary arithmetic.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        t = {}
        if terms:
            for exps, c in terms.items():
                c = _to_mpq(c)
                if c:
                    k = _pack(_exps_of(exps))
                    c = t.get(k, 0) + c
                    if c:
                        t[k] = c
                    else:
                        t.pop(k, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t):
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c):
        c = _to_mpq(c)
        return cls._raw({_ZERO: c} if c else {})

    @classmethod
    def monomial(cls, exps, coeff=1):
        c = _to_mpq(coeff)
        return cls._raw({_pack(_exps_of(exps)): c} if c else {})

    # -- inspection -------------------------------------------------------

    def terms(self):
        """Sorted list of (exponent tuple, Fraction)."""
        return [(_unpack(k), _as_fraction(c)) for k, c in sorted(self._t.items())]

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self):
        return not self._t

    def is_monomial(self):
        return len(self._t) == 1

    def is_constant(self):
        return not self._t or (len(self._t) == 1 and _ZERO in self._t)

    def constant_term(self):
        return _as_fraction(self._t.get(_ZERO, mpq(0)))

    def coeff(self, exps):
        return _as_fraction(self._t.get(_pack(_exps_of(exps)), mpq(0)))

    def variables(self):
        used = set()
        for k in self._t:
            for name, e in zip(VARS, _unpack(k)):
                if e:
                    used.add(name)
        return used

    def degree_range(self, var):
        i = VARS.index(var)
        es = [_unpack(k)[i] for k in self._t]
        if not es:
            return (0, 0)
        return (min(es), max(es))

    def min_exponents(self):
        if not self._t:
            return (0,) * NVARS
        cols = list(zip(*(_unpack(k) for k in self._t)))
        return tuple(min(c) for c in cols)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if _is_exact(other):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(self._t) < len(other._t):
            a, b = other._t, self._t
        else:
            a, b = self._t, other._t
        t = dict(a)
        get = t.get
        for k, c in b.items():
            s = get(k, 0) + c
            if s:
                t[k] = s
            else:
                del t[k]
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, RationalFunc):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return LaurentPoly._raw({})
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            off = kb - _ZERO
            return LaurentPoly._raw({k + off: c * cb for k, c in a.items()})
        out = {}
        get = out.get
        for kb, cb in b.items():
            off = kb - _ZERO
            for ka, ca in a.items():
                k = ka + off
                out[k] = get(k, 0) + ca * cb
        return LaurentPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial")
            (k, c), = self._t.items()
            exps = _unpack(k)
            return LaurentPoly.monomial(tuple(-e * -n for e in exps), 1 / c ** (-n))
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly) and other.is_monomial():
            return self * other ** -1
        if _is_exact(other):
            c = _to_mpq(other)
            if not c:
                raise ZeroDivisionError("division by zero")
            return LaurentPoly._raw({k: v / c for k, v in self._t.items()})
        return RationalFunc(self) / other

    def __rtruediv__(self, other):
        return RationalFunc(LaurentPoly.const(other) if _is_exact(other) else other) / self

    def __eq__(self, other):
        if isinstance(other, RationalFunc):
            return other == self
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def scale(self, c):
        c = _to_mpq(c)
        if not c:
            return LaurentPoly._raw({})
        return LaurentPoly._raw({k: v * c for k, v in self._t.items()})

    def shift(self, exps):
        """Multiply by the monomial with the given exponent vector."""
        off = _pack(_exps_of(exps)) - _ZERO
        return LaurentPoly._raw({k + off: c for k, c in self._t.items()})

    def exact_div(self, other):
        """Return self/other if it is a Laurent polynomial, else None."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return LaurentPoly._raw({})
        bt = other._t
        if len(bt) == 1:
            return self * other ** -1
        lead_b = max(bt)
        cb = bt[lead_b]
        # Exponent ranges add under multiplication in each variable separately,
        # so an exact quotient lives in this box.
        sa = [_unpack(k) for k in self._t]
        sb = [_unpack(k) for k in bt]
        lo = [min(c) for c in zip(*sa)]
        hi = [max(c) for c in zip(*sa)]
        lo = [a - min(c) for a, c in zip(lo, zip(*sb))]
        hi = [a - max(c) for a, c in zip(hi, zip(*sb))]
        if any(a > b for a, b in zip(lo, hi)):
            return None
        rem = dict(self._t)
        quo = {}
        while rem:
            k = max(rem)
            qk = k - lead_b + _ZERO
            if not all(a <= e <= b for a, e, b in zip(lo, _unpack(qk), hi)):
                return None
            qc = rem[k] / cb
            quo[qk] = qc
            off = qk - _ZERO
            for kb, c in bt.items():
                kk = kb + off
                v = rem.get(kk, 0) - qc * c
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return LaurentPoly._raw(quo)

    # -- substitution and evaluation --------------------------------------

    def subs(self, **values):
        """Substitute exact numbers for some variables; returns a LaurentPoly."""
        idx = []
        for name, v in values.items():
            i = VARS.index(name)
            v = _to_mpq(v)
            if not v:
                raise ZeroDivisionError(f"{name}=0 is not allowed in a Laurent polynomial")
            idx.append((i, v))
        out = {}
        for k, c in self._t.items():
            exps = list(_unpack(k))
            for i, v in idx:
                e = exps[i]
                if e:
                    c = c * v ** e if e > 0 else c / v ** (-e)
                    exps[i] = 0
            kk = _pack(exps)
            s = out.get(kk, 0) + c
            if s:
                out[kk] = s
            else:
                out.pop(kk, None)
        return LaurentPoly._raw(out)

    def evaluate(self, values):
        """Evaluate at a full assignment {name: number}.

        Exact (Fraction) when every used value is rational, complex/float otherwise.
        """
        used = self.variables()
        missing = used - set(values)
        if missing:
            raise ValueError(f"missing values for {sorted(missing)}")
        exact = all(_is_exact(values[v]) for v in used)
        if exact:
            vals = [_to_mpq(values[v]) if v in used else mpq(1) for v in VARS]
            total = mpq(0)
        else:
            vals = [complex(values.get(v, 1)) for v in VARS]
            total = 0j
        cache = {}
        for k, c in self._t.items():
            term = c if exact else complex(float(c))
            for i, e in enumerate(_unpack(k)):
                if e:
                    key = (i, e)
                    p = cache.get(key)
                    if p is None:
                        p = vals[i] ** e
                        cache[key] = p
                    term = term * p
            total += term
        if exact:
            return _as_fraction(total)
        if all(isinstance(values[v], (int, float)) or _is_exact(values[v]) for v in used):
            return total.real
        return total

    def map_torus(self, matrix):
        """Apply an integer 2x2 matrix to the (x1, x2) exponent pairs."""
        (a, b), (c, d) = matrix
        out = {}
        for k, v in self._t.items():
            eq, eu, e1, e2 = _unpack(k)
            kk = _pack((eq, eu, a * e1 + b * e2, c * e1 + d * e2))
            out[kk] = out.get(kk, 0) + v
        return LaurentPoly._raw({k: v for k, v in out.items() if v})

    def split_by(self, var):
        """Return {exponent of var: LaurentPoly in the other variables}."""
        i = VARS.index(var)
        sh = _SHIFTS[i]
        out = {}
        for k, c in self._t.items():
            e = ((k >> sh) & _MASK) - _BIAS
            kk = k - (e << sh)
            out.setdefault(e, {})[kk] = c
        return {e: LaurentPoly._raw(t) for e, t in out.items()}

    # -- output -------------------------------------------------------------

    def to_json(self):
        return [[list(e), _fmt_rational(c)] for e, c in self.terms()]

    @classmethod
    def from_json(cls, data):
        return cls({tuple(e): Fraction(c) for e, c in data})

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in sorted(self.terms(), key=lambda t: t[0], reverse=True):
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(VARS, exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}" if c.denominator == 1 else f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _fmt_rational(c):
    return f"{c.numerator}/{c.denominator}"


Q = LaurentPoly.monomial((1, 0, 0, 0))
U = LaurentPoly.monomial((0, 1, 0, 0))
X1 = LaurentPoly.monomial((0, 0, 1, 0))
X2 = LaurentPoly.monomial((0, 0, 0, 1))
ONE = LaurentPoly.const(1)
ZERO = LaurentPoly.const(0)


def mono(q=0, u=0, x1=0, x2=0, coeff=1):
    return LaurentPoly.monomial((q, u, x1, x2), coeff)


def _normalize_factor(f):
    """Split f = unit * g with g having zero minimal exponents and leading coeff 1.

    Returns (unit: monomial LaurentPoly, g or None if f itself is a unit).
    """
    if not f:
        raise ZeroDivisionError("zero denominator")
    lo = f.min_exponents()
    g = f.shift(tuple(-e for e in lo))
    low_key = min(g._t)
    c = g._t[low_key]
    g = g.scale(1 / c)
    unit = LaurentPoly.monomial(lo, c)
    if g.is_constant():
        return unit, None
    return unit, g


class RationalFunc:
    """Quotient of Laurent polynomials with a factored denominator.

    ``den`` is a sorted tuple of (factor, multiplicity); each factor has
    nonnegative exponents with zero minimum in every variable and its lowest
    term has coefficient 1.  Units (monomials, constants) always live in the
    numerator.  Equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=None):
        if not isinstance(num, LaurentPoly):
            num = LaurentPoly.const(num)
        factors = {}
        if den is not None:
            if isinstance(den, RationalFunc):
                r = RationalFunc(num) / den
                self.num, self.den = r.num, r.den
                return
            if not isinstance(den, LaurentPoly):
                den = LaurentPoly.const(den)
            unit, g = _normalize_factor(den)
            num = num * unit ** -1
            if g is not None:
                factors[g] = 1
        self.num = num
        self.den = _sorted_den(factors)

    @classmethod
    def _make(cls, num, factors):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = _sorted_den(factors) if num else ()
        return obj

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RationalFunc):
            return x
        if isinstance(x, LaurentPoly):
            return cls._make(x, {})
        if _is_exact(x):
            return cls._make(LaurentPoly.const(x), {})
        raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunc")

    def den_factors(self):
        return dict(self.den)

    def denominator(self):
        d = ONE
        for f, m in self.den:
            d = d * f ** m
        return d

    def numerator(self):
        return self.num

    def is_zero(self):
        return not self.num

    def is_polynomial(self):
        return not self.den

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        try:
            other = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        da, db = dict(self.den), dict(other.den)
        lcm = dict(da)
        for f, m in db.items():
            if m > lcm.get(f, 0):
                lcm[f] = m
        na = self.num * _product({f: m - da.get(f, 0) for f, m in lcm.items()})
        nb = other.num * _product({f: m - db.get(f, 0) for f, m in lcm.items()})
        return RationalFunc._make(na + nb, lcm)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunc._make(-self.num, dict(self.den))

    def __sub__(self, other):
        try:
            other = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RationalFunc.coerce(other) + (-self)

    def __mul__(self, other):
        try:
            other = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num or not other.num:
            return RationalFunc._make(ZERO, {})
        f = dict(self.den)
        for g, m in other.den:
            f[g] = f.get(g, 0) + m
        return RationalFunc._make(self.num * other.num, f)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        unit, g = _normalize_factor(self.num)
        num = _product(dict(self.den)) * unit ** -1
        return RationalFunc._make(num, {g: 1} if g is not None else {})

    def __truediv__(self, other):
        other = RationalFunc.coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RationalFunc.coerce(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        num = base.num ** n
        return RationalFunc._make(num, {f: m * n for f, m in base.den})

    def __eq__(self, other):
        try:
            other = RationalFunc.coerce(other)
        except TypeError:
            return NotImplemented
        da, db = dict(self.den), dict(other.den)
        lcm = dict(da)
        for f, m in db.items():
            if m > lcm.get(f, 0):
                lcm[f] = m
        na = self.num * _product({f: m - da.get(f, 0) for f, m in lcm.items()})
        nb = other.num * _product({f: m - db.get(f, 0) for f, m in lcm.items()})
        return na == nb

    def __hash__(self):
        raise TypeError("RationalFunc is not hashable (equality is not structural)")

    def reduce(self):
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        left = {}
        for f, m in self.den:
            k = m
            while k:
                qt = num.exact_div(f)
                if qt is None:
                    break
                num = qt
                k -= 1
            if k:
                left[f] = k
        return RationalFunc._make(num, left)

    # -- substitution and evaluation --------------------------------------

    def subs(self, **values):
        num = self.num.subs(**values)
        factors = {}
        for f, m in self.den:
            g = f.subs(**values)
            unit, h = _normalize_factor(g)
            num = num * unit ** -m
            if h is not None:
                factors[h] = factors.get(h, 0) + m
        return RationalFunc._make(num, factors)

    def evaluate(self, values):
        n = self.num.evaluate(values)
        d = 1
        for f, m in self.den:
            v = f.evaluate(values)
            if v == 0:
                raise ZeroDivisionError("denominator vanishes at this point")
            d = d * v ** m
        return n / d

    def map_torus(self, matrix):
        num = self.num.map_torus(matrix)
        factors = {}
        for f, m in self.den:
            unit, h = _normalize_factor(f.map_torus(matrix))
            num = num * unit ** -m
            if h is not None:
                factors[h] = factors.get(h, 0) + m
        return RationalFunc._make(num, factors)

    def u_series(self, order):
        """Power series coefficients in u up to u^order (others kept symbolic).

        Requires every denominator factor to have a nonzero u-constant part
        that is a monomial in the other variables, and the numerator to have
        no negative u powers.
        """
        coeffs = _series_of_poly(self.num, order)
        for f, m in self.den:
            inv = _inverse_series(f, order)
            for _ in range(m):
                coeffs = _series_mul(coeffs, inv, order)
        return coeffs

    def to_json(self):
        return {
            "num": self.num.to_json(),
            "den": [{"factor": f.to_json(), "mult": m} for f, m in self.den],
        }

    @classmethod
    def from_json(cls, data):
        num = LaurentPoly.from_json(data["num"])
        r = RationalFunc(num)
        for item in data["den"]:
            r = r / LaurentPoly.from_json(item["factor"]) ** item["mult"]
        return r

    def __repr__(self):
        return f"RationalFunc({self})"

    def __str__(self):
        if not self.den:
            return str(self.num)
        den = " * ".join(f"({f})" + (f"^{m}" if m > 1 else "") for f, m in self.den)
        return f"({self.num}) / ({den})"


def _sorted_den(factors):
    items = [(f, m) for f, m in factors.items() if m]
    items.sort(key=lambda fm: sorted(fm[0]._t.items()))
    return tuple(items)


def _product(factors):
    out = ONE
    for f, m in factors.items():
        for _ in range(m):
            out = out * f
    return out


def _series_of_poly(p, order):
    parts = p.split_by("u")
    if parts and min(parts) < 0:
        raise ValueError("negative power of u in numerator")
    return [parts.get(j, ZERO) for j in range(order + 1)]


def _series_mul(a, b, order):
    out = [ZERO] * (order + 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(order + 1 - i):
            if b[j]:
                out[i + j] = out[i + j] + ai * b[j]
    return out


def _inverse_series(f, order):
    parts = f.split_by("u")
    if min(parts) < 0:
        raise ValueError("negative power of u in denominator factor")
    f0 = parts.get(0, ZERO)
    if not f0.is_monomial():
        raise ValueError("u-constant part of a denominator factor must be a monomial")
    inv0 = f0 ** -1
    fs = [parts.get(j, ZERO) for j in range(order + 1)]
    out = [inv0] + [ZERO] * order
    for j in range(1, order + 1):
        acc = ZERO
        for i in range(1, j + 1):
            if fs[i] and out[j - i]:
                acc = acc + fs[i] * out[j - i]
        out[j] = -(acc * inv0)
    return out


def as_rational(x):
    return RationalFunc.coerce(x)


def arith(a, b, op):
    """Apply add/sub/mul/div to two operands, returning a RationalFunc."""
    a = RationalFunc.coerce(a)
    b = RationalFunc.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def geometric_sum(ratio, k0=0):
    """Closed form of sum_{k >= k0} ratio^k, i.e. ratio^k0 / (1 - ratio)."""
    if not isinstance(ratio, LaurentPoly) or not ratio.is_monomial():
        raise ValueError("geometric_sum needs a single monomial ratio")
    if ratio.is_constant():
        raise ValueError("ratio must involve a variable to be formally contractive")
    return RationalFunc(ratio ** k0, ONE - ratio)


def local_zeta(c, d):
    """zeta(c*s + d) = 1 / (1 - q^{-d} u^c)."""
    if c == 0 and d == 0:
        raise ZeroDivisionError("zeta has a pole at 0")
    return RationalFunc(ONE, ONE - mono(q=-d, u=c))


def j_normalizer():
    """zeta(5s) zeta(5s-1)^2 zeta(10s-4)."""
    return local_zeta(5, 0) * local_zeta(5, -1) ** 2 * local_zeta(10, -4)
