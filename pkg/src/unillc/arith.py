"""Exact Laurent polynomials in u = q**(1/2) and their quotients.

Every volume, group order, formal degree and gamma value in the toolkit is a
``HalfLaurent`` or a ``RationalFunction``. Coefficients are ``Fraction`` and
exponents are plain ints, so all identities are checked exactly.

>>> u = HalfLaurent.u()
>>> (u**2 - 1) * (u**2 + 1)
HalfLaurent('u^4 - 1')
>>> ((u**2 - 1) / (u - 1)).as_laurent()
HalfLaurent('u + 1')
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce

EXP_LIMIT = 2**31 - 1


class PoleError(ZeroDivisionError):
    """Evaluation hit a zero of the denominator."""


def _check_exp(e):
    if abs(e) > EXP_LIMIT:
        raise OverflowError(f"exponent {e} outside supported range")
    return e


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient {c!r}")


class HalfLaurent:
    """Finite sum of ``c * u**k`` with rational ``c`` and integer ``k``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if isinstance(terms, str):
            terms = parse_laurent(terms)._terms
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                c = _as_fraction(c)
                if c:
                    e = _check_exp(int(e))
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def const(cls, c):
        return cls({0: c})

    @classmethod
    def monomial(cls, exp, coeff=1):
        return cls({exp: coeff})

    @classmethod
    def u(cls):
        return cls({1: 1})

    @classmethod
    def q(cls, power=1):
        return cls({2 * power: 1})

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def is_monomial(self):
        return len(self._terms) == 1

    def min_exp(self):
        return next(iter(self._terms)) if self._terms else 0

    def max_exp(self):
        return next(reversed(self._terms)) if self._terms else 0

    def leading_coeff(self):
        return self._terms[self.max_exp()] if self._terms else Fraction(0)

    def all_even(self):
        return all(e % 2 == 0 for e in self._terms)

    def degree_in_q(self):
        if not self.all_even():
            raise ValueError("odd powers of u present; not a polynomial in q")
        return self.max_exp() // 2

    def shift(self, k):
        return HalfLaurent({e + k: c for e, c in self._terms.items()})

    def substitute_power(self, m):
        """Replace u by u**m."""
        return HalfLaurent({e * m: c for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HalfLaurent.const(other)
        if isinstance(other, RationalFunction):
            return other == self
        if not isinstance(other, HalfLaurent):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, HalfLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return HalfLaurent.const(other)
        return None

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) + other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return HalfLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) - other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) * other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return HalfLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_monomial():
                (e, c), = self._terms.items()
                return HalfLaurent({e * k: c**k})
            return RationalFunction(HalfLaurent.const(1), self) ** (-k)
        result = HalfLaurent.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) / other
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        return RationalFunction(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def exact_div(self, other):
        """Quotient as a HalfLaurent; raises ValueError if not exact."""
        r = self / other
        out = r.as_laurent()
        if out is None:
            raise ValueError("division is not exact")
        return out

    def eval(self, u=None, q=None):
        return evaluate(self, u=u, q=q)

    def __repr__(self):
        return f"HalfLaurent({render(self)!r})"

    def __str__(self):
        return render(self)


# -- polynomial helpers on ascending coefficient lists (index = power) -----


def _to_poly(h):
    """Split h = u**shift * p(u) with p a polynomial with nonzero constant."""
    if h.is_zero():
        return 0, []
    lo = h.min_exp()
    hi = h.max_exp()
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for e, c in h._terms.items():
        coeffs[e - lo] = c
    return lo, coeffs


def _from_poly(coeffs, shift=0):
    return HalfLaurent({i + shift: c for i, c in enumerate(coeffs) if c})


def _trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _content(p):
    """Positive rational content: p / content is primitive over Z."""
    nums = [c.numerator for c in p if c]
    dens = [c.denominator for c in p if c]
    if not nums:
        return Fraction(1)
    g = abs(reduce(math.gcd, nums))
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
    return Fraction(g, lcm)


def _primitive(p):
    c = _content(p)
    out = [x / c for x in p]
    if out and out[-1] < 0:
        out = [-x for x in out]
    return out


def _divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(_trim(a)) >= len(b):
        k = len(a) - len(b)
        f = a[-1] / lb
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        a.pop()
    return _trim(q), a


def _gcd(a, b):
    """Primitive gcd over Q[u] with positive leading coefficient."""
    a = _primitive(_trim(list(a)))
    b = _primitive(_trim(list(b)))
    while b:
        _, r = _divmod(a, b)
        a, b = b, _primitive(r) if r else []
    return _primitive(a) if a else [Fraction(1)]


class RationalFunction:
    """Quotient of two HalfLaurents kept in a canonical reduced form.

    The denominator is stored as a polynomial in u with nonzero constant
    term, integer coprime coefficients and positive leading coefficient;
    all powers of u and scalars live in the numerator.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, numerator, denominator=None):
        if isinstance(numerator, (int, Fraction)):
            numerator = HalfLaurent.const(numerator)
        if denominator is None:
            denominator = HalfLaurent.const(1)
        elif isinstance(denominator, (int, Fraction)):
            denominator = HalfLaurent.const(denominator)
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = self._canonical(numerator, denominator)
        self._hash = None

    @staticmethod
    def _canonical(num, den):
        if num.is_zero():
            return HalfLaurent(), HalfLaurent.const(1)
        ns, np_ = _to_poly(num)
        ds, dp = _to_poly(den)
        if len(dp) > 1 and len(np_) > 1:
            g = _gcd(np_, dp)
            if len(g) > 1:
                np_, r1 = _divmod(np_, g)
                dp, r2 = _divmod(dp, g)
                assert not r1 and not r2
        scale = _content(dp)
        if dp[-1] < 0:
            scale = -scale
        dp = [c / scale for c in dp]
        np_ = [c / scale for c in np_]
        return _from_poly(np_, ns - ds), _from_poly(dp)

    @classmethod
    def from_laurent(cls, h):
        return cls(h)

    def as_laurent(self):
        """The HalfLaurent equal to self, or None if the denominator is not 1."""
        if self.den == HalfLaurent.const(1):
            return self.num
        return None

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HalfLaurent.const(other)
        if isinstance(other, HalfLaurent):
            return self.den == HalfLaurent.const(1) and self.num == other
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    @staticmethod
    def _lift(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (HalfLaurent, int, Fraction)):
            return RationalFunction(x)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("zero to a negative power")
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num**k, self.den**k)

    def eval(self, u=None, q=None):
        return evaluate(self, u=u, q=q)

    def __repr__(self):
        return f"RationalFunction({render(self)!r})"

    def __str__(self):
        return render(self)


def _sqrt_fraction(x):
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def _eval_laurent(h, u=None, q=None):
    total = Fraction(0)
    for e, c in h._terms.items():
        if u is not None:
            if u == 0 and e < 0:
                raise PoleError("negative power of u at u = 0")
            total += c * Fraction(u) ** e
        else:
            if q == 0 and e < 0:
                raise PoleError("negative power of q at q = 0")
            total += c * Fraction(q) ** (e // 2)
    return total


def evaluate(x, u=None, q=None):
    """Exact value at u (or at q = u**2 when every exponent is even)."""
    if (u is None) == (q is None):
        raise ValueError("supply exactly one of u or q")
    parts = [x] if isinstance(x, HalfLaurent) else [x.num, x.den]
    if q is not None and not all(p.all_even() for p in parts):
        root = _sqrt_fraction(q)
        if root is None:
            raise ValueError("odd powers of u need an explicit u value")
        u, q = root, None
    if isinstance(x, HalfLaurent):
        return _eval_laurent(x, u, q)
    d = _eval_laurent(x.den, u, q)
    if d == 0:
        raise PoleError("denominator vanishes at this point")
    return _eval_laurent(x.num, u, q) / d


# -- text format ------------------------------------------------------------


def _fmt_coeff(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_laurent(h, var):
    if h.is_zero():
        return "0"
    step = 2 if var == "q" else 1
    pieces = []
    for e in sorted(h._terms, reverse=True):
        c = h._terms[e]
        k = e // step
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = _fmt_coeff(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{_fmt_coeff(a)}*{mono}"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def render(x, var=None):
    """Render with descending exponents; var='q' needs all exponents even."""
    parts = [x] if isinstance(x, HalfLaurent) else [x.num, x.den]
    if var is None:
        var = "u"
    if var == "q" and not all(p.all_even() for p in parts):
        raise ValueError("q-rendering needs even exponents of u")
    if isinstance(x, HalfLaurent):
        return _render_laurent(x, var)
    if x.den == HalfLaurent.const(1):
        return _render_laurent(x.num, var)
    return f"({_render_laurent(x.num, var)})/({_render_laurent(x.den, var)})"


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?
        (?:(?P<var>[uq])(?:\^\s*(?P<exp>-?\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_laurent(text):
    """Parse ``c*u^k + ...`` (or the same with q) into a HalfLaurent."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s == "0":
        return HalfLaurent()
    terms = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {s[pos:]!r}")
        if not first and not m.group("sign"):
            raise ValueError(f"missing operator near {s[pos:]!r}")
        if m.group("coef") is None and m.group("var") is None:
            raise ValueError(f"dangling sign near {s[pos:]!r}")
        if m.group("star") and m.group("var") is None:
            raise ValueError(f"dangling '*' near {s[pos:]!r}")
        if m.group("coef") and m.group("var") and not m.group("star"):
            raise ValueError(f"missing '*' near {s[pos:]!r}")
        c = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        if m.group("var"):
            k = int(m.group("exp")) if m.group("exp") is not None else 1
            e = 2 * k if m.group("var") == "q" else k
        else:
            e = 0
        e = _check_exp(e)
        terms[e] = terms.get(e, 0) + c
        pos = m.end()
        first = False
    return HalfLaurent(terms)


def parse(text):
    """Parse a HalfLaurent or a ``(num)/(den)`` RationalFunction."""
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m:
        return RationalFunction(parse_laurent(m.group(1)), parse_laurent(m.group(2)))
    return parse_laurent(s)


def to_rational(x):
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(x)


U = HalfLaurent.u()
Q = HalfLaurent.q()
ONE = HalfLaurent.const(1)
