"""Exact scalar arithmetic: arbitrary-precision rationals and Gaussian rationals.

Rationals are gmpy2.mpq values (always stored reduced, positive denominator).
GaussRat is the field Q(i), used as the coefficient field everywhere.
"""

from __future__ import annotations

import re as _re

import gmpy2

Rational = gmpy2.mpq

#: positive infinity, used as the valuation of the zero series
INF = float("inf")


def rat(x, y=None) -> Rational:
    """Build a reduced rational from ints, strings like "3/4", or another rational."""
    if y is not None:
        return gmpy2.mpq(x, y)
    if isinstance(x, str):
        return gmpy2.mpq(x.strip())
    return gmpy2.mpq(x)


def rat_str(q) -> str:
    return str(gmpy2.mpq(q))


_GR_TERM = _re.compile(
    r"""^\s*(?P<sign>[+-]?)\s*
        (?:
            (?P<coef>\d+(?:/\d+)?)\s*(?:\*\s*(?P<istar>i))?
          | (?P<ibare>i)
        )\s*""",
    _re.VERBOSE,
)


class GaussRat:
    """An exact Gaussian rational a + b*i with a, b reduced rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rat(re))
        object.__setattr__(self, "im", rat(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    # -- construction -------------------------------------------------

    @staticmethod
    def parse(s: str) -> "GaussRat":
        """Parse strings like "3/4", "-1", "i", "2+3*i", "1/2-2/3*i"."""
        re_part = rat(0)
        im_part = rat(0)
        pos = 0
        s = s.strip()
        if not s:
            raise ValueError("empty scalar string")
        while pos < len(s):
            m = _GR_TERM.match(s[pos:])
            if not m:
                raise ValueError(f"cannot parse scalar {s!r} at position {pos}")
            sign = -1 if m.group("sign") == "-" else 1
            if m.group("ibare") or m.group("istar"):
                coef = rat(m.group("coef")) if m.group("coef") else rat(1)
                im_part += sign * coef
            else:
                re_part += sign * rat(m.group("coef"))
            pos += m.end()
        return GaussRat(re_part, im_part)

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussRat):
            return other
        if isinstance(other, (int, type(rat(0)))):
            return GaussRat(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRat(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm(self):
        """re^2 + im^2 as a Rational."""
        return self.re * self.re + self.im * self.im

    def inv(self) -> "GaussRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero GaussRat")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = GR_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing ----------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- formatting ---------------------------------------------------

    def __str__(self):
        if self.im == 0:
            return rat_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{rat_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        istr = "i" if mag == 1 else f"{rat_str(mag)}*i"
        return f"{rat_str(self.re)}{sign}{istr}"

    def __repr__(self):
        return f"GaussRat({self})"


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)

UNITS = (GR_ONE, -GR_ONE, GR_I, -GR_I)


def gr(x, y=0) -> GaussRat:
    """Convenience constructor accepting ints, rationals, strings, GaussRat."""
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, str):
        return GaussRat.parse(x)
    return GaussRat(x, y)


# -- Gaussian integer helpers (for MapPoint content normalization) ----


def gint_divmod(a: tuple, b: tuple) -> tuple:
    """Rounded division in Z[i]; a, b are (re, im) integer pairs, b != 0."""
    ar, ai = a
    br, bi = b
    n = br * br + bi * bi
    # a * conj(b) = (ar*br + ai*bi) + (ai*br - ar*bi) i
    pr = ar * br + ai * bi
    pi = ai * br - ar * bi
    # round to nearest integer
    qr = (2 * pr + n) // (2 * n) if pr >= 0 else -((-2 * pr + n) // (2 * n))
    qi = (2 * pi + n) // (2 * n) if pi >= 0 else -((-2 * pi + n) // (2 * n))
    rr = ar - (qr * br - qi * bi)
    ri = ai - (qr * bi + qi * br)
    return (qr, qi), (rr, ri)


def gint_gcd(a: tuple, b: tuple) -> tuple:
    """Euclidean gcd in Z[i] (well defined up to units)."""
    while b != (0, 0):
        _, r = gint_divmod(a, b)
        a, b = b, r
    return a
