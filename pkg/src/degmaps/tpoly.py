"""Sparse Laurent polynomials in a formal parameter t with rational exponents.

The coefficient field is GaussRat; exponents are exact rationals.  There is no
truncation: every value is an exact finite sum of monomials.  These cover all
series that the construction code needs, since every family it builds has
coefficients polynomial in a fixed root t^(1/e).
"""

from __future__ import annotations

from .errors import NegativeValuation
from .scalars import GR_ONE, GR_ZERO, INF, GaussRat, gr, rat


class TPoly:
    """Finite sum  sum_q  c_q * t^q  with c_q in Q(i), q in Q.

    Treated as immutable; do not mutate ``terms`` after construction.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for q, c in terms.items():
                if not isinstance(c, GaussRat):
                    c = gr(c)
                if not c.is_zero():
                    q = rat(q)
                    if q in clean:
                        s = clean[q] + c
                        if s.is_zero():
                            del clean[q]
                        else:
                            clean[q] = s
                    else:
                        clean[q] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TPoly is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c) -> "TPoly":
        return TPoly({rat(0): gr(c)})

    @staticmethod
    def t_power(q, c=1) -> "TPoly":
        """c * t^q"""
        return TPoly({rat(q): gr(c)})

    @staticmethod
    def zero() -> "TPoly":
        return TP_ZERO

    @staticmethod
    def one() -> "TPoly":
        return TP_ONE

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and rat(0) in self.terms)

    def __bool__(self):
        return bool(self.terms)

    # -- valuation and reduction --------------------------------------

    def val(self):
        """Minimum exponent with nonzero coefficient; +inf for zero."""
        if not self.terms:
            return INF
        return min(self.terms)

    def max_exp(self):
        if not self.terms:
            return -INF
        return max(self.terms)

    def leading_coeff(self) -> GaussRat:
        """Coefficient of the minimal exponent; zero for the zero element."""
        if not self.terms:
            return GR_ZERO
        return self.terms[min(self.terms)]

    def reduce0(self) -> GaussRat:
        """Coefficient of t^0.  Errors if the valuation is negative."""
        if self.terms and min(self.terms) < 0:
            raise NegativeValuation(f"val = {min(self.terms)} < 0")
        return self.terms.get(rat(0), GR_ZERO)

    def coeff(self, q) -> GaussRat:
        return self.terms.get(rat(q), GR_ZERO)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, TPoly):
            return other
        if isinstance(other, (int, GaussRat, type(rat(0)))):
            return TPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for q, c in o.terms.items():
            s = terms.get(q, GR_ZERO) + c
            if s.is_zero():
                terms.pop(q, None)
            else:
                terms[q] = s
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", terms)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", {q: -c for q, c in self.terms.items()})
        return out

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = {}
        for q1, c1 in self.terms.items():
            for q2, c2 in o.terms.items():
                q = q1 + q2
                p = c1 * c2
                s = terms.get(q)
                s = p if s is None else s + p
                if s.is_zero():
                    terms.pop(q, None)
                else:
                    terms[q] = s
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", terms)
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative TPoly power; invert monomials explicitly")
        result = TP_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "TPoly":
        c = gr(c)
        if c.is_zero():
            return TP_ZERO
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", {q: v * c for q, v in self.terms.items()})
        return out

    def shift(self, q) -> "TPoly":
        """Multiply by t^q."""
        q = rat(q)
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", {e + q: c for e, c in self.terms.items()})
        return out

    def rescale_exponents(self, e: int) -> "TPoly":
        """Substitute t -> t^e: every exponent q becomes q*e."""
        if e < 1:
            raise ValueError("rescale factor must be a positive integer")
        out = TPoly.__new__(TPoly)
        object.__setattr__(out, "terms", {q * e: c for q, c in self.terms.items()})
        return out

    def truncate_below(self, bound) -> "TPoly":
        """Keep only terms with exponent < bound."""
        bound = rat(bound)
        out = TPoly.__new__(TPoly)
        object.__setattr__(
            out, "terms", {q: c for q, c in self.terms.items() if q < bound}
        )
        return out

    # -- comparison / hashing ----------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- formatting ---------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for q in sorted(self.terms):
            c = self.terms[q]
            cs = str(c)
            if ("+" in cs[1:]) or ("-" in cs[1:]):
                cs = f"({cs})"
            if q == 0:
                parts.append(cs)
            else:
                tq = "t" if q == 1 else f"t^{q}"
                parts.append(tq if cs == "1" else f"{cs}*{tq}")
        return " + ".join(parts)

    def __repr__(self):
        return f"TPoly({self})"


TP_ZERO = TPoly()
TP_ONE = TPoly({0: 1})
TP_T = TPoly({1: 1})


def tp(x) -> TPoly:
    """Coerce ints, rationals, GaussRat, or TPoly to TPoly."""
    if isinstance(x, TPoly):
        return x
    return TPoly.const(x)


def tp_mul(x: TPoly, y: TPoly) -> TPoly:
    return x * y


def series_quotient(num: TPoly, den: TPoly, bound) -> TPoly:
    """Laurent-series expansion of num/den keeping exponents < bound.

    The divisor must be nonzero.  Exact when the division terminates below
    the bound; otherwise a truncation of the infinite expansion.
    """
    if den.is_zero():
        raise ZeroDivisionError("series division by zero")
    bound = rat(bound)
    e0 = den.val()
    c0 = den.leading_coeff()
    q_terms = {}
    r = num
    while r.terms:
        lead = r.val()
        exp = lead - e0
        if exp >= bound:
            break
        c = r.terms[lead] / c0
        q_terms[exp] = c
        r = r - den.shift(exp).scale(c)
    return TPoly(q_terms)


def exponent_lcm(*polys) -> int:
    """lcm of all exponent denominators appearing in the given TPolys."""
    from math import lcm

    denoms = [1]
    for p in polys:
        for q in p.terms:
            denoms.append(int(q.denominator))
    return lcm(*denoms)
