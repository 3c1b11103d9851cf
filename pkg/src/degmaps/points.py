"""Points of the projective line over the Gaussian rationals."""

from __future__ import annotations

from .errors import DegreeMismatch
from .scalars import GR_ONE, GR_ZERO, GaussRat, gr
from .homog import MapPoint, Moebius
from . import unipoly as up


class PPoint:
    """A point of P^1 over Q(i): a finite value or infinity."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        # value None means infinity
        if value is not None and not isinstance(value, GaussRat):
            value = gr(value)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("PPoint is immutable")

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __eq__(self, other):
        if isinstance(other, (int, GaussRat)):
            other = PPoint(other)
        if not isinstance(other, PPoint):
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash(("PPoint", self.value))

    def __str__(self):
        return "inf" if self.is_infinity else str(self.value)

    def __repr__(self):
        return f"PPoint({self})"


INFINITY = PPoint(None)


def pp(x) -> PPoint:
    if isinstance(x, PPoint):
        return x
    if isinstance(x, str) and x.strip() in ("inf", "oo", "infinity"):
        return INFINITY
    return PPoint(x)


def eval_map(g: MapPoint, z: PPoint) -> PPoint:
    """Evaluate a nondegenerate map at a point (projective, infinity-aware)."""
    p = g.p.univariate()
    q = g.q.univariate()
    d = g.degree
    if z.is_infinity:
        # value [p_d : q_d] of the top homogeneous coefficients
        a = g.p.coeffs[d]
        b = g.q.coeffs[d]
    else:
        a = up.peval(p, z.value) if p else GR_ZERO
        b = up.peval(q, z.value) if q else GR_ZERO
    if a.is_zero() and b.is_zero():
        raise ValueError("map evaluates to [0:0]; input not nondegenerate at point")
    if b.is_zero():
        return INFINITY
    return PPoint(a / b)


def moebius_apply(m: Moebius, z: PPoint) -> PPoint:
    """Apply a GaussRat Moebius map to a point."""
    if z.is_infinity:
        num, den = m.a, m.c
    else:
        num = m.a * z.value + m.b
        den = m.c * z.value + m.d
    if den.is_zero():
        return INFINITY
    return PPoint(num / den)


def _to_standard(triple: tuple) -> Moebius:
    """Moebius sending (a, b, c) -> (0, 1, inf)."""
    a, b, c = (pp(x) for x in triple)
    # z -> ((z-a)(b-c)) / ((z-c)(b-a)) with infinity degenerations
    if a.is_infinity:
        # z -> (b-c)/(z-c)
        return Moebius(GR_ZERO, b.value - c.value, GR_ONE, -c.value)
    if b.is_infinity:
        # z -> (z-a)/(z-c)
        return Moebius(GR_ONE, -a.value, GR_ONE, -c.value)
    if c.is_infinity:
        # z -> (z-a)/(b-a)
        return Moebius(GR_ONE, -a.value, GR_ZERO, b.value - a.value)
    return Moebius(
        b.value - c.value,
        -a.value * (b.value - c.value),
        b.value - a.value,
        -c.value * (b.value - a.value),
    )


# Moebius sending a triple to another triple: M = S_dst^(-1) o S_src
def moebius_three_points(src: tuple, dst: tuple) -> Moebius:
    """The unique Moebius map sending src[i] -> dst[i], triples of distinct points."""
    s = _to_standard(src)
    t = _to_standard(dst)
    return s.then(t.inverse())
