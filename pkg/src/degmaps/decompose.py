"""Decomposition of a degenerate pair into hole polynomial and induced map."""

from __future__ import annotations

from dataclasses import dataclass

from . import unipoly as up
from .errors import UnsplitFactor
from .factoring import factor_gaussrat
from .homog import HomogPoly, MapPoint, Moebius
from .points import INFINITY, PPoint, eval_map, pp
from .scalars import GR_ONE, GR_ZERO, GaussRat


@dataclass(frozen=True)
class HoleEntry:
    """One hole: a split point, or an irreducible factor cluster over Q(i)."""

    point: PPoint | None  # set for split holes
    factor: tuple | None  # monic irreducible coeff tuple for clusters
    depth: int

    @property
    def factor_degree(self) -> int:
        if self.point is not None:
            return 1
        return len(self.factor) - 1

    def label(self) -> str:
        if self.point is not None:
            return str(self.point)
        return "cluster:" + ",".join(str(c) for c in self.factor)


@dataclass(frozen=True)
class HoleDivisor:
    entries: tuple

    def total_depth(self) -> int:
        return sum(e.factor_degree * e.depth for e in self.entries)

    def split_points(self) -> list:
        return [(e.point, e.depth) for e in self.entries if e.point is not None]

    def depth_of(self, z: PPoint) -> int:
        for e in self.entries:
            if e.point is not None and e.point == z:
                return e.depth
            if e.factor is not None and not z.is_infinity:
                if up.peval(list(e.factor), z.value).is_zero():
                    # irreducible of degree >= 2 has no Q(i) roots, so this
                    # branch is unreachable for GaussRat queries
                    raise UnsplitFactor(str(z))
        return 0


@dataclass(frozen=True)
class Decomposition:
    map: MapPoint
    h: HomogPoly  # the hole polynomial H_f
    induced: MapPoint  # coprime pair of degree d - deg H_f
    holes: HoleDivisor

    @property
    def degree(self) -> int:
        return self.map.degree

    @property
    def induced_degree(self) -> int:
        return self.induced.degree

    def is_degenerate(self) -> bool:
        return self.h.degree > 0


_DECOMP_CACHE: dict = {}


def decompose(f: MapPoint) -> Decomposition:
    """Split f = H_f * f_hat with H_f = gcd(P, Q) and f_hat coprime.

    The gcd is computed on dehomogenizations, tracking the power of Y
    separately so holes at infinity are caught.
    """
    key = None
    if f.is_gaussrat():
        key = hash(f)
        cached = _DECOMP_CACHE.get(key)
        if cached is not None and cached.map == f:
            return cached
    d = f.degree
    p = f.p.univariate()
    q = f.q.univariate()
    if not p:
        g = up.pmonic(q)
        inf_mult = d - up.pdeg(q)
    elif not q:
        g = up.pmonic(p)
        inf_mult = d - up.pdeg(p)
    else:
        g = up.pgcd(p, q)
        inf_mult = d - max(up.pdeg(p), up.pdeg(q))
    deg_h = up.pdeg(g) + inf_mult if g else inf_mult
    # hole polynomial as a homogeneous factor of degree deg_h:
    # Y^inf_mult * homogenize(g)
    h_coeffs = [GR_ZERO] * (deg_h + 1)
    for i, c in enumerate(g):
        h_coeffs[i] = c
    h = HomogPoly(deg_h, h_coeffs)
    d_hat = d - deg_h
    if not p:
        ip = []
        iq = up.pdivexact(q, g) if g else list(q)
    elif not q:
        ip = up.pdivexact(p, g) if g else list(p)
        iq = []
    else:
        ip = up.pdivexact(p, g)
        iq = up.pdivexact(q, g)
    induced = MapPoint(
        HomogPoly.from_univariate(ip, d_hat),
        HomogPoly.from_univariate(iq, d_hat),
    )
    entries = []
    if inf_mult > 0:
        entries.append(HoleEntry(INFINITY, None, inf_mult))
    for fac, mult in factor_gaussrat(g):
        if len(fac) == 2:
            entries.append(HoleEntry(PPoint(-fac[0]), None, mult))
        else:
            entries.append(HoleEntry(None, tuple(fac), mult))
    dec = Decomposition(f, h, induced, HoleDivisor(tuple(entries)))
    _check_decomposition(f, dec)
    if key is not None:
        if len(_DECOMP_CACHE) > 4096:
            _DECOMP_CACHE.clear()
        _DECOMP_CACHE[key] = dec
    return dec


def _check_decomposition(f: MapPoint, dec: Decomposition):
    assert dec.holes.total_depth() == dec.h.degree
    hp = dec.h.mul(dec.induced.p)
    hq = dec.h.mul(dec.induced.q)
    lifted = MapPoint(hp, hq)
    if not (lifted == f):
        raise AssertionError("decomposition does not multiply back to the input")


def depth(f: MapPoint, z) -> int:
    """Multiplicity of z in the hole polynomial of f; 0 if not a hole."""
    return decompose(f).holes.depth_of(pp(z))


def local_multiplicity(g: MapPoint, z) -> int:
    """m_z(g): preimage count of a generic value near z, for nondegenerate g."""
    z = pp(z)
    if g.degree < 1:
        raise ValueError("local multiplicity needs degree >= 1")
    if z.is_infinity:
        # conjugate by z -> 1/z to move the point to 0
        swapped = MapPoint(
            HomogPoly(g.degree, list(reversed(g.q.coeffs))),
            HomogPoly(g.degree, list(reversed(g.p.coeffs))),
        )
        return local_multiplicity(swapped, PPoint(0))
    w = eval_map(g, z)
    p = g.p.univariate()
    q = g.q.univariate()
    if w.is_infinity:
        # preimages of infinity near z are zeros of Q
        return up.root_multiplicity(q, z.value)
    shifted = up.psub(p, up.pscale(q, w.value))
    return up.root_multiplicity(shifted, z.value)
