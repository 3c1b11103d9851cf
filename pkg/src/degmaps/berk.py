"""Action of maps with TPoly coefficients on type II points.

A type II point (center, alpha) is the Berkovich point of the closed ball
{ val(z - center) >= alpha }; the Gauss point is (0, 0).  Images and tangent
maps are computed exactly: the map is evaluated at finitely many generic
residue representatives, the image radius is the minimal pairwise valuation
of the differences, and the tangent map is read off from the residues of the
shifted values.  Surplus multiplicities are preimage counts obtained from
Newton polygons, so no root extraction over the series field is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import unipoly as up
from .decompose import local_multiplicity
from .errors import (
    BudgetExceeded,
    ConstantLeadingForm,
    ConstantMap,
    GenericResidueExhausted,
    MarginExhausted,
    NTooSmall,
    ZeroPair,
)
from .homog import HomogPoly, MapPoint, Moebius
from .points import INFINITY, PPoint, eval_map
from .scalars import GR_ZERO, GaussRat, INF, gr, rat
from .tpoly import TPoly, series_quotient, tp

#: when set, every image/tangent computation asserts the degree identity
#: deg phi = local degree + sum of direction surpluses
CHECK_SURPLUS_SUM = True


class TypeIIPoint:
    """xi_{center, |t|^alpha}; canonical form truncates the center below alpha."""

    __slots__ = ("center", "alpha")

    def __init__(self, center, alpha):
        center = tp(center)
        alpha = rat(alpha)
        object.__setattr__(self, "center", center.truncate_below(alpha))
        object.__setattr__(self, "alpha", alpha)

    def __setattr__(self, name, value):
        raise AttributeError("TypeIIPoint is immutable")

    def __eq__(self, other):
        if not isinstance(other, TypeIIPoint):
            return NotImplemented
        return self.alpha == other.alpha and self.center == other.center

    def __hash__(self):
        return hash((self.center, self.alpha))

    def __str__(self):
        return f"xi({self.center}, |t|^{self.alpha})"

    def __repr__(self):
        return f"TypeIIPoint({self})"


GAUSS = TypeIIPoint(0, 0)


def chi(alpha) -> TypeIIPoint:
    """The point xi_{0, |t|^-alpha} on the segment from the Gauss point to infinity."""
    return TypeIIPoint(0, -rat(alpha))


@dataclass(frozen=True)
class Direction:
    """A tangent direction: Res(c) for a residue c, or Out (the infinity side)."""

    res: GaussRat | None = None  # None encodes Out

    @property
    def is_out(self) -> bool:
        return self.res is None

    def __str__(self):
        return "out" if self.is_out else f"res({self.res})"


OUT = Direction(None)


def res_dir(c) -> Direction:
    return Direction(gr(c))


def direction_of(xi: TypeIIPoint, p) -> Direction:
    """Direction at xi of the type I point p (a TPoly value, or infinity)."""
    if isinstance(p, PPoint):
        if p.is_infinity:
            return OUT
        p = p.value
    p = tp(p)
    diff = p - xi.center
    if diff.val() < xi.alpha:
        return OUT
    return Direction(diff.shift(-xi.alpha).reduce0())


def direction_toward(xi: TypeIIPoint, zeta: TypeIIPoint) -> Direction | None:
    """Direction at xi whose component contains zeta; None when xi == zeta."""
    if xi == zeta:
        return None
    diff = zeta.center - xi.center
    if zeta.alpha > xi.alpha and diff.val() >= xi.alpha:
        # zeta's ball sits strictly inside xi's ball
        return Direction(diff.shift(-xi.alpha).reduce0())
    return OUT


# -- rational maps over the series field ------------------------------


class FactoredRat:
    """A rational map over the series field, kept in partially factored form.

    phi(z) = unit * B(z) * prod (z - zero_i)^m_i / prod (z - pole_j)^k_j
    with B = base_num/base_den an explicit polynomial quotient (used for
    factors whose roots do not split over Q(i)).
    """

    __slots__ = ("unit", "zeros", "poles", "base_num", "base_den", "_num", "_den")

    def __init__(self, unit=1, zeros=(), poles=(), base_num=None, base_den=None):
        unit = tp(unit)
        if unit.is_zero():
            raise ValueError("unit must be nonzero")
        zeros = tuple((tp(r), int(m)) for r, m in zeros)
        poles = tuple((tp(r), int(m)) for r, m in poles)
        base_num = [tp(c) for c in (base_num if base_num is not None else [1])]
        base_den = [tp(c) for c in (base_den if base_den is not None else [1])]
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "base_num", up.pnorm(base_num))
        object.__setattr__(self, "base_den", up.pnorm(base_den))
        if not self.base_num or not self.base_den:
            raise ValueError("base numerator and denominator must be nonzero")
        object.__setattr__(self, "_num", None)
        object.__setattr__(self, "_den", None)

    def __setattr__(self, name, value):
        raise AttributeError("FactoredRat is immutable")

    def _key(self):
        return (
            self.unit,
            self.zeros,
            self.poles,
            tuple(self.base_num),
            tuple(self.base_den),
        )

    def __eq__(self, other):
        if not isinstance(other, FactoredRat):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @staticmethod
    def from_poly_pair(num, den) -> "FactoredRat":
        return FactoredRat(1, (), (), num, den)

    @staticmethod
    def from_gaussrat_map(g: MapPoint) -> "FactoredRat":
        return FactoredRat.from_poly_pair(
            [tp(c) for c in g.p.univariate()], [tp(c) for c in g.q.univariate()]
        )

    def num(self) -> list:
        if self._num is None:
            poly = up.pscale(self.base_num, self.unit)
            for r, m in self.zeros:
                lin = [-r, tp(1)]
                for _ in range(m):
                    poly = up.pmul(poly, lin)
            object.__setattr__(self, "_num", poly)
        return self._num

    def den(self) -> list:
        if self._den is None:
            poly = list(self.base_den)
            for r, m in self.poles:
                lin = [-r, tp(1)]
                for _ in range(m):
                    poly = up.pmul(poly, lin)
            object.__setattr__(self, "_den", poly)
        return self._den

    @property
    def degree(self) -> int:
        return max(up.pdeg(self.num()), up.pdeg(self.den()))

    def mul(self, other: "FactoredRat") -> "FactoredRat":
        return FactoredRat(
            self.unit * other.unit,
            self.zeros + other.zeros,
            self.poles + other.poles,
            up.pmul(self.base_num, other.base_num),
            up.pmul(self.base_den, other.base_den),
        )

    def to_mappoint(self) -> MapPoint:
        num, den = self.num(), self.den()
        d = max(up.pdeg(num), up.pdeg(den))
        return MapPoint.from_coeff_lists(num, den, degree=d)

    def eval(self, p) -> tuple:
        """(numerator value, denominator value) at a TPoly point."""
        p = tp(p)
        nv = up.peval(self.num(), p)
        dv = up.peval(self.den(), p)
        return nv, dv

    def __str__(self):
        return f"({up_str(self.num())}) / ({up_str(self.den())})"


def one_plus_pole(p, N) -> FactoredRat:
    """The factor 1 + t^N / (z - p) = (z - (p - t^N)) / (z - p)."""
    p = tp(p)
    return FactoredRat(1, ((p - TPoly.t_power(N), 1),), ((p, 1),))


def up_str(poly) -> str:
    return " + ".join(f"({c})*z^{i}" for i, c in enumerate(poly) if not c.is_zero())


@dataclass(frozen=True)
class TangentData:
    image: TypeIIPoint
    tangent: MapPoint  # rational map over the residue field
    local_degree: int

    def tangent_direction(self, v: Direction) -> Direction:
        """Image of the direction v under the tangent map."""
        point = INFINITY if v.is_out else PPoint(v.res)
        w = eval_map(self.tangent, point)
        return OUT if w.is_infinity else Direction(w.value)

    def direction_multiplicity(self, v: Direction) -> int:
        point = INFINITY if v.is_out else PPoint(v.res)
        return local_multiplicity(self.tangent, point)


def _substitute_center(poly: list, z0: TPoly, alpha) -> list:
    """Coefficients in c of poly(z0 + c*t^alpha), as TPoly lists."""
    talpha = TPoly.t_power(alpha)
    acc = [poly[-1]] if poly else []
    for coef in reversed(poly[:-1]):
        # acc * (z0 + c t^alpha) + coef
        nxt = [tp(0)] * (len(acc) + 1)
        for j, a in enumerate(acc):
            nxt[j] = nxt[j] + a * z0
            nxt[j + 1] = nxt[j + 1] + a * talpha
        nxt[0] = nxt[0] + coef
        acc = nxt
    return acc


def _residue_poly(cpoly: list) -> tuple:
    """(min coefficient valuation, GaussRat residue polynomial)."""
    vals = [c.val() for c in cpoly]
    finite = [v for v in vals if v != INF]
    if not finite:
        raise ZeroPair("all coefficients vanish")
    nu = min(finite)
    residue = [
        c.shift(-nu).reduce0() if v != INF else GR_ZERO
        for c, v in zip(cpoly, vals)
    ]
    return nu, up.pnorm(residue)


_IT_CACHE: dict = {}


def image_and_tangent(phi: FactoredRat, xi: TypeIIPoint) -> TangentData:
    """Image point, tangent map, and local degree of phi at xi."""
    key = (id(phi), xi)
    hit = _IT_CACHE.get(key)
    if hit is not None and hit[0] is phi:
        # the entry pins phi, so a matching identity cannot be a reused id
        return hit[1]
    td = _image_and_tangent_uncached(phi, xi)
    if CHECK_SURPLUS_SUM:
        _assert_surplus_sum(phi, xi, td)
    if len(_IT_CACHE) > 8192:
        _IT_CACHE.clear()
    _IT_CACHE[key] = (phi, td)
    return td


def _image_and_tangent_uncached(phi: FactoredRat, xi: TypeIIPoint) -> TangentData:
    num, den = phi.num(), phi.den()
    deg = max(up.pdeg(num), up.pdeg(den))
    if deg < 1:
        raise ConstantMap("tangent data needs a nonconstant map")
    nc = _substitute_center(num, xi.center, xi.alpha)
    dc = _substitute_center(den, xi.center, xi.alpha)
    _, n_res = _residue_poly(nc)
    _, d_res = _residue_poly(dc)
    # generic residues: skip zeros of either residue polynomial
    samples = []
    candidate = 0
    tries = 0
    needed = deg + 2
    while len(samples) < needed:
        tries += 1
        if tries > 4 * deg + 40:
            raise GenericResidueExhausted("no generic residues found")
        candidate += 1
        c = gr(candidate)
        nv = up.peval(n_res, c) if n_res else GR_ZERO
        dv = up.peval(d_res, c) if d_res else GR_ZERO
        if nv.is_zero() or dv.is_zero():
            continue
        n_exact = up.peval(nc, tp(c))
        d_exact = up.peval(dc, tp(c))
        samples.append((c, n_exact, d_exact))
    # image radius: minimal pairwise valuation of value differences
    gamma = None
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            _, ni, di = samples[i]
            _, nj, dj = samples[j]
            cross = ni * dj - nj * di
            if cross.is_zero():
                continue
            g = cross.val() - di.val() - dj.val()
            if gamma is None or g < gamma:
                gamma = g
    if gamma is None:
        raise ConstantLeadingForm("map is constant on the sampled residues")
    _, n1, d1 = samples[0]
    w0 = series_quotient(n1, d1, gamma)
    image = TypeIIPoint(w0, gamma)
    # tangent: residues of (phi(p_c) - w0) * t^-gamma as a function of c
    shifted = [a - w0 * b for a, b in zip(nc, dc + [tp(0)] * (len(nc) - len(dc)))]
    if len(dc) > len(nc):
        shifted = shifted + [(-w0) * b for b in dc[len(nc):]]
    nu_s, s_res = _residue_poly(shifted)
    nu_d, d_res2 = _residue_poly(dc)
    if nu_s - nu_d != gamma:
        raise AssertionError(
            f"leading valuation mismatch: {nu_s} - {nu_d} != {gamma}"
        )
    g = up.pgcd(s_res, d_res2)
    if up.pdeg(g) > 0:
        s_res = up.pdivexact(s_res, g)
        d_res2 = up.pdivexact(d_res2, g)
    local_degree = max(up.pdeg(s_res), up.pdeg(d_res2))
    if local_degree < 1:
        raise ConstantLeadingForm("tangent map degenerates to a constant")
    tangent = MapPoint.from_coeff_lists(s_res, d_res2, degree=local_degree)
    return TangentData(image, tangent.canonical(), local_degree)


def active_directions(phi: FactoredRat, xi: TypeIIPoint) -> list:
    """Directions that can carry surplus: those of the zeros/poles, plus Out."""
    dirs = {OUT}
    for root_list in (phi.zeros, phi.poles):
        for r, _ in root_list:
            dirs.add(direction_of(xi, r))
    # roots of the base polynomials are located via Newton polygons per
    # direction; sample the residues of the base polynomial root clusters
    for poly in (phi.base_num, phi.base_den):
        if up.pdeg(poly) >= 1:
            for c in _cluster_residues(poly, xi):
                dirs.add(c)
    return sorted(dirs, key=lambda v: (v.is_out, str(v)))


def _cluster_residues(poly: list, xi: TypeIIPoint) -> list:
    """Directions at xi containing roots of the given TPoly polynomial.

    Residues c with a root in the ball {val(z - (center + c t^alpha)) > alpha}
    are exactly the roots of the residue polynomial of poly(center + c t^alpha)
    that lie in Q(i); non-split residues cannot be directions of any Q(i)
    construction data, but are still found by factoring.
    """
    from .factoring import roots_gaussrat

    shifted = _substitute_center(poly, xi.center, xi.alpha)
    _, res = _residue_poly(shifted)
    out = []
    if up.pdeg(res) < up.pdeg(up.pnorm(shifted)):
        # leading coefficient drops: some roots are on the infinity side
        out.append(OUT)
    for r, _ in roots_gaussrat(res):
        out.append(Direction(r))
    return out


def _newton_count_gt(poly: list, alpha) -> int:
    """Number of roots (with multiplicity) of the TPoly polynomial with
    valuation strictly greater than alpha: the smallest argmin of
    val(coeff_k) + k*alpha."""
    vals = [c.val() for c in poly]
    best = None
    best_k = 0
    for k, v in enumerate(vals):
        if v == INF:
            continue
        score = v + k * alpha
        if best is None or score < best:
            best = score
            best_k = k
    return best_k


def _newton_count_ge(poly: list, alpha) -> int:
    """Number of roots with valuation >= alpha: the largest argmin."""
    vals = [c.val() for c in poly]
    best = None
    best_k = 0
    for k, v in enumerate(vals):
        if v == INF:
            continue
        score = v + k * alpha
        if best is None or score <= best:
            if best is None or score < best:
                best = score
            best_k = k
    return best_k


def _count_preimages_in_direction(
    phi: FactoredRat, xi: TypeIIPoint, v: Direction, x
) -> int:
    """Preimages of the reference value x (GaussRat or infinity) in B(v)."""
    num, den = phi.num(), phi.den()
    deg = max(up.pdeg(num), up.pdeg(den))
    if x is INFINITY:
        u = list(den)
    else:
        xv = tp(x)
        u = up.psub(num, up.pscale(den, xv))
    u = up.pnorm(u)
    deficit = deg - up.pdeg(u)
    if v.is_out:
        shifted = _taylor_shift(u, xi.center)
        inside_ge = _newton_count_ge(shifted, xi.alpha)
        return (up.pdeg(u) - inside_ge) + deficit
    center = xi.center + TPoly.t_power(xi.alpha, v.res)
    shifted = _taylor_shift(u, center)
    return _newton_count_gt(shifted, xi.alpha)


def _taylor_shift(poly: list, s: TPoly) -> list:
    """Coefficients of poly(s + w) in w."""
    acc = [poly[-1]] if poly else []
    for coef in reversed(poly[:-1]):
        nxt = [tp(0)] * (len(acc) + 1)
        for j, a in enumerate(acc):
            nxt[j] = nxt[j] + a * s
            nxt[j + 1] = nxt[j + 1] + a
        nxt[0] = nxt[0] + coef
        acc = nxt
    return acc


def surplus(phi: FactoredRat, xi: TypeIIPoint, v: Direction) -> int:
    """s_phi(v): preimages in B(v) of a reference point outside the image
    component of v."""
    td = image_and_tangent(phi, xi)
    return _surplus_with_td(phi, xi, v, td)


def _surplus_with_td(phi, xi, v, td) -> int:
    tv = td.tangent_direction(v)
    if not tv.is_out:
        # infinity lies outside the image component of v
        reference = INFINITY
    else:
        # the image center lies in the Res(0) component of the image point
        reference = td.image.center
    return _count_preimages_in_direction(phi, xi, v, reference)


def _assert_surplus_sum(phi, xi, td):
    total = 0
    for v in active_directions(phi, xi):
        total += _surplus_with_td(phi, xi, v, td)
    if td.local_degree + total != phi.degree:
        raise AssertionError(
            f"surplus sum violated: {td.local_degree} + {total} != {phi.degree}"
        )


# -- iterated surplus -------------------------------------------------


@dataclass(frozen=True)
class OrbitStep:
    point: TypeIIPoint
    direction: Direction
    tangent_data: TangentData
    surplus: int
    multiplicity: int


def orbit_steps(phi: FactoredRat, xi: TypeIIPoint, v: Direction, n: int) -> list:
    """Per-step tangent data, surpluses and multiplicities along the orbit."""
    steps = []
    point, direction = xi, v
    for _ in range(n):
        td = image_and_tangent(phi, point)
        s = surplus(phi, point, direction)
        m = td.direction_multiplicity(direction)
        steps.append(OrbitStep(point, direction, td, s, m))
        point = td.image
        direction = td.tangent_direction(direction)
    return steps


def surplus_iterate(phi: FactoredRat, xi: TypeIIPoint, v: Direction, n: int):
    """(integer s^n, proportional s^n / d^n) for the n-th iterate of phi."""
    d = phi.degree
    steps = orbit_steps(phi, xi, v, n)
    total = 0
    m_acc = 1
    for k, step in enumerate(steps):
        total += m_acc * step.surplus * d ** (n - 1 - k)
        m_acc *= step.multiplicity
    return total, rat(total, d**n)


def iterate_multiplicity(steps: list) -> int:
    m = 1
    for step in steps:
        m *= step.multiplicity
    return m


def depths_via_surplus(phi: FactoredRat, zeta0: TypeIIPoint, n: int, v: Direction) -> int:
    """Predicted depth, in direction v, of the reduction of phi^n at zeta0.

    Equals s^n(v), plus m^n(v) exactly when zeta0 lies in the component of
    the image direction of v at phi^n(zeta0).
    """
    steps = orbit_steps(phi, zeta0, v, n)
    s_n, _ = surplus_iterate(phi, zeta0, v, n)
    final_point = steps[-1].tangent_data.image
    final_dir = steps[-1].tangent_data.tangent_direction(steps[-1].direction)
    toward = direction_toward(final_point, zeta0)
    if toward is not None and toward == final_dir:
        return s_n + iterate_multiplicity(steps)
    return s_n


# -- reduction --------------------------------------------------------


def reduce_at(psi: MapPoint, m: Moebius) -> MapPoint:
    """Coefficient reduction of M^(-1) o psi o M, canonicalized over GaussRat."""
    m_t = Moebius(tp(m.a), tp(m.b), tp(m.c), tp(m.d))
    psi_t = MapPoint.from_coeff_lists(
        [tp(c) for c in psi.p.coeffs], [tp(c) for c in psi.q.coeffs],
        degree=psi.degree,
    )
    conj = m_t.inverse().conjugate(psi_t)
    coeffs = list(conj.p.coeffs) + list(conj.q.coeffs)
    vals = [c.val() for c in coeffs if not c.is_zero()]
    if not vals:
        raise ZeroPair("conjugated pair is identically zero")
    m0 = min(vals)
    reduced = [c.shift(-m0).reduce0() for c in coeffs]
    n = psi.degree + 1
    return MapPoint(
        HomogPoly(psi.degree, reduced[:n]), HomogPoly(psi.degree, reduced[n:])
    ).canonical()


def gauss_reduction(phi: MapPoint) -> tuple:
    """(coefficient reduction at the Gauss point, its induced map)."""
    from .decompose import decompose

    f0 = reduce_at(phi, Moebius.identity_tpoly())
    return f0, decompose(f0).induced


# -- truncated iterate expansion --------------------------------------
#
# Expanding the n-th iterate of a degree-d pair over TPoly is exact but the
# term counts explode.  Only the minimal-valuation layer survives the
# reduction, so the expansion may drop every term at or above a moving
# exactness margin: all inputs are normalized to valuation >= 0, products of
# dropped terms stay above the margin, and each projective renormalization
# by t^w shrinks the margin by w.  If the margin is exhausted before the
# final reduction, the whole computation restarts with a larger margin.


def _mul_trunc(x: TPoly, y: TPoly, bound) -> TPoly:
    terms: dict = {}
    for q1, c1 in x.terms.items():
        for q2, c2 in y.terms.items():
            q = q1 + q2
            if q >= bound:
                continue
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


def _pmul_trunc(a: list, b: list, bound) -> list:
    out = [TPoly.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + _mul_trunc(x, y, bound)
    return out


def _compose_trunc(outer: MapPoint, hp: list, hq: list, bound) -> tuple:
    """(P, Q) coefficient lists of outer(hp : hq), truncated below bound."""
    d = outer.degree
    inner_deg = len(hp) - 1
    p_pows: dict = {0: [tp(1)], 1: hp}
    q_pows: dict = {0: [tp(1)], 1: hq}

    def power(table, base, j):
        if j not in table:
            table[j] = _pmul_trunc(power(table, base, j - 1), base, bound)
        return table[j]

    out = []
    for homog in (outer.p, outer.q):
        acc = [TPoly.zero()] * (d * inner_deg + 1)
        for j, coeff in enumerate(homog.coeffs):
            if coeff.is_zero():
                continue
            term = _pmul_trunc(
                power(p_pows, hp, j), power(q_pows, hq, d - j), bound
            )
            coeff = tp(coeff)
            for i, c in enumerate(term):
                if not c.is_zero():
                    acc[i] = acc[i] + _mul_trunc(coeff, c, bound)
        out.append(acc)
    return out[0], out[1]


def _normalize_pair(pq: list, margin):
    """Divide both lists by t^(min valuation); returns (new lists, new margin)."""
    vals = [c.val() for c in pq if not c.is_zero()]
    if not vals:
        raise ZeroPair("pair vanished during truncated expansion")
    w = min(vals)
    if w >= margin:
        raise MarginExhausted(f"normalization level {w} >= margin {margin}")
    if w != 0:
        pq = [c.shift(-w) for c in pq]
        margin = margin - w
    return [c.truncate_below(margin) for c in pq], margin


# Fast kernel for real coefficients: the same truncated expansion with the
# series represented as raw {exponent: mpq} dicts, skipping GaussRat objects.


def _real_coeff_dicts(conj: MapPoint):
    """Coefficients of conj as exponent->mpq dicts, or None if any is
    genuinely complex."""
    out = []
    for c in list(conj.p.coeffs) + list(conj.q.coeffs):
        d = {}
        for q, g in c.terms.items():
            if g.im != 0:
                return None
            if g.re != 0:
                d[q] = g.re
        out.append(d)
    return out


def _pmul_trunc_q(a: list, b: list, bound) -> list:
    out = [dict() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if not y:
                continue
            tgt = out[i + j]
            get = tgt.get
            for q1, c1 in x.items():
                for q2, c2 in y.items():
                    q = q1 + q2
                    if q >= bound:
                        continue
                    s = get(q)
                    tgt[q] = c1 * c2 if s is None else s + c1 * c2
    return [{q: c for q, c in d.items() if c} for d in out]


def _compose_trunc_q(outer_p: list, outer_q: list, hp: list, hq: list, bound):
    """q-kernel analogue of _compose_trunc; outer_* are coefficient dicts."""
    d = len(outer_p) - 1
    one = [{rat(0): rat(1)}]
    p_pows: dict = {0: one, 1: hp}
    q_pows: dict = {0: one, 1: hq}

    def power(table, base, j):
        if j not in table:
            table[j] = _pmul_trunc_q(power(table, base, j - 1), base, bound)
        return table[j]

    inner_deg = len(hp) - 1
    out = []
    for coeffs in (outer_p, outer_q):
        acc = [dict() for _ in range(d * inner_deg + 1)]
        for j, coeff in enumerate(coeffs):
            if not coeff:
                continue
            term = _pmul_trunc_q(power(p_pows, hp, j), power(q_pows, hq, d - j), bound)
            for i, c in enumerate(term):
                if not c:
                    continue
                tgt = acc[i]
                get = tgt.get
                for q1, c1 in coeff.items():
                    for q2, c2 in c.items():
                        q = q1 + q2
                        if q >= bound:
                            continue
                        s = get(q)
                        tgt[q] = c1 * c2 if s is None else s + c1 * c2
        out.append([{q: c for q, c in dd.items() if c} for dd in acc])
    return out[0], out[1]


def _normalize_pair_q(pq: list, margin):
    vals = [min(d) for d in pq if d]
    if not vals:
        raise ZeroPair("pair vanished during truncated expansion")
    w = min(vals)
    if w >= margin:
        raise MarginExhausted(f"normalization level {w} >= margin {margin}")
    if w != 0:
        pq = [{q - w: c for q, c in d.items()} for d in pq]
        margin = margin - w
    return [{q: c for q, c in d.items() if q < margin} for d in pq], margin


def _iterate_reduction_bounded_q(coeff_dicts: list, n: int, margin) -> MapPoint:
    cut = len(coeff_dicts) // 2
    hp, hq = coeff_dicts[:cut], coeff_dicts[cut:]
    outer_p, outer_q = hp, hq
    for step in range(n):
        if step > 0:
            hp, hq = _compose_trunc_q(outer_p, outer_q, hp, hq, margin)
        both, margin = _normalize_pair_q(hp + hq, margin)
        hp, hq = both[: len(hp)], both[len(hp) :]
    if margin <= 0:
        raise MarginExhausted("no exact layer left at the reduction level")
    zero_key = rat(0)
    reduced = [gr(d.get(zero_key, 0)) for d in hp + hq]
    d = len(hp) - 1
    return MapPoint(
        HomogPoly(d, reduced[: d + 1]), HomogPoly(d, reduced[d + 1 :])
    ).canonical()


ITERATE_DEGREE_BUDGET = 130

_MARGINS = (rat(8), rat(32), rat(128), rat(512), rat(2048))


def iterate_reduction(
    psi: MapPoint, m: Moebius, n: int, budget: int = ITERATE_DEGREE_BUDGET
) -> MapPoint:
    """Reduction at M(xi_g) of the n-th iterate of psi (TPoly coefficients).

    Equivalent to reduce_at(psi^n, m) but computed with a truncated
    expansion whose exactness at the reduction level is tracked and
    certified; MarginExhausted escalation is internal.
    """
    if psi.degree**n > budget:
        raise BudgetExceeded(
            f"degree {psi.degree}^{n} exceeds expansion budget {budget}"
        )
    m_t = Moebius(tp(m.a), tp(m.b), tp(m.c), tp(m.d))
    psi_t = MapPoint.from_coeff_lists(
        [tp(c) for c in psi.p.coeffs],
        [tp(c) for c in psi.q.coeffs],
        degree=psi.degree,
    )
    conj = m_t.inverse().conjugate(psi_t)
    coeffs = list(conj.p.coeffs) + list(conj.q.coeffs)
    w0 = min(c.val() for c in coeffs if not c.is_zero())
    if w0 != 0:
        coeffs = [c.shift(-w0) for c in coeffs]
    k = psi.degree + 1
    conj = MapPoint(
        HomogPoly(psi.degree, coeffs[:k]), HomogPoly(psi.degree, coeffs[k:])
    )
    real_dicts = _real_coeff_dicts(conj)
    last = None
    for margin in _MARGINS:
        try:
            if real_dicts is not None:
                return _iterate_reduction_bounded_q(real_dicts, n, margin)
            return _iterate_reduction_bounded(conj, n, margin)
        except (MarginExhausted, ZeroPair) as exc:
            last = exc
    raise last


def _iterate_reduction_bounded(conj: MapPoint, n: int, margin) -> MapPoint:
    hp = [tp(c) for c in conj.p.coeffs]
    hq = [tp(c) for c in conj.q.coeffs]
    for step in range(n):
        if step > 0:
            hp, hq = _compose_trunc(conj, hp, hq, margin)
        cut = len(hp)
        both, margin = _normalize_pair(hp + hq, margin)
        hp, hq = both[:cut], both[cut:]
    if margin <= 0:
        raise MarginExhausted("no exact layer left at the reduction level")
    reduced = [c.reduce0() for c in hp + hq]
    d = len(hp) - 1
    return MapPoint(
        HomogPoly(d, reduced[: d + 1]), HomogPoly(d, reduced[d + 1 :])
    ).canonical()


# -- perturbation -----------------------------------------------------


def perturb(
    phi: FactoredRat,
    new_poles: list,
    gamma: list,
    N: int,
) -> FactoredRat:
    """phi * prod (1 + t^N/(z - p)); verifies images, tangents, and surplus
    bookkeeping at every vertex of gamma, raising NTooSmall on failure."""
    psi = phi
    for p in new_poles:
        p = tp(p)
        nv, dv = phi.eval(p)
        if nv.is_zero():
            raise ValueError("new pole sits on a zero of the map")
        psi = psi.mul(one_plus_pole(p, N))
    if not new_poles:
        return phi
    for xi in gamma:
        td_old = image_and_tangent(phi, xi)
        td_new = image_and_tangent(psi, xi)
        if td_old.image != td_new.image or not (
            td_old.tangent == td_new.tangent
        ):
            raise NTooSmall(f"image/tangent moved at {xi}")
        counts: dict = {}
        for p in new_poles:
            vdir = direction_of(xi, tp(p))
            counts[vdir] = counts.get(vdir, 0) + 1
        for vdir, extra in counts.items():
            if surplus(psi, xi, vdir) != surplus(phi, xi, vdir) + extra:
                raise NTooSmall(f"surplus did not increase by {extra} at {xi}")
    return psi
