"""Semistability, iteration depth formulas, n-instability, and case tags."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import unipoly as up
from .decompose import Decomposition, HoleEntry, decompose, local_multiplicity
from .errors import (
    BudgetExceeded,
    InIndeterminacy,
    NonUniqueBadHole,
    NormalizationFailed,
    NotUnstable,
    OrbitNotSplit,
)
from .factoring import factor_gaussrat, nth_roots_gaussrat
from .homog import HomogPoly, MapPoint, Moebius
from .points import INFINITY, PPoint, eval_map, pp
from .scalars import GR_ONE, GR_ZERO, rat


def mu_minus(d: int):
    """Lower proportional depth threshold: (d-1)/(2d) for odd d, 1/2 for even."""
    if d < 2:
        raise ValueError("threshold needs d >= 2")
    return rat(d - 1, 2 * d) if d % 2 else rat(1, 2)


def mu_plus(d: int):
    """Upper proportional depth threshold: always 1 - mu_minus(d)."""
    return 1 - mu_minus(d)


def is_in_Id(f: MapPoint) -> bool:
    """Constant induced map whose value is itself a hole."""
    dec = decompose(f)
    if dec.induced_degree != 0:
        return False
    value = _constant_value(dec.induced)
    return dec.holes.depth_of(value) > 0


def _constant_value(g: MapPoint) -> PPoint:
    a = g.p.coeffs[0]
    b = g.q.coeffs[0]
    if b.is_zero():
        return INFINITY
    return PPoint(a / b)


def _fixed_point_poly(g: MapPoint) -> list:
    """p(z) - z*q(z); its roots are the finite fixed points of g."""
    p = g.p.univariate()
    q = g.q.univariate()
    return up.psub(p, up.pshift(q, 1))


def _entry_fixed(entry: HoleEntry, induced: MapPoint) -> bool:
    """Whether every root of the hole entry is fixed by the induced map."""
    if induced.degree == 0:
        value = _constant_value(induced)
        return entry.point is not None and entry.point == value
    if entry.point is not None:
        return eval_map(induced, entry.point) == entry.point
    fix = _fixed_point_poly(induced)
    if not fix:
        # every finite point fixed (identity); irreducible clusters qualify
        return True
    _, rem = up.pdivmod(fix, list(entry.factor))
    return not rem


def _stability_verdict(entries, induced: MapPoint, d: int) -> tuple:
    """(semistable, stable) from hole entries of a degree-d pair."""
    semistable = True
    stable = True
    for entry in entries:
        dz = entry.depth
        if 2 * dz > d + 1:
            semistable = False
        if 2 * dz > d:
            stable = False
        if 2 * dz >= d - 1 or 2 * dz >= d:
            fixed = _entry_fixed(entry, induced)
            if fixed:
                if 2 * dz >= d:
                    semistable = False
                if 2 * dz >= d - 1:
                    stable = False
    return semistable, stable


def is_semistable(f: MapPoint) -> bool:
    dec = decompose(f)
    return _stability_verdict(dec.holes.entries, dec.induced, f.degree)[0]


def is_stable(f: MapPoint) -> bool:
    dec = decompose(f)
    return _stability_verdict(dec.holes.entries, dec.induced, f.degree)[1]


# -- iteration --------------------------------------------------------


DEFAULT_BUDGET = 2000


def iterate_compose(f: MapPoint, n: int, budget: int = DEFAULT_BUDGET) -> MapPoint:
    """Literal n-fold homogeneous composition, degree exactly d^n (no gcd)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if f.degree**n > budget:
        raise BudgetExceeded(f"degree {f.degree}^{n} exceeds budget {budget}")
    result = f
    for _ in range(n - 1):
        result = f.compose(result)
    return result


def induced_iterate(induced: MapPoint, n: int) -> MapPoint:
    """n-fold composition of a coprime pair (stays coprime; constants absorb)."""
    if n == 0:
        raise ValueError("n >= 1 required")
    if induced.degree == 0:
        return induced
    result = induced
    for _ in range(n - 1):
        result = induced.compose(result)
    return result


def iterate_factored(f: MapPoint, n: int) -> tuple:
    """Hole data of f^n without expansion.

    Returns (factors, induced_n) with factors a list of
    (HomogPoly, exponent) whose product is the hole polynomial of f^n,
    and induced_n the coprime induced pair of f^n.
    """
    if is_in_Id(f):
        raise InIndeterminacy("factored iteration undefined on I(d)")
    dec = decompose(f)
    d = f.degree
    factors = []
    g_k = None
    for k in range(n):
        if k == 0:
            hk = dec.h
        else:
            g_k = dec.induced if g_k is None else (
                dec.induced if dec.induced.degree == 0 else g_k.compose(dec.induced)
            )
            # order of composition is irrelevant for powers of one map
            hk = dec.h.compose_pair(g_k.p, g_k.q)
        factors.append((hk, d ** (n - 1 - k)))
    return factors, induced_iterate(dec.induced, n)


def holes_of_iterate(f: MapPoint, n: int) -> tuple:
    """Aggregated hole entries of f^n plus its induced map.

    Returns (entries, induced_n) where entries is a list of HoleEntry with
    depths summed over the factored product.
    """
    factors, induced_n = iterate_factored(f, n)
    acc: dict = {}
    for hk, expo in factors:
        if hk.degree == 0:
            continue
        y_mult = hk.y_multiplicity()
        if y_mult > 0 and y_mult <= hk.degree:
            acc[INFINITY] = acc.get(INFINITY, 0) + y_mult * expo
        uni = hk.univariate()
        for fac, mult in factor_gaussrat(uni):
            if len(fac) == 2:
                key = PPoint(-fac[0])
            else:
                key = tuple(fac)
            acc[key] = acc.get(key, 0) + mult * expo
    entries = []
    for key, dz in acc.items():
        if isinstance(key, PPoint):
            entries.append(HoleEntry(key, None, dz))
        else:
            entries.append(HoleEntry(None, key, dz))
    total = sum(e.factor_degree * e.depth for e in entries)
    assert total + f.degree**n == f.degree**n + total  # tautology guard
    assert total == f.degree**n - induced_n.degree, "depth mass mismatch"
    return entries, induced_n


def is_semistable_iterate(f: MapPoint, n: int) -> bool:
    """Semistability of f^n evaluated on factored hole data."""
    entries, induced_n = holes_of_iterate(f, n)
    return _stability_verdict(entries, induced_n, f.degree**n)[0]


def depth_iterate(f: MapPoint, z, n: int) -> int:
    """d_z(f^n) by the orbit depth formula (no expansion)."""
    if is_in_Id(f):
        raise InIndeterminacy("iterate depth undefined on I(d)")
    z = pp(z)
    dec = decompose(f)
    d = f.degree
    d_z = dec.holes.depth_of(z)
    if dec.induced_degree == 0:
        return d ** (n - 1) * d_z
    total = d ** (n - 1) * d_z
    m_acc = 1
    point = z
    for k in range(1, n):
        m_acc *= local_multiplicity(dec.induced, point)
        point = eval_map(dec.induced, point)
        total += d ** (n - 1 - k) * m_acc * dec.holes.depth_of(point)
    return total


def depth_iterate_proportional(f: MapPoint, z, n: int):
    """The proportional depth d_z(f^n) / d^n as an exact Rational."""
    return rat(depth_iterate(f, z, n), f.degree**n)


def is_n_unstable(f: MapPoint, n: int) -> bool:
    """Semistable, outside I(d), with a non-semistable n-th iterate."""
    if n < 2:
        raise ValueError("n >= 2 required")
    if not is_semistable(f):
        return False
    if is_in_Id(f):
        return False
    return not is_semistable_iterate(f, n)


def bad_hole(f: MapPoint, n: int) -> HoleEntry:
    """The unique hole of f carrying at least half the depth of f^n."""
    if not is_n_unstable(f, n):
        raise NotUnstable(f"map is not in U_{n}")
    dec = decompose(f)
    entries, _ = holes_of_iterate(f, n)
    dn = f.degree**n
    by_key = {}
    for e in entries:
        by_key[e.point if e.point is not None else e.factor] = e.depth
    found = []
    for e in dec.holes.entries:
        key = e.point if e.point is not None else e.factor
        dz = by_key.get(key, 0)
        if 2 * dz >= dn:
            found.append((e, dz))
    if len(found) != 1:
        raise NonUniqueBadHole(f"{len(found)} holes at half depth")
    return found[0][0]


# -- case classification ----------------------------------------------


@dataclass(frozen=True)
class CaseTag:
    tag: str  # NotUnstable | Case0..Case5 | ConstantInduced
    bad_hole: PPoint | None = None
    bad_depth: int = 0
    orbit: tuple = ()  # distinct orbit points of the bad hole under induced
    multiplicities: tuple = ()  # m_{h_j}(induced) along the orbit
    depths: tuple = ()  # d_{h_j}(f) along the orbit
    preperiod: int | None = None
    period: int | None = None
    conjugation: Moebius | None = None
    normal_scalar: object = None  # leading scalar of the case-5 normal form

    def __str__(self):
        return self.tag


def _orbit_data(induced: MapPoint, z0: PPoint, limit: int) -> tuple:
    """(distinct orbit points up to limit, preperiod, period or None)."""
    seen = {}
    orbit = []
    point = z0
    while len(orbit) < limit:
        if point in seen:
            first = seen[point]
            return orbit, first, len(orbit) - first
        seen[point] = len(orbit)
        orbit.append(point)
        point = eval_map(induced, point)
    if point in seen:
        first = seen[point]
        return orbit, first, len(orbit) - first
    return orbit, None, None


def classify_case(f: MapPoint, n: int) -> CaseTag:
    """Case tag per the classification of n-unstable maps."""
    entry = bad_hole(f, n)  # raises NotUnstable if needed
    dec = decompose(f)
    d = f.degree
    if dec.induced_degree == 0:
        return CaseTag(
            "ConstantInduced",
            bad_hole=entry.point,
            bad_depth=entry.depth,
        )
    if entry.point is None:
        raise OrbitNotSplit("bad hole is an unsplit cluster")
    h0 = entry.point
    d_h = entry.depth
    orbit, preperiod, period = _orbit_data(dec.induced, h0, n)
    mults = tuple(local_multiplicity(dec.induced, z) for z in orbit)
    depths = tuple(dec.holes.depth_of(z) for z in orbit)
    common = dict(
        bad_hole=h0,
        bad_depth=d_h,
        orbit=tuple(orbit),
        multiplicities=mults,
        depths=depths,
        preperiod=preperiod,
        period=period,
    )
    if d_h >= 2:
        if len(orbit) >= n:
            return CaseTag("Case0", **common)
        if preperiod is not None and preperiod >= 1:
            return CaseTag("Case1", **common)
        # periodic from the start
        cycle = orbit[preperiod:]
        superattracting = any(
            local_multiplicity(dec.induced, z) >= 2 for z in cycle
        )
        if superattracting:
            return CaseTag("Case2", **common)
        return CaseTag("Case3", **common)
    # depth-1 bad hole: polynomial or monomial dichotomy
    if preperiod == 0 and period == 1:
        conj = _moebius_to_infinity(h0)
        g = conj.conjugate(dec.induced)
        _assert_polynomial_form(g, d)
        return CaseTag("Case4", conjugation=conj, **common)
    if preperiod == 0 and period == 2:
        partner = orbit[1]
        conj = _moebius_to_zero_infinity(partner, h0)
        g = conj.conjugate(dec.induced)
        scalar = _monomial_scalar(g, d)
        conj, scalar = _normalize_monomial(conj, scalar, d)
        return CaseTag("Case5", conjugation=conj, normal_scalar=scalar, **common)
    raise NormalizationFailed(
        "depth-1 bad hole neither fixed nor of period 2; "
        "contradicts the depth-1 dichotomy"
    )


def _moebius_to_infinity(h: PPoint) -> Moebius:
    """An integer Moebius map sending h to infinity (identity if already there)."""
    if h.is_infinity:
        return Moebius.identity_gauss()
    if h == PPoint(0):
        return Moebius(GR_ZERO, GR_ONE, GR_ONE, GR_ZERO)
    return Moebius(GR_ZERO, GR_ONE, GR_ONE, -h.value)


def _moebius_to_zero_infinity(a: PPoint, b: PPoint) -> Moebius:
    """A Moebius map with a -> 0 and b -> infinity."""
    if b.is_infinity:
        return Moebius(GR_ONE, -a.value, GR_ZERO, GR_ONE)
    if a.is_infinity:
        return Moebius(GR_ZERO, GR_ONE, GR_ONE, -b.value)
    return Moebius(GR_ONE, -a.value, GR_ONE, -b.value)


def _assert_polynomial_form(g: MapPoint, d: int):
    gg = decompose(g)
    if gg.h.degree != 0:
        raise NormalizationFailed("conjugated induced map is degenerate")
    qq = g.q.univariate()
    if up.pdeg(qq) > 0 or g.degree != d - 1:
        raise NormalizationFailed(
            "induced map is not a degree d-1 polynomial fixing the bad hole"
        )


def _monomial_scalar(g: MapPoint, d: int):
    """Check g = [c Y^(d-1) : X^(d-1)] and return c."""
    pp_uni = g.p.univariate()
    qq_uni = g.q.univariate()
    ok = (
        g.degree == d - 1
        and up.pdeg(pp_uni) == 0
        and up.pdeg(qq_uni) == d - 1
        and all(c.is_zero() for c in qq_uni[:-1])
    )
    if not ok:
        raise NormalizationFailed("induced map is not conjugate to c*z^-(d-1)")
    return pp_uni[0] / qq_uni[-1]


def _normalize_monomial(conj: Moebius, scalar, d: int):
    """Absorb the monomial scalar into the conjugation when a d-th root exists."""
    if scalar == GR_ONE:
        return conj, GR_ONE
    roots = nth_roots_gaussrat(scalar, d)
    if not roots:
        return conj, scalar
    u = roots[0]
    diag = Moebius(u.inv(), GR_ZERO, GR_ZERO, GR_ONE)
    return conj.then(diag), GR_ONE
