"""Degenerating families and machine-checkable indeterminacy certificates.

For a semistable degenerate map f whose n-th iterate loses semistability
(or whose constant induced value is itself a hole), the limit of the n-th
iterate along a one-parameter family through f depends on the family.  The
builders in this module construct explicit factored families g_{lambda,t}
whose coefficient reduction at the Gauss point is f, compute the exact
limits of their n-th iterates at a chosen type II point, and certify that
at least two of the limits lie in distinct conjugacy classes.  Every
quantitative claim (threshold selections, surplus bookkeeping, stability
of the limits) is re-verified with exact arithmetic rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import unipoly as up
from .berk import (
    GAUSS,
    ITERATE_DEGREE_BUDGET,
    OUT,
    Direction,
    FactoredRat,
    TypeIIPoint,
    chi,
    depths_via_surplus,
    direction_of,
    direction_toward,
    gauss_reduction,
    image_and_tangent,
    iterate_reduction,
    one_plus_pole,
    orbit_steps,
    perturb,
    reduce_at,
    res_dir,
    surplus,
    surplus_iterate,
)
from .decompose import decompose
from .errors import (
    BetaSearchExhausted,
    BudgetExceeded,
    MarginExhausted,
    NotApplicable,
    NotUnstable,
    NTooSmall,
    OrbitNotSplit,
    PropertyVerificationFailed,
    SelectionInfeasible,
    TooFewSplitHoles,
)
from .factoring import roots_gaussrat
from .gitequal import git_equal_stable
from .homog import HomogPoly, MapPoint, Moebius
from .points import INFINITY, PPoint, eval_map, moebius_three_points, pp
from .scalars import GR_ONE, GR_ZERO, GaussRat, gr, rat
from .stability import (
    classify_case,
    depth_iterate_proportional,
    is_in_Id,
    is_n_unstable,
    is_semistable,
    is_stable,
    local_multiplicity,
    mu_minus,
    mu_plus,
)
from .tpoly import TPoly, tp

DEFAULT_LAMBDAS = (gr(2), gr(3), gr(5))

N_CAP = 2**12


@dataclass(frozen=True)
class Family:
    """One branch of a certificate: maps indexed by the lambda samples.

    ``maps`` holds FactoredRat values for rational-map families, or MapPoint
    pairs over TPoly for the families of degenerate points used in the
    constant-induced case.  Parameter-free branches use ``lambdas = ()`` and
    a single map.
    """

    label: str
    lambdas: tuple
    maps: tuple
    conjugator: Moebius  # M_t, entries over TPoly
    zeta0: TypeIIPoint
    claims_stable: bool
    parameters: dict = field(default_factory=dict)

    def items(self):
        """(lambda-or-None, map) pairs."""
        if self.lambdas:
            return list(zip(self.lambdas, self.maps))
        return [(None, self.maps[0])]


@dataclass(frozen=True)
class FamilySpec:
    input: MapPoint
    n: int
    case: str
    pre_conjugation: Moebius | None  # over GaussRat; base = conj(f)
    base: MapPoint
    families: tuple
    bridges: tuple = ()  # Bridge records chaining [input] to [base]
    notes: tuple = ()


# -- shared helpers ---------------------------------------------------


def _require(cond: bool, msg: str):
    if not cond:
        raise PropertyVerificationFailed(msg)


def _factored(g: MapPoint) -> FactoredRat:
    return FactoredRat.from_gaussrat_map(g)


def _orbit_points(phi: FactoredRat, zeta0: TypeIIPoint, n: int) -> list:
    pts = [zeta0]
    for _ in range(n):
        pts.append(image_and_tangent(phi, pts[-1]).image)
    return pts


def _check_factor_invisible(phi: FactoredRat, g: FactoredRat, vertices):
    """The extra factors of g must not move images or tangents on vertices."""
    for xi in vertices:
        a = image_and_tangent(phi, xi)
        b = image_and_tangent(g, xi)
        if a.image != b.image or not (a.tangent == b.tangent):
            raise NTooSmall(f"tangent data moved at {xi}")


def _check_gauss_reduction(g, base: MapPoint):
    psi = g.to_mappoint() if isinstance(g, FactoredRat) else g
    f0, _ = gauss_reduction(psi)
    _require(f0 == base, "family does not degenerate to the input at t=0")


def _escalate(builder, start: int = 2, cap: int = N_CAP):
    """Run builder(N) with doubling N until its internal checks pass."""
    n0 = start
    last = None
    while n0 <= cap:
        try:
            return builder(n0)
        except (NTooSmall, MarginExhausted) as exc:
            last = exc
            n0 *= 2
    raise PropertyVerificationFailed(
        f"no admissible exponent below {cap}: {last}"
    )


def _as_tpoly_moebius(a, b, c, d) -> Moebius:
    return Moebius(tp(a), tp(b), tp(c), tp(d))


def _scaling_conjugator(alpha) -> Moebius:
    """M_t(z) = t^alpha * z."""
    return _as_tpoly_moebius(TPoly.t_power(alpha), 0, 0, 1)


def _affine_conjugator(h0, alpha) -> Moebius:
    """M_t(z) = h0 + t^alpha * z."""
    return _as_tpoly_moebius(TPoly.t_power(alpha), h0, 0, 1)


# -- depth-1 fixed hole (polynomial induced map) ----------------------


def _cubic_g_exponent(n: int) -> int:
    """Largest k <= n-2 with 2^(k-1) * (3^-k + 3^-n) above the lower
    stability threshold of 3^n."""
    best = None
    for k in range(0, n - 1):
        value = rat(2**k, 2) * (rat(1, 3**k) + rat(1, 3**n))
        if value > mu_minus(3**n):
            best = k
    if best is None:
        raise SelectionInfeasible("no admissible branch exponent k")
    return best


def _cubic_psi_exponent(n: int) -> int:
    """The k with (2/3)^(k+1) <= mu-(3^n) < mu+(3^n) < (2/3)^k."""
    lo, hi = mu_minus(3**n), mu_plus(3**n)
    for k in range(1, 4 * n + 1):
        if rat(2, 3) ** (k + 1) <= lo and hi < rat(2, 3) ** k:
            return k
    raise SelectionInfeasible("no admissible radius exponent k")


def _general_poly_exponent(d: int, n: int) -> int:
    """k <= n-2 splitting the depth thresholds of d^n between consecutive
    values of the orbit depth sum, for degree >= 4 polynomial induced maps."""
    mu = rat(d - 1, d)
    theta = rat(d - 3, d)
    lo, hi = mu_minus(d**n), mu_plus(d**n)
    best = None
    for k in range(0, n - 1):
        lhs = rat(2, 3) * mu ** (k + 1) + rat(1, 3) * mu ** (k + 1) * theta ** (
            n - k - 1
        )
        rhs = rat(2, 3) * mu**k + rat(1, 3) * mu**k * theta ** (n - k)
        if lhs <= lo and hi < rhs:
            best = k
    if best is None:
        raise SelectionInfeasible("no admissible branch exponent k")
    return best


def _outward_pair(zeta: TypeIIPoint) -> tuple:
    """A pole/zero pair in the infinity direction at zeta, with ratio -> 1."""
    c1 = TPoly.t_power(zeta.alpha - 1)
    c2 = c1 + TPoly.t_power(zeta.alpha)
    return c1, c2


def _attach_outward_pair(phi: FactoredRat, orbit: list, hull: list):
    """phi * (z - c2)/(z - c1) with both points beyond the last orbit vertex
    toward infinity; verifies invisibility on the hull and the +1 surplus."""
    c1, c2 = _outward_pair(orbit[-1])
    g = phi.mul(FactoredRat(1, ((c2, 1),), ((c1, 1),)))
    _check_factor_invisible(phi, g, hull)
    for xi in hull:
        if surplus(g, xi, OUT) != surplus(phi, xi, OUT) + 1:
            raise NTooSmall(f"outward surplus did not increase at {xi}")
    return g, c1, c2


def build_case4(f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS) -> FamilySpec:
    """Families for a depth-1 fixed bad hole (polynomial induced map)."""
    tag = classify_case(f, n)
    if tag.tag != "Case4":
        raise NotApplicable(f"expected a fixed depth-1 bad hole, got {tag.tag}")
    conj = tag.conjugation
    base = conj.conjugate(f).canonical()
    dec = decompose(base)
    fhat = dec.induced
    d = f.degree
    if d == 3:
        families = (
            _case4_cubic_g(base, fhat, n),
            _case4_cubic_psi(base, fhat, n),
        )
    else:
        families = (_case4_general(base, fhat, n, d, lambdas),)
    return FamilySpec(f, n, "Case4", conj, base, families)


def _case4_cubic_g(base: MapPoint, fhat: MapPoint, n: int) -> Family:
    k = _cubic_g_exponent(n)

    def build(n0):
        big_n = n0 * 2**k
        phi = _factored(fhat).mul(
            FactoredRat(
                TPoly.t_power(-big_n, -1),
                (),
                ((TPoly.t_power(-big_n), 1),),
            )
        )
        alpha0 = rat(big_n, 2**k)
        zeta0 = chi(alpha0)
        orbit = _orbit_points(phi, zeta0, n)
        g, _, _ = _attach_outward_pair(phi, orbit, orbit[:n])
        _check_gauss_reduction(g, base)
        return Family(
            "pole-branch",
            (),
            (g,),
            _scaling_conjugator(-alpha0),
            zeta0,
            claims_stable=False,
            parameters={"k": k, "N": big_n},
        )

    return _escalate(build)


def _case4_cubic_psi(base: MapPoint, fhat: MapPoint, n: int) -> Family:
    k = _cubic_psi_exponent(n)

    def build(s0):
        big_s = s0 * 2**k
        zero = TPoly.t_power(-big_s)
        pole = TPoly.t_power(-big_s) + TPoly.t_power(-big_s + 1)
        psi = _factored(fhat).mul(FactoredRat(1, ((zero, 1),), ((pole, 1),)))
        alpha0 = rat(big_s, 2**k)
        zeta0 = chi(alpha0)
        # surplus ledger: the marked direction res(1) at zeta0 reaches the
        # inserted zero after k doubling steps and carries 1/3^(k+1)
        _, prop = surplus_iterate(psi, zeta0, res_dir(1), n)
        if prop != rat(1, 3 ** (k + 1)):
            raise NTooSmall(f"marked surplus {prop} != 1/3^{k + 1}")
        _check_gauss_reduction(psi, base)
        return Family(
            "zero-pole-branch",
            (),
            (psi,),
            _scaling_conjugator(-alpha0),
            zeta0,
            claims_stable=True,
            parameters={"k_tilde": k, "S": big_s},
        )

    return _escalate(build)


def _case4_general(
    base: MapPoint, fhat: MapPoint, n: int, d: int, lambdas
) -> Family:
    k = _general_poly_exponent(d, n)

    def build(n0):
        big_n = n0 * (d - 1) ** k
        alpha0 = rat(big_n, (d - 1) ** k)
        zeta0 = chi(alpha0)
        maps = []
        orbits = []
        for lam in lambdas:
            unit = TPoly.t_power(-2 * big_n, lam.inv())
            poles = (
                (TPoly.t_power(-big_n), 1),
                (TPoly.t_power(-big_n, lam.inv()), 1),
            )
            phi = _factored(fhat).mul(FactoredRat(unit, (), poles))
            orbit = _orbit_points(phi, zeta0, n)
            g, _, _ = _attach_outward_pair(phi, orbit, orbit[:n])
            _check_gauss_reduction(g, base)
            maps.append(g)
            orbits.append(tuple(orbit))
        if len(set(orbits)) != 1:
            raise NTooSmall("orbit depends on the family parameter")
        return Family(
            "two-pole-branch",
            tuple(lambdas),
            tuple(maps),
            _scaling_conjugator(-alpha0),
            zeta0,
            claims_stable=True,
            parameters={"k": k, "N": big_n},
        )

    return _escalate(build)


# -- constant induced map ---------------------------------------------


@dataclass(frozen=True)
class Bridge:
    """Witnesses that [source] and [target] share a boundary class.

    ``reduce_at(source, conjugator)`` must equal ``target`` with ``target``
    semistable, so the target lies in the orbit closure of the source.
    """

    source: MapPoint  # over GaussRat
    target: MapPoint  # over GaussRat, semistable
    conjugator: Moebius  # entries over TPoly (constants allowed)

    def verify(self):
        got = reduce_at(self.source, self.conjugator)
        _require(got == self.target, "bridge reduction mismatch")
        _require(is_semistable(self.target), "bridge target not semistable")


def _constant_value_point(induced: MapPoint) -> PPoint:
    a = induced.p.coeffs[0]
    b = induced.q.coeffs[0]
    if b.is_zero():
        return INFINITY
    return PPoint(a / b)


def _shifted_monomial(k: HomogPoly, a: int, b: int) -> HomogPoly:
    """X^a * Y^b * k."""
    zero = k.coeffs[0] - k.coeffs[0]
    coeffs = [zero] * a + list(k.coeffs) + [zero] * b
    return HomogPoly(k.degree + a + b, coeffs)


def _zero_pair(q: HomogPoly) -> MapPoint:
    """The wholly degenerate point [0 : q]."""
    zero = q.coeffs[0] - q.coeffs[0]
    return MapPoint(HomogPoly(q.degree, [zero] * (q.degree + 1)), q)


def build_constant(f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS) -> FamilySpec:
    """Families for maps whose induced map is constant."""
    dec = decompose(f)
    if dec.induced_degree != 0:
        raise NotApplicable("induced map is not constant")
    _require(is_semistable(f), "input must be semistable")
    v = _constant_value_point(dec.induced)
    if is_stable(f) and is_in_Id(f):
        return _constant_stable(f, n, dec, v)
    return _constant_delegate(f, n, dec, v, lambdas)


def _constant_stable(f: MapPoint, n: int, dec, v: PPoint) -> FamilySpec:
    d = f.degree
    _require(d >= 4, "stable maps of degree < 4 cannot be degenerate")
    others = [p for p, _ in dec.holes.split_points() if p != v]
    if len(others) < 2:
        raise OrbitNotSplit("need two split holes besides the constant value")
    conj = moebius_three_points((v, others[0], others[1]), (pp(0), INFINITY, pp(1)))
    base = conj.conjugate(f).canonical()
    _require(base.p.is_zero(), "normalization did not send the value to 0")
    h = base.q  # hole polynomial of the normalized map
    bdec = decompose(base)
    d0 = bdec.holes.depth_of(pp(0))
    dinf = bdec.holes.depth_of(INFINITY)
    _require(d0 >= 1 and dinf >= 1, "normalized map must have holes at 0 and infinity")

    t1 = TPoly.t_power(1)
    ht = HomogPoly(d, [tp(c) for c in h.coeffs])
    g_t = MapPoint(ht.scale(t1), ht)
    core = HomogPoly(d - d0 - dinf, h.coeffs[d0 : d + 1 - dinf])
    # numerator t * X * (H / Y); the denominator keeps the full H
    h_over_y = HomogPoly(d - 1, [tp(c) * t1 for c in h.coeffs[:d]])
    h_t = MapPoint(_shifted_monomial(h_over_y, 1, 0), ht)
    for fam_map in (g_t, h_t):
        _check_gauss_reduction(fam_map, base)

    dn1 = d ** (n - 1)
    g_closed = _zero_pair(h.pow(dn1)).canonical()
    a_h = d0 * (d**n - 1) // (d - 1)
    b_h = dn1 * dinf - d0 * (dn1 - 1) // (d - 1)
    _require(b_h >= 0, "closed-form exponent bookkeeping failed")
    h_closed = _zero_pair(_shifted_monomial(core.pow(dn1), a_h, b_h)).canonical()
    _require(is_stable(g_closed), "first closed-form limit is not stable")
    _require(is_stable(h_closed), "second closed-form limit is not stable")

    ident = Moebius.identity_tpoly()
    fam_g = Family(
        "scaled-value",
        (),
        (g_t,),
        ident,
        GAUSS,
        claims_stable=True,
        parameters={"closed_form": g_closed, "d0_n": d0 * dn1},
    )
    fam_h = Family(
        "tilted-value",
        (),
        (h_t,),
        ident,
        GAUSS,
        claims_stable=True,
        parameters={"closed_form": h_closed, "d0_n": a_h},
    )
    return FamilySpec(f, n, "ConstantStable", conj, base, (fam_g, fam_h))


def _constant_delegate(f: MapPoint, n: int, dec, v: PPoint, lambdas) -> FamilySpec:
    """Strictly semistable constant-induced input: route the certificate
    through a boundary-equal map with nonconstant induced map."""
    d = f.degree
    if d % 2 == 0 or d < 3:
        raise NotApplicable("delegation requires odd degree >= 3")
    hd = (d + 1) // 2
    deep = [p for p, m in dec.holes.split_points() if m == hd]
    if len(deep) != 1:
        raise NotApplicable("expected a unique hole of depth (d+1)/2")
    deep = deep[0]
    spare = gr(0)
    while pp(spare) == deep or pp(spare) == v or dec.holes.depth_of(pp(spare)) > 0:
        spare = spare + 1
    if deep != v:
        conj = moebius_three_points((deep, v, pp(spare)), (pp(0), INFINITY, pp(1)))
        w = 1
    else:
        spare2 = spare + 1
        while pp(spare2) == deep or dec.holes.depth_of(pp(spare2)) > 0:
            spare2 = spare2 + 1
        conj = moebius_three_points((deep, pp(spare), pp(spare2)), (INFINITY, pp(0), pp(1)))
        w = -1
    fprime = conj.conjugate(f).canonical()
    _require(fprime.q.is_zero(), "normalization did not send the value to infinity")

    a = hd if w == 1 else d - hd
    f_mid = MapPoint(
        _shifted_monomial(HomogPoly(0, [GR_ONE]), a, d - a),
        HomogPoly(d, [GR_ZERO] * (d + 1)),
    ).canonical()
    bridge_in = Bridge(fprime, f_mid, _scaling_conjugator(w))
    bridge_in.verify()

    # boundary-equal map with nonconstant induced part z^2
    if w == 1:
        g_p = _shifted_monomial(HomogPoly(0, [GR_ONE]), (d + 1) // 2, (d - 1) // 2)
        g_q = _shifted_monomial(HomogPoly(0, [GR_ONE]), (d - 3) // 2, (d + 3) // 2)
    else:
        g_p = _shifted_monomial(HomogPoly(0, [GR_ONE]), (d + 3) // 2, (d - 3) // 2)
        g_q = _shifted_monomial(HomogPoly(0, [GR_ONE]), (d - 1) // 2, (d + 1) // 2)
    g_map = MapPoint(g_p, g_q).canonical()
    bridge_out = Bridge(g_map, f_mid, _scaling_conjugator(-w))
    bridge_out.verify()

    inner = build_family_spec(g_map, n, lambdas)
    bridges = (bridge_in, bridge_out) + inner.bridges
    if inner.pre_conjugation is not None:
        bridges = bridges + (
            Bridge(
                g_map,
                inner.base,
                Moebius(
                    tp(inner.pre_conjugation.a),
                    tp(inner.pre_conjugation.b),
                    tp(inner.pre_conjugation.c),
                    tp(inner.pre_conjugation.d),
                ),
            ),
        )
    return FamilySpec(
        f,
        n,
        f"ConstantDelegated({inner.case})",
        conj,
        inner.base,
        inner.families,
        bridges=bridges,
        notes=inner.notes,
    )


# -- dispatcher -------------------------------------------------------


def build_family_spec(
    f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS, salt: int = 0
) -> FamilySpec:
    """Build the certificate families for a semistable map whose n-th
    iterate is not semistable, or whose constant induced value is a hole."""
    if not is_semistable(f):
        raise NotApplicable("input must be semistable")
    dec = decompose(f)
    if dec.induced_degree == 0:
        return build_constant(f, n, lambdas)
    if not is_n_unstable(f, n):
        raise NotApplicable("n-th iterate stays semistable")
    tag = classify_case(f, n)
    if tag.tag == "Case1":
        return build_case1(f, n, lambdas, salt)
    if tag.tag in ("Case0", "Case2"):
        return build_case02(f, n, lambdas, salt)
    if tag.tag == "Case3":
        return build_case3(f, n, lambdas, salt)
    if tag.tag == "Case4":
        return build_case4(f, n, lambdas)
    if tag.tag == "Case5":
        return build_case5(f, n, lambdas)
    raise NotApplicable(f"no construction for {tag.tag}")


# -- shared pole placement --------------------------------------------


def _pole_near(h: PPoint, c) -> TPoly:
    """A point at distance |t| from the hole h (for h = infinity, a point
    of absolute value |t|^-1 with residue data c)."""
    c = gr(c)
    if h.is_infinity:
        if c.is_zero():
            raise ValueError("residue 0 not allowed near infinity")
        return TPoly.t_power(-1, GR_ONE / c)
    return tp(h.value) + TPoly.t_power(1, c)


def _residue_stream(skip, salt: int = 0):
    """Deterministic stream of integer residues avoiding a skip set.

    The salt offsets the starting point; the certificate layer bumps it when
    a residue choice happens to make two family members conjugate.
    """
    c = 1 + salt
    skip = {gr(s) for s in skip}
    while True:
        if gr(c) not in skip:
            yield gr(c)
        c += 1


def _ensure_finite_bad_hole(f: MapPoint, tag):
    """Conjugate by 1/z when the bad hole sits at infinity."""
    if tag.bad_hole is None:
        raise OrbitNotSplit("bad hole is an unsplit cluster")
    if not tag.bad_hole.is_infinity:
        return f, None
    s = Moebius(GR_ZERO, GR_ONE, GR_ONE, GR_ZERO)
    return s.conjugate(f).canonical(), s


def _split_hole_entries(dec):
    for e in dec.holes.entries:
        if e.point is None:
            raise OrbitNotSplit("hole cluster does not split over Q(i)")
    return [(e.point, e.depth) for e in dec.holes.entries]


def _orbit_level_poles(dec, orbit, depths, h0_residues, skip, salt=0):
    """Level-1 poles: around h_j (j >= 1) and around every non-orbit hole,
    as many poles as the depth; h0 gets the explicit residues."""
    stream = _residue_stream(skip, salt)
    poles = [(orbit[0], r) for r in h0_residues]
    for h, depth in _split_hole_entries(dec):
        if h == orbit[0]:
            continue
        count = depth
        for _ in range(count):
            poles.append((h, next(stream)))
    return [_pole_near(h, c) for h, c in poles]


def _marked_surplus_checks(g, phi, zeta0, marked, n, d):
    """Each marked pole direction carries proportional iterate surplus 1/d."""
    for p in marked:
        v = direction_of(zeta0, p)
        _, prop = surplus_iterate(g, zeta0, v, n)
        if prop != rat(1, d):
            raise NTooSmall(f"marked direction {v} carries {prop}, wanted 1/{d}")


# -- strictly preperiodic bad hole ------------------------------------


def build_case1(
    f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS, salt: int = 0
) -> FamilySpec:
    """Family for a strictly preperiodic bad hole with total orbit depth
    at least 3 (forcing degree at least 5)."""
    tag = classify_case(f, n)
    if tag.tag != "Case1":
        raise NotApplicable(f"expected a strictly preperiodic bad hole, got {tag.tag}")
    base, pre = _ensure_finite_bad_hole(f, tag)
    if pre is not None:
        tag = classify_case(base, n)
    dec = decompose(base)
    d = base.degree
    h0 = tag.bad_hole
    d0 = tag.bad_depth
    _require(d0 >= 2, "bad hole of a preperiodic orbit must have depth >= 2")
    zeta0 = TypeIIPoint(tp(h0.value), 1)
    phi = _factored(dec.induced)
    orbit_pts = _orbit_points(phi, zeta0, n)
    hull = [GAUSS]
    for xi in orbit_pts[:n]:
        if xi not in hull:
            hull.append(xi)

    def build(big_n):
        maps = []
        orbits = []
        for lam in lambdas:
            # extra poles are shared across the family parameter so that
            # only the marked pole varies with lambda
            stream = _residue_stream({0, 1, *lambdas}, salt)
            h0_res = [gr(1), lam] + [next(stream) for _ in range(d0 - 2)]
            poles = _orbit_level_poles(
                dec, tag.orbit, tag.depths, h0_res, {0, *lambdas}, salt
            )
            g = perturb(phi, poles, hull, big_n)
            _check_gauss_reduction(g, base)
            _marked_surplus_checks(
                g, phi, zeta0, [_pole_near(h0, r) for r in h0_res], n, d
            )
            # the hole-ward and outward directions stay below the lower
            # stability threshold, so the limit is stable
            _, toward_hole = surplus_iterate(g, zeta0, res_dir(0), n)
            if not toward_hole <= mu_minus(d**n):
                raise NTooSmall(f"hole-ward surplus {toward_hole} too large")
            steps = orbit_steps(g, zeta0, OUT, n)
            from .berk import iterate_multiplicity

            m_bar = rat(iterate_multiplicity(steps), d**n)
            _, s_out = surplus_iterate(g, zeta0, OUT, n)
            if not m_bar + s_out < mu_minus(d**n):
                raise NTooSmall(f"outward mass {m_bar + s_out} too large")
            maps.append(g)
            orbits.append(tuple(_orbit_points(g, zeta0, n)))
        if len(set(orbits)) != 1:
            raise NTooSmall("orbit depends on the family parameter")
        return Family(
            "marked-pole",
            tuple(lambdas),
            tuple(maps),
            _affine_conjugator(h0.value, 1),
            zeta0,
            parameters={"N": big_n, "d0": d0},
            claims_stable=True,
        )

    fam = _escalate(build)
    return FamilySpec(f, n, "Case1", pre, base, (fam,))


# -- periodic or non-returning bad hole -------------------------------


def _case02_selection(d: int, n: int, ell: int, nus, depths_orbit, fixes: bool):
    """(k_star, q_star, r_star, d_plus, mu_list, m_bar) for the two-level
    pole arrangement, or SelectionInfeasible."""
    mu = [rat(0)]
    for i in range(1, n + 1):
        j = i - 1
        mu.append(mu[-1] + rat(depths_orbit[j % ell], d) * rat(nus[j], d**j))
    lo, hi = mu_minus(d**n), mu_plus(d**n)
    k_star = None
    for k in range(1, n + 1):
        ok = mu[k] < hi if fixes else mu[k] <= hi
        if ok:
            k_star = k
    if k_star is None:
        raise SelectionInfeasible("no admissible truncation index k")
    q_star, r_star = divmod(k_star, ell)
    m_bar = rat(nus[k_star], d**k_star)
    d_plus = None
    lo_bound = 2 if r_star == 0 else 0
    for cand in range(lo_bound, depths_orbit[r_star] + 1):
        left = mu[k_star] + rat(cand - 2, d) * m_bar
        right = mu[k_star] + rat(cand, d) * m_bar
        if fixes:
            ok = left < lo and hi <= right
        else:
            ok = left <= lo and hi < right
        if ok:
            d_plus = cand
            break
    if d_plus is None:
        raise SelectionInfeasible("no admissible pole split d+")
    return k_star, q_star, r_star, d_plus, mu, m_bar


def build_case02(
    f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS, salt: int = 0
) -> FamilySpec:
    """Family for a periodic bad hole, or one whose orbit does not return
    within n steps.  When the two-level pole arrangement is infeasible the
    construction falls back to the exceptional inversion-cycle family."""
    tag = classify_case(f, n)
    if tag.tag not in ("Case0", "Case2"):
        raise NotApplicable(f"expected a periodic or non-returning bad hole, got {tag.tag}")
    base, pre = _ensure_finite_bad_hole(f, tag)
    if pre is not None:
        tag = classify_case(base, n)
    dec = decompose(base)
    d = base.degree
    h0 = tag.bad_hole
    orbit = tag.orbit
    if any(p is None for p in orbit):
        raise OrbitNotSplit("orbit does not split over Q(i)")
    ell = tag.period if (tag.preperiod == 0 and tag.period is not None and tag.period < n) else n
    ell = min(ell, len(orbit))
    mults = tag.multiplicities
    depths_orbit = [tag.depths[j % len(orbit)] for j in range(ell)]
    nus = [1]
    for j in range(n):
        nus.append(nus[-1] * mults[j % len(mults)])
    fixes = tag.preperiod == 0 and tag.period is not None and n % tag.period == 0
    try:
        k_star, q_star, r_star, d_plus, mu, m_bar = _case02_selection(
            d, n, ell, nus, depths_orbit, fixes
        )
    except SelectionInfeasible:
        spec = _case3_exceptional_fallback(f, n, lambdas, salt)
        if spec is not None:
            return spec
        raise
    d_minus = depths_orbit[r_star] - d_plus
    _require(d_minus >= 0, "pole split exceeds the hole depth")
    delta = mu[k_star] + rat(d_plus, d) * m_bar

    zeta0 = TypeIIPoint(tp(h0.value), 2)
    phi = _factored(dec.induced)
    hull = [GAUSS]
    for xi in _orbit_points(phi, zeta0, n)[:n]:
        if xi not in hull:
            hull.append(xi)

    def level_point(r: int, shift: int) -> TPoly:
        """h_r + t^(2 nu_r + shift)."""
        h = orbit[r]
        expo = 2 * nus[r] + shift
        if h.is_infinity:
            return TPoly.t_power(-expo)
        return tp(h.value) + TPoly.t_power(expo)

    def marked_point(c) -> TPoly:
        expo = 2 * nus[q_star * ell]
        if h0.is_infinity:
            return TPoly.t_power(-expo, GR_ONE / gr(c))
        return tp(h0.value) + TPoly.t_power(expo, c)

    def build(big_n):
        maps = []
        orbits = []
        for lam in lambdas:
            poles = [marked_point(1), marked_point(lam)]
            if r_star == 0:
                poles += [level_point(0, 1)] * (d_plus - 2)
                poles += [level_point(0, -1)] * d_minus
                for r in range(1, ell):
                    poles += [level_point(r, -1)] * depths_orbit[r]
            else:
                poles += [level_point(0, 1)] * (depths_orbit[0] - 2)
                poles += [level_point(r_star, 1)] * d_plus
                poles += [level_point(r_star, -1)] * d_minus
                for r in range(1, ell):
                    if r == r_star:
                        continue
                    side = 1 if r < r_star else -1
                    poles += [level_point(r, side)] * depths_orbit[r]
            stream = _residue_stream({0, *lambdas}, salt)
            orbit_set = set(orbit[:ell])
            for h, depth in _split_hole_entries(dec):
                if h in orbit_set:
                    continue
                for _ in range(depth):
                    poles.append(_pole_near(h, next(stream)))
            g = perturb(phi, poles, hull, big_n)
            _check_gauss_reduction(g, base)
            d_out = rat(depths_via_surplus(g, zeta0, n, OUT), d**n)
            if d_out != 1 - delta:
                raise NTooSmall(f"outward mass {d_out} != {1 - delta}")
            maps.append(g)
            orbits.append(tuple(_orbit_points(g, zeta0, n)))
        if len(set(orbits)) != 1:
            raise NTooSmall("orbit depends on the family parameter")
        return Family(
            "two-level",
            tuple(lambdas),
            tuple(maps),
            _affine_conjugator(h0.value, 2),
            zeta0,
            claims_stable=True,
            parameters={
                "N": big_n,
                "k_star": k_star,
                "d_plus": d_plus,
                "salt": salt,
            },
        )

    fam = _escalate(build, start=8)
    return FamilySpec(f, n, tag.tag, pre, base, (fam,))


def _case3_exceptional_fallback(f, n, lambdas, salt):
    """Route an infeasible two-level selection to the inversion-cycle family
    when its hypotheses hold; returns None otherwise."""
    try:
        return build_case3_exceptional(f, n, lambdas, salt)
    except NotApplicable:
        return None


# -- periodic bad hole, multiplicity-free cycle -----------------------


def _pole_toward_center(phi: FactoredRat, h: PPoint, big_n: int) -> TPoly:
    """A pole in the center-ward direction at the level-1 vertex over h,
    nudged off the hole point when it would land on a zero of the map."""
    if h.is_infinity:
        return TPoly.t_power(-(big_n + 1))
    p = tp(h.value)
    nv, _ = phi.eval(p)
    if nv.is_zero():
        p = p + TPoly.t_power(big_n + 1)
    return p


def build_case3(
    f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS, salt: int = 0
) -> FamilySpec:
    """Family for a periodic bad hole whose cycle is multiplicity-free,
    with all perturbing poles on the level-1 circles of the orbit."""
    tag = classify_case(f, n)
    if tag.tag != "Case3":
        raise NotApplicable(f"expected a multiplicity-free cycle, got {tag.tag}")
    if _case3_is_exceptional(f, tag):
        return build_case3_exceptional(f, n, lambdas, salt)
    base, pre = _ensure_finite_bad_hole(f, tag)
    if pre is not None:
        tag = classify_case(base, n)
    dec = decompose(base)
    d = base.degree
    h0 = tag.bad_hole
    orbit = tag.orbit
    if any(p is None for p in orbit):
        raise OrbitNotSplit("orbit does not split over Q(i)")
    depths_orbit = tag.depths
    d0 = tag.bad_depth
    _require(d0 >= 1, "bad hole must be a hole")
    zeta0 = TypeIIPoint(tp(h0.value), 1)
    phi = _factored(dec.induced)
    hull = [GAUSS]
    for xi in _orbit_points(phi, zeta0, n)[:n]:
        if xi not in hull:
            hull.append(xi)
    j0 = None
    if d0 == 2:
        for j in range(1, len(orbit)):
            if depths_orbit[j] > 0:
                j0 = j
                break

    def build(big_n):
        maps = []
        orbits = []
        for lam in lambdas:
            poles = []
            stream0 = _residue_stream({0, 1, *lambdas}, salt)
            h0_res = [lam, gr(1)]
            if d0 >= 3:
                poles.append(_pole_toward_center(phi, h0, big_n))
                h0_res += [next(stream0) for _ in range(d0 - 3)]
            else:
                h0_res += [next(stream0) for _ in range(d0 - 2)]
            poles += [_pole_near(h0, c) for c in h0_res]
            for j in range(1, len(orbit)):
                dj = depths_orbit[j]
                if dj == 0:
                    continue
                stream = _residue_stream({0, *lambdas}, salt)
                res = []
                if j == j0:
                    poles.append(_pole_toward_center(phi, orbit[j], big_n))
                    dj -= 1
                res += [next(stream) for _ in range(dj)]
                poles += [_pole_near(orbit[j], c) for c in res]
            stream = _residue_stream({0, *lambdas}, salt)
            orbit_set = set(orbit)
            for h, depth in _split_hole_entries(dec):
                if h in orbit_set:
                    continue
                for _ in range(depth):
                    poles.append(_pole_near(h, next(stream)))
            g = perturb(phi, poles, hull, big_n)
            _check_gauss_reduction(g, base)
            _, s_out = surplus_iterate(g, zeta0, OUT, n)
            expected = 1 - rat(1, d**n) - depth_iterate_proportional(base, h0, n)
            if s_out != expected:
                raise NTooSmall(f"outward surplus {s_out} != {expected}")
            maps.append(g)
            orbits.append(tuple(_orbit_points(g, zeta0, n)))
        if len(set(orbits)) != 1:
            raise NTooSmall("orbit depends on the family parameter")
        return Family(
            "level-one",
            tuple(lambdas),
            tuple(maps),
            _affine_conjugator(h0.value, 1),
            zeta0,
            claims_stable=True,
            parameters={"N": big_n, "salt": salt},
        )

    fam = _escalate(build)
    return FamilySpec(f, n, "Case3", pre, base, (fam,))


def _case3_is_exceptional(f: MapPoint, tag) -> bool:
    """Degree 3 or 4 with a depth-2 bad hole on a multiplicity-free cycle
    whose other points carry no depth: the level-1 arrangement has no room
    and the inversion-cycle family takes over."""
    if f.degree not in (3, 4):
        return False
    if tag.bad_depth != 2:
        return False
    return all(dz == 0 for dz in tag.depths[1:])


# -- exceptional shape: depth-2 hole on an otherwise depthless cycle --


def _direction_value(v: Direction) -> PPoint:
    return INFINITY if v.is_out else PPoint(v.res)


def _finite_roots(poly: list) -> list:
    """Q(i) roots of a univariate coefficient list, sorted deterministically."""
    return sorted((PPoint(r) for r, _ in roots_gaussrat(poly)), key=str)


def _map_preimages(g: MapPoint, value: PPoint) -> list:
    p, q = g.p.univariate(), g.q.univariate()
    if value.is_infinity:
        return _finite_roots(q)
    return _finite_roots(up.psub(p, up.pscale(q, value.value)))


def _finite_critical_points(g: MapPoint) -> list | None:
    """Critical points of a degree-2 map when they all lie in Q(i) u {oo}."""
    p, q = g.p.univariate(), g.q.univariate()
    w = up.pnorm(up.psub(up.pmul(up.pderiv(p), q), up.pmul(p, up.pderiv(q))))
    deg = up.pdeg(w)
    roots = roots_gaussrat(w)
    total = sum(m for _, m in roots)
    if total < deg:
        return None  # an irrational critical point
    out = [PPoint(r) for r, _ in roots]
    if deg < 2:
        out.append(INFINITY)
    return out


def build_case3_exceptional(
    f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS, salt: int = 0
) -> FamilySpec:
    """Family for a depth-2 bad hole on a cycle whose other points carry no
    depth (degree 3 or 4).  A preliminary zero/pole pair at level 1 makes the
    local degree at the hole vertex equal to 2; its residue parameter is
    chosen so the critical directions never meet the Gauss direction along
    the cycle, and the marked lambda-pair is placed by an affine rule in the
    resulting direction coordinate."""
    from .stability import _moebius_to_zero_infinity

    if not is_semistable(f):
        raise NotApplicable("input is not semistable")
    if f.degree not in (3, 4):
        raise NotApplicable("exceptional shape needs degree 3 or 4")
    if not is_n_unstable(f, n):
        raise NotApplicable("iterate does not lose semistability")
    dec_f = decompose(f)
    h0 = None
    cycle = None
    for h, depth in _split_hole_entries(dec_f):
        if depth != 2:
            continue
        orbit = [h]
        for _ in range(f.degree + 2):
            orbit.append(eval_map(dec_f.induced, orbit[-1]))
            if orbit[-1] == h:
                break
        if orbit[-1] != h or len(orbit) < 3:
            continue
        pts = orbit[:-1]
        if all(dec_f.holes.depth_of(p) == 0 for p in pts[1:]):
            h0, cycle = h, pts
            break
    if h0 is None:
        raise NotApplicable("no depth-2 hole on a depthless cycle")
    ell = len(cycle)

    pre = None
    base = f
    if cycle[0] != pp(0) or cycle[1] != INFINITY:
        pre = _moebius_to_zero_infinity(cycle[0], cycle[1])
        base = pre.conjugate(f).canonical()
    dec = decompose(base)
    _require(dec.holes.depth_of(pp(0)) == 2, "normalization lost the bad hole")
    fhat = dec.induced
    d = base.degree
    zeta0 = TypeIIPoint(tp(0), 1)
    d0_prop = depth_iterate_proportional(base, pp(0), n)

    def phi_for(beta):
        zero = TPoly.t_power(1, 1 - beta * beta)
        pole = TPoly.t_power(1)
        return _factored(fhat).mul(FactoredRat(1, ((zero, 1),), ((pole, 1),)))

    def vertex_data(phi):
        """Cycle vertices, tangent maps and Gauss-direction values, or None
        if the vertex cycle does not close with local degrees (2,1,...,1)."""
        pts, tans = [zeta0], []
        for j in range(ell):
            td = image_and_tangent(phi, pts[-1])
            if td.local_degree != (2 if j == 0 else 1):
                return None
            tans.append(td.tangent)
            pts.append(td.image)
        if pts[ell] != zeta0:
            return None
        gauss_vals = [
            _direction_value(direction_toward(pts[j], GAUSS)) for j in range(ell)
        ]
        return pts[:ell], tans, gauss_vals

    def admissible(phi, td0, value):
        v = res_dir(value.value) if not value.is_infinity else OUT
        return (
            not value.is_infinity
            and surplus(phi, zeta0, v) == 0
            and td0.direction_multiplicity(v) == 1
        )

    def beta_stream():
        # residues with 1 - beta^2 a rational square, so the two critical
        # directions of the degree-2 tangent map lie in Q(i)
        seen = set()
        skip = salt
        for m in range(2, 24):
            for k in range(1, m):
                for num in (2 * m * k, m * m - k * k):
                    b = rat(num, m * m + k * k)
                    if not (0 < b < 1) or b in seen:
                        continue
                    seen.add(b)
                    if skip > 0:
                        skip -= 1
                        continue
                    yield gr(b)

    def select_beta():
        for beta in beta_stream():
            phi = phi_for(beta)
            data = vertex_data(phi)
            if data is None:
                continue
            _, tans, gauss_vals = data
            crits = _finite_critical_points(tans[0])
            if crits is None:
                continue
            # critical directions must avoid the Gauss direction for n steps
            ok = True
            for c in crits:
                v = c
                for j in range(n):
                    v = eval_map(tans[j % ell], v)
                    if v == gauss_vals[(j + 1) % ell]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            q = tans[0]
            for j in range(1, ell):
                q = tans[j].compose(q)
            td0 = image_and_tangent(phi, zeta0)

            def q_pow(v, k_steps):
                for _ in range(k_steps):
                    v = eval_map(q, v)
                return v

            # directions at the hole vertex whose image is the Gauss
            # direction at the next vertex; the marked pair must stay off
            # their orbits so the surplus bookkeeping stays clean
            w1s = _map_preimages(tans[0], gauss_vals[1])
            for shift in range(8):
                a0 = gr(shift)
                good = True
                for lam in lambdas:
                    a = PPoint(a0 + lam)
                    if not admissible(phi, td0, a):
                        good = False
                        break
                    k_ = 1
                    while good and k_ * ell < n:
                        uk = q_pow(a, k_)
                        if uk == a or uk in w1s or uk in crits:
                            good = False
                        if any(q_pow(c, k_) == a for c in crits):
                            good = False
                        k_ += 1
                    if not good:
                        break
                if good:
                    return beta, phi, a0
        raise BetaSearchExhausted("no admissible residue parameter found")

    beta, phi, a0 = select_beta()
    orbit_pts = vertex_data(phi)[0]
    hull = [GAUSS]
    for xi in orbit_pts:
        if xi not in hull:
            hull.append(xi)
    gamma_holes = [
        (h, depth) for h, depth in _split_hole_entries(dec) if h != pp(0)
    ]

    def build(big_n):
        maps = []
        orbits = []
        marks = []
        for lam in lambdas:
            a = a0 + lam
            g = phi
            for h, depth in gamma_holes:
                if h.is_infinity:
                    raise NotApplicable("non-orbit hole at infinity")
                for _ in range(depth):
                    g = g.mul(one_plus_pole(tp(h.value), big_n))
            at = TPoly.t_power(1, a)
            step = TPoly.t_power(big_n)
            g = g.mul(FactoredRat(1, ((at - step, 1),), ((at + step, 1),)))
            _check_factor_invisible(phi, g, hull)
            _check_gauss_reduction(g, base)
            if surplus(g, zeta0, res_dir(a)) != 1:
                raise NTooSmall("marked pair carries the wrong surplus")
            _, s_mark = surplus_iterate(g, zeta0, res_dir(a), n)
            if s_mark != rat(1, d):
                raise NTooSmall(f"marked-direction mass {s_mark} != 1/{d}")
            _, s_out = surplus_iterate(g, zeta0, OUT, n)
            expected = 1 - rat(1, d**n) - d0_prop
            if s_out != expected:
                raise NTooSmall(f"outward surplus {s_out} != {expected}")
            maps.append(g)
            orbits.append(tuple(_orbit_points(g, zeta0, n)))
            marks.append(a)
        if len(set(orbits)) != 1:
            raise NTooSmall("orbit depends on the family parameter")
        _require(len(set(map(str, marks))) == len(marks), "marked directions collide")
        return Family(
            "inversion-cycle",
            tuple(lambdas),
            tuple(maps),
            _affine_conjugator(GR_ZERO, 1),
            zeta0,
            claims_stable=True,
            parameters={
                "N": big_n,
                "beta": str(beta),
                "mark_offset": str(a0),
                "salt": salt,
            },
        )

    fam = _escalate(build, start=4)
    return FamilySpec(f, n, "Case3Exceptional", pre, base, (fam,))


# -- depth-1 period-2 bad hole (monomial induced map) -----------------


def _case5_ak(d: int, n: int, k: int):
    """Outward-direction mass of the n-th iterate when the branch switches
    levels after k steps; the cubic tangent on the far side has degree 1."""
    m = (n + 1) // 2
    mu = rat(d - 1, d)
    theta = rat(max(d - 3, 1), d)
    first = sum(mu ** (2 * j) for j in range(k // 2 + 1))
    second = mu**k * sum((mu * theta) ** j for j in range(1, m - k // 2))
    return rat(first + second, d)


def _case5_exponent(d: int, n: int) -> int:
    m = (n + 1) // 2
    lo, hi = mu_minus(d**n), mu_plus(d**n)
    for k in range(0, 2 * m - 1, 2):
        a_lo = _case5_ak(d, n, k)
        a_hi = _case5_ak(d, n, k + 2)
        if n % 2 == 0 and a_lo < lo and hi <= a_hi:
            return k
        if n % 2 == 1 and a_lo <= lo and hi < a_hi:
            return k
    raise SelectionInfeasible("no admissible branch exponent k")


def _case5_psi_partial(kappa: int):
    return rat(sum(rat(4, 9) ** j for j in range(kappa)), 3)


def _case5_psi_exponent(n: int) -> int:
    lo, hi = mu_minus(3**n), mu_plus(3**n)
    for k in range(2, n, 2):
        s_lo = _case5_psi_partial(k // 2)
        s_hi = _case5_psi_partial(k // 2 + 1)
        if n % 2 == 0 and s_lo < lo and hi <= s_hi:
            return k
        if n % 2 == 1 and s_lo <= lo and hi < s_hi:
            return k
    raise SelectionInfeasible("no admissible radius exponent k")


def _case5_marked_mass(d: int, n: int, k: int):
    """Mass of a direction that reaches a level-switch zero after k steps."""
    m = (n + 1) // 2
    mu = rat(d - 1, d)
    theta = rat(max(d - 3, 1), d)
    total = sum(mu**j * theta ** (j - 1) for j in range(1, m - k // 2))
    return rat(total, d ** (k + 2))


def build_case5(f: MapPoint, n: int, lambdas=DEFAULT_LAMBDAS) -> FamilySpec:
    """Families for a depth-1 bad hole of period 2 (induced map a negative
    power of the coordinate, normalized so the hole sits at infinity)."""
    tag = classify_case(f, n)
    if tag.tag != "Case5":
        raise NotApplicable(f"expected a period-2 depth-1 hole, got {tag.tag}")
    _require(n >= 3, "second-level mass forces at least three iterations")
    conj = tag.conjugation
    base = conj.conjugate(f).canonical()
    dec = decompose(base)
    d = base.degree
    _require(dec.holes.depth_of(INFINITY) == 1, "normalized hole not at infinity")
    monomial = MapPoint.from_coeff_lists(
        [gr(1)] + [GR_ZERO] * (d - 1), [GR_ZERO] * (d - 1) + [gr(1)]
    )
    _require(dec.induced == monomial, "induced map is not 1/z^(d-1)")
    fhat = _factored(dec.induced)
    m = (n + 1) // 2
    k = _case5_exponent(d, n)
    a_k = _case5_ak(d, n, k)
    mark = _case5_marked_mass(d, n, k)

    def orbit_and_pair(phi, big_n, alpha0):
        zeta0 = chi(alpha0)
        pts = [zeta0]
        for _ in range(2 * m):
            pts.append(image_and_tangent(phi, pts[-1]).image)
        if pts[k] != chi(big_n):
            raise NTooSmall("branch vertex misses the level switch")
        hull = [GAUSS]
        for xi in pts:
            if xi not in hull:
                hull.append(xi)
        g, _, _ = _attach_outward_pair(phi, pts, hull)
        return zeta0, g

    if d >= 4:

        def build_general(big_n):
            alpha0 = rat(big_n, (d - 1) ** k)
            maps = []
            orbits = []
            for lam in lambdas:
                unit = TPoly.t_power(2 * big_n, lam)
                zeros = (
                    (TPoly.t_power(-big_n), 1),
                    (TPoly.t_power(-big_n, lam.inv()), 1),
                )
                phi = fhat.mul(FactoredRat(unit, zeros, ()))
                zeta0, g = orbit_and_pair(phi, big_n, rat(big_n, (d - 1) ** k))
                _check_gauss_reduction(g, base)
                _, s_out = surplus_iterate(g, zeta0, OUT, n)
                if s_out != a_k:
                    raise NTooSmall(f"outward mass {s_out} != {a_k}")
                _, s_one = surplus_iterate(g, zeta0, res_dir(1), n)
                if s_one != mark:
                    raise NTooSmall(f"marked mass {s_one} != {mark}")
                if k == 0:
                    _, s_lam = surplus_iterate(g, zeta0, res_dir(lam.inv()), n)
                    if s_lam != mark:
                        raise NTooSmall("lambda-marked mass mismatch")
                maps.append(g)
                orbits.append(tuple(_orbit_points(g, zeta0, n)))
            if len(set(orbits)) != 1:
                raise NTooSmall("orbit depends on the family parameter")
            return Family(
                "two-zero-branch",
                tuple(lambdas),
                tuple(maps),
                _scaling_conjugator(-rat(big_n, (d - 1) ** k)),
                chi(rat(big_n, (d - 1) ** k)),
                claims_stable=True,
                parameters={"N": big_n, "k": k},
            )

        fam = _escalate(build_general, start=4)
        return FamilySpec(f, n, "Case5", conj, base, (fam,))

    # cubic: two parameter-free branches
    k_psi = _case5_psi_exponent(n)

    def build_g(big_n):
        unit = TPoly.t_power(big_n, -1)
        phi = fhat.mul(FactoredRat(unit, ((TPoly.t_power(-big_n), 1),), ()))
        zeta0, g = orbit_and_pair(phi, big_n, rat(big_n, 2**k))
        _check_gauss_reduction(g, base)
        _, s_out = surplus_iterate(g, zeta0, OUT, n)
        if s_out != a_k:
            raise NTooSmall(f"outward mass {s_out} != {a_k}")
        _, s_one = surplus_iterate(g, zeta0, res_dir(1), n)
        if s_one != mark:
            raise NTooSmall(f"marked mass {s_one} != {mark}")
        return Family(
            "single-zero-branch",
            (),
            (g,),
            _scaling_conjugator(-rat(big_n, 2**k)),
            chi(rat(big_n, 2**k)),
            claims_stable=True,
            parameters={"N": big_n, "k": k},
        )

    def build_psi(big_s):
        zero = TPoly.t_power(-big_s)
        pole = zero + TPoly.t_power(-big_s + 1)
        psi = fhat.mul(FactoredRat(1, ((zero, 1),), ((pole, 1),)))
        alpha0 = rat(big_s, 2**k_psi)
        zeta0 = chi(alpha0)
        pts = [zeta0]
        for _ in range(n):
            pts.append(image_and_tangent(psi, pts[-1]).image)
        if pts[k_psi] != chi(big_s):
            raise NTooSmall("radius vertex misses the zero/pole pair")
        _check_gauss_reduction(psi, base)
        s_inf_expected = _case5_psi_partial(k_psi // 2)
        _, s_inf = surplus_iterate(psi, zeta0, OUT, n)
        if s_inf != s_inf_expected:
            raise NTooSmall(f"outward mass {s_inf} != {s_inf_expected}")
        _, s_one = surplus_iterate(psi, zeta0, res_dir(1), n)
        if s_one != rat(1, 3 ** (k_psi + 1)):
            raise NTooSmall("marked mass mismatch on the radius branch")
        _, s_zero = surplus_iterate(psi, zeta0, res_dir(0), n)
        expected_zero = (
            1 - rat(2, 3) ** n - rat(rat(2, 3) ** k_psi, 3) - s_inf_expected
        )
        if s_zero != expected_zero:
            raise NTooSmall(f"zero-direction mass {s_zero} != {expected_zero}")
        return Family(
            "zero-pole-branch",
            (),
            (psi,),
            _scaling_conjugator(-alpha0),
            zeta0,
            claims_stable=True,
            parameters={"S": big_s, "k": k_psi},
        )

    fam_g = _escalate(build_g, start=4)
    fam_psi = _escalate(build_psi, start=4)
    return FamilySpec(f, n, "Case5", conj, base, (fam_g, fam_psi))


# -- certificates -----------------------------------------------------


@dataclass(frozen=True)
class LimitRecord:
    """Limit of the n-th iterate of one family member at the chosen vertex."""

    family_label: str
    lam: GaussRat | None
    limit: MapPoint | None  # None when the expansion budget was exceeded
    skipped: bool = False
    reason: str = ""


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class Certificate:
    """A replayable record that the boundary class of the input map is a
    point of indeterminacy for the n-th iteration map: distinct family
    limits through the same map, with every quantitative claim recorded."""

    input: MapPoint
    n: int
    budget: int
    spec: FamilySpec
    limits: tuple
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def computed_limits(self) -> list:
        return [r for r in self.limits if not r.skipped]


def _family_limits(spec: FamilySpec, budget: int) -> list:
    out = []
    for fam in spec.families:
        for lam, g in fam.items():
            psi = g.to_mappoint() if isinstance(g, FactoredRat) else g
            try:
                lim = iterate_reduction(psi, fam.conjugator, spec.n, budget)
                out.append(LimitRecord(fam.label, lam, lim))
            except BudgetExceeded as exc:
                out.append(LimitRecord(fam.label, lam, None, True, str(exc)))
    return out


def _limit_direction(fam: Family, p: PPoint) -> Direction:
    """The direction at the family vertex corresponding to a coordinate of
    the reduced limit (the conjugator maps the coordinate into the ball)."""
    if p.is_infinity:
        return OUT
    point_t = fam.conjugator.a.scale(p.value) + fam.conjugator.b
    return direction_of(fam.zeta0, point_t)


def _classes_distinct(a: MapPoint, b: MapPoint):
    """(decided, distinct) for two limits, by conjugacy when both stable."""
    da, db = decompose(a), decompose(b)
    sig_a = (is_stable(a), da.induced_degree, sorted(
        (e.factor_degree, e.depth) for e in da.holes.entries))
    sig_b = (is_stable(b), db.induced_degree, sorted(
        (e.factor_degree, e.depth) for e in db.holes.entries))
    if sig_a != sig_b:
        return True, True
    if sig_a[0] and sig_b[0]:
        try:
            return True, not git_equal_stable(a, b)
        except TooFewSplitHoles:
            return False, False
    return False, False


def _run_checks(spec: FamilySpec, limits: list, budget: int) -> list:
    checks = []
    by_key = {(r.family_label, r.lam): r for r in limits}

    def add(name, passed, detail=""):
        checks.append(CheckRecord(name, bool(passed), detail))

    for fam in spec.families:
        try:
            for _, g in fam.items():
                _check_gauss_reduction(g, spec.base)
            add(f"gauss-reduction[{fam.label}]", True)
        except PropertyVerificationFailed as exc:
            add(f"gauss-reduction[{fam.label}]", False, str(exc))

    for fam in spec.families:
        bad = []
        for lam, _ in fam.items():
            rec = by_key[(fam.label, lam)]
            if rec.skipped:
                continue
            good = (
                is_stable(rec.limit)
                if fam.claims_stable
                else is_semistable(rec.limit)
            )
            if not good:
                bad.append(str(lam))
        add(
            f"limit-stability[{fam.label}]",
            not bad,
            "unstable at lambda " + ",".join(bad) if bad else "",
        )
        closed = fam.parameters.get("closed_form")
        if closed is not None:
            rec = by_key[(fam.label, fam.items()[0][0])]
            if not rec.skipped:
                add(
                    f"closed-form[{fam.label}]",
                    rec.limit == closed,
                    "limit differs from the closed form" if rec.limit != closed else "",
                )

    for fam in spec.families:
        if len(fam.lambdas) < 2 or not isinstance(fam.maps[0], FactoredRat):
            continue
        orbits = {
            tuple(_orbit_points(g, fam.zeta0, spec.n)) for g in fam.maps
        }
        add(
            f"segment-action[{fam.label}]",
            len(orbits) == 1,
            "orbit depends on lambda" if len(orbits) != 1 else "",
        )

    ledger_bad = []
    for fam in spec.families:
        if not isinstance(fam.maps[0], FactoredRat):
            continue
        for lam, g in fam.items():
            rec = by_key[(fam.label, lam)]
            if rec.skipped:
                continue
            dec_lim = decompose(rec.limit)
            for p, depth in dec_lim.holes.split_points():
                v = _limit_direction(fam, p)
                predicted = depths_via_surplus(g, fam.zeta0, spec.n, v)
                if predicted != depth:
                    ledger_bad.append(f"{fam.label}/{lam}@{p}: {predicted}!={depth}")
    add("depth-crosscheck", not ledger_bad, "; ".join(ledger_bad[:4]))

    bridge_bad = []
    for j, bridge in enumerate(spec.bridges):
        try:
            bridge.verify()
        except PropertyVerificationFailed as exc:
            bridge_bad.append(f"bridge {j}: {exc}")
    if spec.bridges:
        add("bridges", not bridge_bad, "; ".join(bridge_bad))

    computed = [r for r in limits if not r.skipped]
    if len(computed) < 2:
        add(
            "distinct-limits",
            True,
            "construction-level only: fewer than two limits within budget",
        )
    else:
        collisions = []
        for i, ra in enumerate(computed):
            for rb in computed[i + 1 :]:
                decided, distinct = _classes_distinct(ra.limit, rb.limit)
                if not (decided and distinct):
                    word = "conjugate" if decided else "undecided"
                    collisions.append(
                        f"{ra.family_label}/{ra.lam} ~ {rb.family_label}/{rb.lam}"
                        f" ({word})"
                    )
        add("distinct-limits", not collisions, "; ".join(collisions[:4]))
    return checks


_FALLBACK_LAMBDAS = (gr(7), gr(11), gr(13))


def certify(
    f: MapPoint,
    n: int,
    budget: int = ITERATE_DEGREE_BUDGET,
    lambdas=DEFAULT_LAMBDAS,
) -> Certificate:
    """Build families, compute their limits, and run every certificate
    check.  On a conjugate-limit collision the residue choices (salt) and
    then the parameter samples are escalated deterministically."""
    last = None
    for batch in (tuple(lambdas), _FALLBACK_LAMBDAS):
        for salt in range(4):
            spec = build_family_spec(f, n, batch, salt)
            limits = _family_limits(spec, budget)
            checks = _run_checks(spec, limits, budget)
            cert = Certificate(f, n, budget, spec, tuple(limits), tuple(checks))
            failing = [c.name for c in checks if not c.passed]
            if not failing:
                return cert
            if failing != ["distinct-limits"]:
                return cert  # a structural failure; escalation cannot help
            last = cert
    return last


def verify_certificate(cert: Certificate) -> tuple:
    """Recompute everything a certificate claims.  Returns (ok, failures);
    any tampering with the recorded limits or maps shows up as a failure."""
    failures = []
    try:
        spec = cert.spec
        if not is_semistable(cert.input):
            failures.append("input is not semistable")
        if spec.pre_conjugation is not None:
            redone = spec.pre_conjugation.conjugate(cert.input).canonical()
            if redone != spec.base and not spec.bridges:
                failures.append("base is not the recorded conjugate of the input")
        recomputed = {
            (r.family_label, r.lam): r for r in _family_limits(spec, cert.budget)
        }
        for rec in cert.limits:
            fresh = recomputed.get((rec.family_label, rec.lam))
            if fresh is None:
                failures.append(f"unknown family member {rec.family_label}/{rec.lam}")
                continue
            if rec.skipped != fresh.skipped or rec.limit != fresh.limit:
                failures.append(
                    f"recorded limit for {rec.family_label}/{rec.lam} "
                    "does not match recomputation"
                )
        for check in _run_checks(spec, list(cert.limits), cert.budget):
            if not check.passed:
                failures.append(f"check {check.name}: {check.detail}")
    except (PropertyVerificationFailed, NTooSmall, OrbitNotSplit) as exc:
        failures.append(str(exc))
    return not failures, failures
