import random

import pytest

from degmaps import (
    INFINITY,
    MapPoint,
    decompose,
    depth,
    depth_iterate,
    gr,
    is_in_Id,
    is_n_unstable,
    is_semistable,
    is_stable,
    iterate_compose,
    iterate_factored,
    local_multiplicity,
    mu_minus,
    mu_plus,
    pp,
    rat,
    resultant,
)
from degmaps.catalog import CATALOG, catalog_map
from degmaps.errors import BudgetExceeded, InIndeterminacy, NotUnstable
from degmaps.homog import HomogPoly
from degmaps.points import PPoint, eval_map
from degmaps.stability import bad_hole, classify_case, holes_of_iterate
from degmaps import unipoly as up


def mp(p, q):
    return MapPoint.from_coeff_lists(p, q)


# -- resultant --------------------------------------------------------


def test_resultant_coprime_monomials():
    f = mp([0, 0, 0, 1], [1, 0, 0, 0])
    assert not resultant(f.p, f.q).is_zero()


def test_resultant_common_factor():
    f = mp([0, 0, 1, 0], [1, 0, 0, 0])  # X^2 Y and Y^3 share Y
    assert resultant(f.p, f.q).is_zero()


def test_resultant_planted_root():
    rng = random.Random(7)
    for _ in range(10):
        r = gr(rng.randint(-5, 5))
        # p = (z - r) * random, q = (z - r) * random, both degree 3
        a = [gr(rng.randint(-4, 4)) for _ in range(3)]
        b = [gr(rng.randint(-4, 4)) for _ in range(3)]
        if up.pnorm(a) == [] or up.pnorm(b) == []:
            continue
        lin = [-r, gr(1)]
        p = up.pmul(lin, a)
        q = up.pmul(lin, b)
        f = MapPoint.from_coeff_lists(p, q, degree=3)
        assert resultant(f.p, f.q).is_zero()


def test_resultant_nonzero_iff_nondegenerate():
    for name in CATALOG:
        f = catalog_map(name)
        dec = decompose(f)
        assert resultant(f.p, f.q).is_zero() == (dec.h.degree > 0)


# -- decompose --------------------------------------------------------


def test_decompose_examples():
    dec = decompose(catalog_map("G3"))
    assert dec.h.degree == 1 and dec.h.y_multiplicity() == 1
    assert dec.induced == mp([0, 0, 1], [1, 0, 0])
    assert dec.holes.depth_of(INFINITY) == 1

    f = mp([0, 0, 0, 1], [1, 0, 0, 0])  # [X^3 : Y^3]
    assert decompose(f).h.degree == 0

    dec = decompose(catalog_map("C1"))
    assert dec.holes.depth_of(pp(0)) == 3
    assert dec.induced == mp([1, -1, 1], [1, 0, 0])


def test_decompose_multiplies_back():
    for name in CATALOG:
        dec = decompose(catalog_map(name))
        lifted = MapPoint(dec.h.mul(dec.induced.p), dec.h.mul(dec.induced.q))
        assert lifted == catalog_map(name)
        assert dec.holes.total_depth() + dec.induced_degree == dec.degree
        if dec.induced_degree >= 1:
            assert not resultant(dec.induced.p, dec.induced.q).is_zero()


def test_depth_examples():
    assert depth(catalog_map("G3"), "inf") == 1
    assert depth(catalog_map("G3"), 0) == 0
    assert depth(catalog_map("C1"), 0) == 3


# -- local multiplicity ----------------------------------------------


def test_local_multiplicity():
    sq = mp([0, 0, 1], [1, 0, 0])  # z^2
    assert local_multiplicity(sq, 0) == 2
    assert local_multiplicity(sq, 1) == 1
    inv2 = mp([1, 0, 0], [0, 0, 1])  # z^-2
    assert local_multiplicity(inv2, "inf") == 2


# -- I(d), stability --------------------------------------------------


def test_in_Id():
    assert is_in_Id(catalog_map("F3"))
    assert not is_in_Id(catalog_map("G3"))
    # H * [0:1] with H(0) != 0: constant value not a hole
    f = mp([0, 0, 0, 0], [0, 0, 1, 0])  # X^2 Y * [0:1], holes {0:2, inf:1}... 0 is a hole
    assert is_in_Id(f)
    g = mp([0, 0, 0, 0], [1, 2, 1, 0])  # (z+1)^2 Y * [0:1], holes {-1:2, inf:1}
    assert not is_in_Id(g)


def test_stability_examples():
    assert is_semistable(catalog_map("F3")) and not is_stable(catalog_map("F3"))
    f = mp([0, 0, 0, 1], [1, 0, 0, 0])
    assert is_stable(f)
    g = mp([0, 0, 0, 1], [0, 0, 1, 0])  # [X^3 : X^2 Y], hole 0 depth 2 fixed by id
    assert not is_semistable(g)


def test_mu_thresholds():
    assert mu_minus(3) == rat(1, 3)
    assert mu_plus(3) == rat(2, 3)
    assert mu_minus(4) == rat(1, 2) == mu_plus(4)
    assert mu_plus(9) == rat(5, 9)
    for d in range(2, 12):
        assert mu_plus(d) == 1 - mu_minus(d)


# -- iteration --------------------------------------------------------


def test_iterate_compose_basics():
    g3 = catalog_map("G3")
    assert iterate_compose(g3, 1) == g3
    f2 = iterate_compose(g3, 2)
    assert f2.degree == 9
    assert decompose(f2).holes.depth_of(INFINITY) == 5
    with pytest.raises(BudgetExceeded):
        iterate_compose(g3, 8)


def test_iterate_compose_nondegenerate_closed():
    f = mp([1, 0, 0, 1], [0, 1, 0, 0])
    assert not resultant(f.p, f.q).is_zero()
    f2 = iterate_compose(f, 2)
    assert not resultant(f2.p, f2.q).is_zero()


def test_iterate_factored():
    g3 = catalog_map("G3")
    factors, induced = iterate_factored(g3, 2)
    # product degree + induced degree = 9
    total = sum(h.degree * e for h, e in factors)
    assert total + induced.degree == 9
    assert induced == mp([0, 0, 0, 0, 1], [1, 0, 0, 0, 0])
    with pytest.raises(InIndeterminacy):
        iterate_factored(catalog_map("F3"), 2)
    h, ind = decompose(g3).h, decompose(g3).induced
    f1, i1 = iterate_factored(g3, 1)
    assert f1[0][0] == h and f1[0][1] == 1 and i1 == ind


def test_depth_iterate_examples():
    assert depth_iterate(catalog_map("G3"), "inf", 2) == 5
    assert depth_iterate(catalog_map("P3"), 0, 2) == 6
    # point whose orbit avoids all holes
    assert depth_iterate(catalog_map("G3"), 3, 3) == 0


def _random_planted_map(rng, d):
    """A degenerate degree-d pair with at least one split hole."""
    while True:
        hole_deg = rng.randint(1, d - 1)
        roots = [gr(rng.randint(-3, 3)) for _ in range(hole_deg)]
        h = [gr(1)]
        for r in roots:
            h = up.pmul(h, [-r, gr(1)])
        d_hat = d - hole_deg
        ip = [gr(rng.randint(-3, 3)) for _ in range(d_hat + 1)]
        iq = [gr(rng.randint(-3, 3)) for _ in range(d_hat + 1)]
        ih = MapPoint.from_coeff_lists(ip, iq, degree=d_hat) if up.pnorm(
            ip
        ) or up.pnorm(iq) else None
        if ih is None:
            continue
        if d_hat >= 1:
            if resultant(ih.p, ih.q).is_zero():
                continue
        p = up.pmul(h, ip)
        q = up.pmul(h, iq)
        f = MapPoint.from_coeff_lists(p, q, degree=d)
        if is_in_Id(f):
            continue
        return f


def test_depth_formula_random_oracle():
    rng = random.Random(20240817)
    for _ in range(25):
        d = rng.randint(2, 4)
        f = _random_planted_map(rng, d)
        for n in (2, 3):
            brute = decompose(iterate_compose(f, n))
            for entry, _ in brute.holes.split_points():
                pass
            entries, induced_n = holes_of_iterate(f, n)
            # compare aggregated factored depths with brute-force depths
            for e in entries:
                if e.point is not None:
                    assert brute.holes.depth_of(e.point) == e.depth
            assert induced_n == brute.induced
            for e in decompose(f).holes.entries:
                if e.point is not None:
                    assert depth_iterate(f, e.point, n) == brute.holes.depth_of(
                        e.point
                    )


def test_is_n_unstable_examples():
    assert is_n_unstable(catalog_map("G3"), 2)
    assert not is_n_unstable(mp([0, 0, 0, 1], [1, 0, 0, 0]), 2)
    assert not is_n_unstable(catalog_map("F3"), 2)
    assert not is_n_unstable(catalog_map("M3"), 4)
    assert is_n_unstable(catalog_map("M3"), 5)


def test_bad_hole_examples():
    assert bad_hole(catalog_map("G3"), 2).point == INFINITY
    assert bad_hole(catalog_map("M3"), 5).point == INFINITY
    assert bad_hole(catalog_map("P3"), 2).point == pp(0)
    with pytest.raises(NotUnstable):
        bad_hole(mp([0, 0, 0, 1], [1, 0, 0, 0]), 2)


def test_classify_examples():
    assert classify_case(catalog_map("G3"), 2).tag == "Case4"
    assert classify_case(catalog_map("M3"), 5).tag == "Case5"
    assert classify_case(catalog_map("P3"), 3).tag == "Case3"
    assert classify_case(catalog_map("P3"), 2).tag == "Case0"
    assert classify_case(catalog_map("C2"), 2).tag == "Case2"
    assert classify_case(catalog_map("C1"), 3).tag == "Case1"


def test_classify_case4_records_conjugation():
    tag = classify_case(catalog_map("G3"), 2)
    assert tag.conjugation is not None
    assert tag.bad_hole == INFINITY and tag.bad_depth == 1


def test_semistable_implication_on_catalog():
    # if f^n is semistable then f is (contrapositive on U_n members)
    for name, entry in CATALOG.items():
        f = entry.map
        if entry.in_Id:
            continue
        for n, member, _, _ in entry.verdicts:
            if member:
                from degmaps.stability import is_semistable_iterate

                assert not is_semistable_iterate(f, n)
                assert is_semistable(f)


def test_increasing_instability_on_catalog():
    for name, entry in CATALOG.items():
        for n, member, _, bh in entry.verdicts:
            if member and entry.map.degree ** (n + 1) < 4000:
                assert is_n_unstable(entry.map, n + 1)
                assert bad_hole(entry.map, n) == bad_hole(entry.map, n + 1)


def test_depth_multiplicity_inequality():
    # 2 d_h(f) + m_h(induced) > d on catalog U_n members
    for name, entry in CATALOG.items():
        for n, member, _, _ in entry.verdicts:
            if not member:
                continue
            tag = classify_case(entry.map, n)
            dec = decompose(entry.map)
            if dec.induced_degree == 0:
                continue
            m = local_multiplicity(dec.induced, tag.bad_hole)
            assert 2 * tag.bad_depth + m > entry.map.degree


def test_orbit_hole_depth():
    # bad-hole orbit missing the hole set forces depth (d+1)/2; no catalog
    # member triggers the hypothesis, so verify the contrapositive instead
    for name, entry in CATALOG.items():
        for n, member, _, _ in entry.verdicts:
            if not member:
                continue
            tag = classify_case(entry.map, n)
            dec = decompose(entry.map)
            if dec.induced_degree == 0:
                continue
            orbit_rest = [
                eval_map(dec.induced, z) for z in tag.orbit
            ]
            hits = any(dec.holes.depth_of(z) > 0 for z in orbit_rest)
            if not hits:
                assert tag.bad_depth == (entry.map.degree + 1) // 2
