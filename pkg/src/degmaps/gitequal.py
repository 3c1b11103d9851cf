"""Exact conjugacy testing for stable degenerate pairs.

For stable maps, class equality is plain Moebius conjugacy.  Any conjugation
carrying g to h must map holes to holes of equal depth and fixed points of
the induced map to fixed points, so candidate maps are enumerated from
ordered triples of split anchors.  Completeness needs at least three split
anchors whose partners in the other map are split as well; otherwise
TooFewSplitHoles is raised rather than guessing.
"""

from __future__ import annotations

from itertools import permutations

from .decompose import decompose
from .errors import NotStable, TooFewSplitHoles
from .factoring import nth_roots_gaussrat, roots_gaussrat
from .homog import MapPoint, Moebius
from .points import INFINITY, PPoint, moebius_three_points, pp
from .scalars import GR_ONE, GR_ZERO
from .stability import _fixed_point_poly, is_stable
from . import unipoly as up


def _anchors(f: MapPoint) -> list:
    """Split anchor points with labels: holes (by depth) and fixed points."""
    dec = decompose(f)
    out = []
    for point, dz in dec.holes.split_points():
        out.append((("hole", dz), point))
    taken = {p for _, p in out}
    if dec.induced_degree >= 1:
        fix = _fixed_point_poly(dec.induced)
        for root, _ in roots_gaussrat(fix):
            point = PPoint(root)
            if point not in taken:
                out.append((("fix",), point))
        from .points import eval_map

        if INFINITY not in taken and eval_map(dec.induced, INFINITY) == INFINITY:
            out.append((("fix",), INFINITY))
    return out


def git_equal_stable(g: MapPoint, h: MapPoint) -> bool:
    """Moebius conjugacy test for two stable maps of equal degree."""
    if g.degree != h.degree:
        return False
    if not (is_stable(g) and is_stable(h)):
        raise NotStable("git_equal_stable requires stable inputs")
    if g == h:
        return True
    dec_g = decompose(g)
    dec_h = decompose(h)
    depths_g = sorted((e.factor_degree, e.depth) for e in dec_g.holes.entries)
    depths_h = sorted((e.factor_degree, e.depth) for e in dec_h.holes.entries)
    if depths_g != depths_h:
        return False
    split_g = dec_g.holes.split_points()
    split_h = dec_h.holes.split_points()
    if (
        dec_g.induced_degree == 0
        and dec_h.induced_degree == 0
        and len(split_g) == len(dec_g.holes.entries)
        and len(split_h) == len(dec_h.holes.entries)
    ):
        return _constant_pair_equal(dec_g, dec_h)
    if len(split_g) >= 3 and len(split_h) >= 3:
        return _triple_search(g, h, _anchors(g), _anchors(h))
    total_g = len(dec_g.holes.entries)
    total_h = len(dec_h.holes.entries)
    anchors_g = _anchors(g)
    anchors_h = _anchors(h)
    if len(anchors_g) >= 3 and len(anchors_h) >= 3:
        return _triple_search(g, h, anchors_g, anchors_h)
    if total_g <= 2 and total_h <= 2 and len(split_g) == total_g and len(
        split_h
    ) == total_h:
        return _few_hole_search(g, h, split_g, split_h)
    raise TooFewSplitHoles("not enough split anchors to decide conjugacy")


def _constant_pair_equal(dec_g, dec_h) -> bool:
    """Conjugacy for totally degenerate pairs H * [a : b].

    Such a point is determined by its hole divisor and the constant value,
    both of which transform pointwise under a Moebius map, so conjugacy is a
    finite matching of labeled point configurations.
    """
    from .points import moebius_apply
    from .stability import _constant_value

    vg = _constant_value(dec_g.induced)
    vh = _constant_value(dec_h.induced)

    def labeled(dec, v):
        out = {}
        for p, depth in dec.holes.split_points():
            out[p] = (depth, p == v)
        if v not in out:
            out[v] = (0, True)
        return out

    lg = labeled(dec_g, vg)
    lh = labeled(dec_h, vh)
    if sorted(lg.values()) != sorted(lh.values()):
        return False
    if len(lg) < 3:
        raise TooFewSplitHoles("configuration too small to pin a conjugation")
    src = list(lg)[:3]
    by_label: dict = {}
    for p, lab in lh.items():
        by_label.setdefault(lab, []).append(p)
    candidates = [by_label.get(lg[s], []) for s in src]
    for dst in _distinct_product(candidates):
        m = moebius_three_points(tuple(src), tuple(dst))
        if all(lh.get(moebius_apply(m, p)) == lab for p, lab in lg.items()):
            return True
    return False


def _triple_search(g, h, anchors_g, anchors_h) -> bool:
    by_label: dict = {}
    for label, point in anchors_h:
        by_label.setdefault(label, []).append(point)
    for triple in permutations(anchors_g, 3):
        labels = [a[0] for a in triple]
        src = [a[1] for a in triple]
        candidates = [by_label.get(lb, []) for lb in labels]
        for dst in _distinct_product(candidates):
            m = moebius_three_points(tuple(src), tuple(dst))
            if m.conjugate(g) == h:
                return True
    return False


def _distinct_product(lists):
    for a in lists[0]:
        for b in lists[1]:
            if b == a:
                continue
            for c in lists[2]:
                if c == a or c == b:
                    continue
                yield (a, b, c)


def _few_hole_search(g, h, split_g, split_h) -> bool:
    """Conjugacy for maps with one or two holes, all split.

    Holes are sent to {infinity} or {0, infinity}; the leftover stabilizer
    is diagonal (two holes) and the candidate scalings come from coefficient
    weight ratios.  The one-hole affine stabilizer is not searched.
    """
    if len(split_g) != len(split_h):
        return False
    if len(split_g) == 2:
        (a1, d1), (a2, d2) = split_g
        arrangements = []
        for (b1, e1), (b2, e2) in (split_h, list(reversed(split_h))):
            if (d1, d2) == (e1, e2):
                arrangements.append((b1, b2))
        g_norm = _send_two(g, a1, a2)
        for b1, b2 in arrangements:
            h_norm = _send_two(h, b1, b2)
            if _diagonal_conjugate(g_norm, h_norm):
                return True
        return False
    raise TooFewSplitHoles("one or zero holes; stabilizer too large to search")


def _send_two(f, a, b):
    """Conjugate so hole a goes to 0 and hole b to infinity."""
    from .stability import _moebius_to_zero_infinity

    m = _moebius_to_zero_infinity(pp(a), pp(b))
    return m.conjugate(f).canonical()


def _diagonal_conjugate(g, h) -> bool:
    """Does some diagonal map z -> u z conjugate g into h?"""
    gp, gq = g.p.coeffs, g.q.coeffs
    hp, hq = h.p.coeffs, h.q.coeffs
    pairs = []  # (weight, g-coeff, h-coeff)
    for j, (a, b) in enumerate(zip(gp, hp)):
        if a.is_zero() != b.is_zero():
            return False
        if not a.is_zero():
            pairs.append((1 - j, a, b))
    for j, (a, b) in enumerate(zip(gq, hq)):
        if a.is_zero() != b.is_zero():
            return False
        if not a.is_zero():
            pairs.append((-j, a, b))
    w0, a0, b0 = pairs[0]
    candidates = []
    for w, a, b in pairs[1:]:
        delta = w - w0
        if delta == 0:
            continue
        rho = (b / a) * (a0 / b0)
        if delta < 0:
            rho = rho.inv()
            delta = -delta
        candidates = nth_roots_gaussrat(rho, delta) if delta > 1 else [rho]
        break
    if not candidates:
        candidates = [GR_ONE]
    for u in candidates:
        if u.is_zero():
            continue
        m = Moebius(u, GR_ZERO, GR_ZERO, GR_ONE)
        if m.conjugate(g) == h:
            return True
    return False
