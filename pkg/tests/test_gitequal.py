import random

import pytest

from degmaps import MapPoint, gr
from degmaps.errors import NotStable
from degmaps.gitequal import git_equal_stable
from degmaps.homog import Moebius
from degmaps.scalars import GR_ONE, GR_ZERO
from degmaps import unipoly as up


def stable_map_three_holes(shift=0):
    """H = X Y (X - (1+shift)Y) times a nondegenerate degree-2 pair."""
    h = up.pmul([GR_ZERO, GR_ONE], [gr(-(1 + shift)), gr(1)])  # z(z-(1+shift))
    ip = [gr(1), gr(0), gr(1)]  # z^2 + 1
    iq = [gr(0), gr(1), gr(0)]  # z
    p = up.pmul(h, ip)
    q = up.pmul(h, iq)
    return MapPoint.from_coeff_lists(p, q, degree=5)


def random_integer_moebius(rng):
    while True:
        a, b, c, d = (gr(rng.randint(-4, 4)) for _ in range(4))
        if not (a * d - b * c).is_zero():
            return Moebius(a, b, c, d)


def test_reflexive():
    g = stable_map_three_holes()
    assert git_equal_stable(g, g)


def test_conjugate_detected():
    rng = random.Random(11)
    g = stable_map_three_holes()
    for _ in range(5):
        m = random_integer_moebius(rng)
        h = m.conjugate(g)
        assert git_equal_stable(g, h)
        assert git_equal_stable(h, g)


def test_distinct_maps():
    g = stable_map_three_holes(0)
    h = stable_map_three_holes(1)
    assert not git_equal_stable(g, h)


def test_depth_multiset_shortcut():
    # different hole depth multisets are never conjugate
    h1 = up.pmul([GR_ZERO, GR_ONE], [gr(-1), gr(1)])
    p1 = up.pmul(up.pmul(h1, [GR_ZERO, GR_ONE]), [gr(1), gr(0), gr(1)])
    q1 = up.pmul(up.pmul(h1, [GR_ZERO, GR_ONE]), [gr(0), gr(1)])
    g = MapPoint.from_coeff_lists(p1, q1, degree=5)  # holes 0:2, 1:1
    h = stable_map_three_holes()  # holes 0:1, 1:1, inf... depths differ
    assert not git_equal_stable(g, h)


def test_requires_stable():
    unstable = MapPoint.from_coeff_lists([0, 0, 0, 1], [0, 0, 1, 0])
    stable = MapPoint.from_coeff_lists([0, 0, 0, 1], [1, 0, 0, 0])
    with pytest.raises(NotStable):
        git_equal_stable(unstable, stable)


def test_invariant_under_preconjugation():
    rng = random.Random(5)
    g = stable_map_three_holes(0)
    h = stable_map_three_holes(1)
    for _ in range(3):
        m = random_integer_moebius(rng)
        assert git_equal_stable(m.conjugate(g), h) == git_equal_stable(g, h)
        assert git_equal_stable(g, m.conjugate(h)) == git_equal_stable(g, h)
