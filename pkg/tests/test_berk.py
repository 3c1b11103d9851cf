import random

import pytest

from degmaps import MapPoint, gr, rat, tp
from degmaps.berk import (
    GAUSS,
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
    one_plus_pole,
    perturb,
    reduce_at,
    res_dir,
    surplus,
    surplus_iterate,
)
from degmaps.catalog import catalog_map
from degmaps.decompose import decompose
from degmaps.errors import NTooSmall
from degmaps.homog import Moebius
from degmaps.tpoly import TPoly


def frat(p, q):
    return FactoredRat.from_poly_pair([tp(c) for c in p], [tp(c) for c in q])


SQUARE = frat([0, 0, 1], [1])  # z^2
INV = frat([1], [0, 1])  # 1/z


# -- points and directions --------------------------------------------


def test_typeii_canonical_truncation():
    a = TypeIIPoint(TPoly({0: 1, 2: 5}), 1)
    b = TypeIIPoint(TPoly({0: 1, 1: 0}), 1)
    assert a == b
    assert hash(a) == hash(b)
    assert chi(2) == TypeIIPoint(0, -2)


def test_direction_of():
    assert direction_of(GAUSS, tp(3)) == res_dir(3)
    assert direction_of(GAUSS, TPoly({1: 1})) == res_dir(0)  # t is in res 0
    assert direction_of(GAUSS, TPoly({-1: 1})) == OUT
    xi = TypeIIPoint(TPoly({1: 2}), 2)  # ball around 2t, radius |t|^2
    assert direction_of(xi, TPoly({1: 2, 2: 1})) == res_dir(1)
    assert direction_of(xi, TPoly({1: 5})) == OUT
    assert direction_of(xi, tp(1)) == OUT
    assert direction_of(xi, TPoly({1: 2, 3: 7})) == res_dir(0)


def test_direction_toward():
    inner = TypeIIPoint(TPoly({1: 2}), 3)
    assert direction_toward(GAUSS, inner) == res_dir(0)
    shifted = TypeIIPoint(tp(4), 2)
    assert direction_toward(GAUSS, shifted) == res_dir(4)
    assert direction_toward(shifted, GAUSS) == OUT
    assert direction_toward(GAUSS, chi(3)) == OUT
    assert direction_toward(GAUSS, GAUSS) is None


# -- image and tangent ------------------------------------------------


def test_square_map_scales_radius():
    # z -> z^2 sends xi_{0,|t|^a} to xi_{0,|t|^{2a}} with tangent c^2
    for a in (0, 1, rat(1, 2), -2):
        td = image_and_tangent(SQUARE, TypeIIPoint(0, a))
        assert td.image == TypeIIPoint(0, 2 * rat(a))
        assert td.local_degree == 2
        assert td.tangent == MapPoint.from_coeff_lists([0, 0, 1], [1, 0, 0])


def test_inversion_flips_radius():
    td = image_and_tangent(INV, chi(2))
    assert td.image == TypeIIPoint(0, 2)
    assert td.local_degree == 1


def test_translation_moves_center():
    # z -> z + 1/t at the Gauss point: image is the ball around 1/t
    f = frat([TPoly({-1: 1}), tp(1)], [tp(1)])
    td = image_and_tangent(f, GAUSS)
    assert td.image == TypeIIPoint(TPoly({-1: 1}), 0)
    assert td.local_degree == 1


def test_perturbed_square_at_chi():
    # z^2 / (1 - t^N z) at chi_N: tangent c^2 / (1 - c)
    n = 3
    f = frat([0, 0, 1], [tp(1), TPoly({n: -1})])
    td = image_and_tangent(f, chi(n))
    assert td.image == chi(2 * n)
    assert td.local_degree == 2
    assert td.tangent == MapPoint.from_coeff_lists([0, 0, 1], [1, -1, 0])


def test_good_reduction_tangent_is_reduction():
    # C1's induced map has good reduction at the Gauss point
    ind = decompose(catalog_map("C1")).induced
    f = FactoredRat.from_gaussrat_map(ind)
    td = image_and_tangent(f, GAUSS)
    assert td.image == GAUSS
    assert td.local_degree == 2
    assert td.tangent == ind


# -- surplus ----------------------------------------------------------


def test_surplus_zero_for_good_reduction():
    td = image_and_tangent(SQUARE, GAUSS)
    assert td.local_degree == 2
    for v in (OUT, res_dir(0), res_dir(1)):
        assert surplus(SQUARE, GAUSS, v) == 0


def test_surplus_pole_inside_ball():
    # z^2 * (z - (1 - t^3)) / (z - 1): pole and nearby zero in res(1)
    f = SQUARE.mul(one_plus_pole(1, 3))
    assert surplus(f, GAUSS, res_dir(1)) == 1
    assert surplus(f, GAUSS, res_dir(0)) == 0
    assert surplus(f, GAUSS, OUT) == 0
    td = image_and_tangent(f, GAUSS)
    assert td.local_degree + 1 == f.degree


def test_surplus_composition_random():
    # surplus of a composition along an orbit of length 2 equals
    # s_1 * d + m_1 * s_2 where the step data comes from orbit_steps
    rng = random.Random(99)
    for _ in range(10):
        n_pole = rng.randint(2, 4)
        f = frat([0, 0, 1], [1]).mul(one_plus_pole(rng.randint(1, 3), n_pole))
        s2, prop = surplus_iterate(f, GAUSS, res_dir(1), 2)
        from degmaps.berk import orbit_steps

        steps = orbit_steps(f, GAUSS, res_dir(1), 2)
        d = f.degree
        expected = steps[0].surplus * d + steps[0].multiplicity * steps[1].surplus
        assert s2 == expected
        assert prop == rat(s2, d * d)


# -- reduction --------------------------------------------------------


def test_reduce_at_identity_strips_t():
    psi = MapPoint.from_coeff_lists(
        [tp(0), tp(0), TPoly({1: 1})], [TPoly({1: 1}), tp(0), tp(0)]
    )
    f0 = reduce_at(psi, Moebius.identity_tpoly())
    assert f0 == MapPoint.from_coeff_lists([0, 0, 1], [1, 0, 0])


def test_reduce_at_conjugation():
    # psi(z) = t z^2 fixes the ball of radius |t|^-1; in the rescaled
    # coordinate w = t z the map reads w^2, so that is its reduction there
    psi = MapPoint.from_coeff_lists(
        [tp(0), tp(0), TPoly({1: 1})], [tp(1), tp(0), tp(0)]
    )
    m = Moebius(TPoly({-1: 1}), tp(0), tp(0), tp(1))  # M(w) = w / t
    f0 = reduce_at(psi, m)
    assert f0 == MapPoint.from_coeff_lists([0, 0, 1], [1, 0, 0])


def test_reduce_at_wandering_ball_collapses():
    # z^2 does not fix the radius |t|^-1 ball, so its reduction there is
    # the constant infinity with a double hole at 0
    psi = MapPoint.from_coeff_lists([tp(0), tp(0), tp(1)], [tp(1), tp(0), tp(0)])
    m = Moebius(TPoly({-1: 1}), tp(0), tp(0), tp(1))
    f0 = reduce_at(psi, m)
    assert f0 == MapPoint.from_coeff_lists([0, 0, 1], [0, 0, 0])


def test_gauss_reduction_degenerate():
    # z^2 (z - (1 - t^3)) / (z - 1) over the series field: reduction has a
    # hole at 1 and induced map z^2
    f = SQUARE.mul(one_plus_pole(1, 3))
    f0, induced = gauss_reduction(f.to_mappoint())
    assert decompose(f0).holes.depth_of(1) == 1
    assert induced == MapPoint.from_coeff_lists([0, 0, 1], [1, 0, 0])


def test_depth_matches_surplus_prediction():
    # depth of the reduction hole equals the surplus-based prediction
    f = SQUARE.mul(one_plus_pole(1, 3))
    f0, _ = gauss_reduction(f.to_mappoint())
    for c in (0, 1, 2):
        predicted = depths_via_surplus(f, GAUSS, 1, res_dir(c))
        assert decompose(f0).holes.depth_of(c) == predicted


def test_depth_iterate_matches_surplus_prediction():
    f = SQUARE.mul(one_plus_pole(1, 4))
    fm = f.to_mappoint()
    sq = fm
    for _ in range(1):
        sq = sq.compose(fm)
    f0, _ = gauss_reduction(sq)
    for c in (0, 1, 2):
        predicted = depths_via_surplus(f, GAUSS, 2, res_dir(c))
        assert decompose(f0).holes.depth_of(c) == predicted


def test_iterate_reduction_matches_exact_path():
    from degmaps.berk import iterate_reduction, reduce_at

    # psi(z) = t z^2 + 1/t fixes the radius |t|^-1 ball
    psi = MapPoint.from_coeff_lists(
        [TPoly({-1: 1}), tp(0), TPoly({1: 1})], [tp(1), tp(0), tp(0)]
    )
    m = Moebius(TPoly({-1: 1}), tp(0), tp(0), tp(1))
    for n in (1, 2, 3):
        exact = psi
        for _ in range(n - 1):
            exact = psi.compose(exact)
        assert iterate_reduction(psi, m, n) == reduce_at(exact, m)


def test_iterate_reduction_respects_budget():
    from degmaps.berk import iterate_reduction
    from degmaps.errors import BudgetExceeded

    psi = MapPoint.from_coeff_lists([tp(0), tp(0), tp(1)], [tp(1), tp(0), tp(0)])
    with pytest.raises(BudgetExceeded):
        iterate_reduction(psi, Moebius.identity_tpoly(), 20)


# -- perturbation -----------------------------------------------------


def test_perturb_adds_surplus():
    base = frat([0, 0, 1], [1])
    psi = perturb(base, [tp(1)], [GAUSS], 6)
    assert surplus(psi, GAUSS, res_dir(1)) == 1
    td_old = image_and_tangent(base, GAUSS)
    td_new = image_and_tangent(psi, GAUSS)
    assert td_old.image == td_new.image
    assert td_old.tangent == td_new.tangent


def test_perturb_rejects_small_exponent():
    # with N = 0 the extra factor moves the tangent map
    base = frat([0, 0, 1], [1])
    with pytest.raises(NTooSmall):
        perturb(base, [tp(1)], [GAUSS], 0)
