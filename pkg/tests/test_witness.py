import json

import pytest

from degmaps import MapPoint, gr
from degmaps import serialize as ser
from degmaps.catalog import catalog_map
from degmaps.errors import NotApplicable
from degmaps.gitequal import git_equal_stable
from degmaps.stability import is_semistable, is_stable
from degmaps.witness import (
    Certificate,
    LimitRecord,
    build_family_spec,
    certify,
    verify_certificate,
)


def mp(p, q):
    return MapPoint.from_coeff_lists(p, q)


@pytest.fixture(scope="module")
def p3_cert():
    return certify(catalog_map("P3"), 2)


@pytest.fixture(scope="module")
def g3_cert():
    return certify(catalog_map("G3"), 2)


# -- per-case construction --------------------------------------------


def test_case4_fixed_hole_polynomial_induced(g3_cert):
    cert = g3_cert
    assert cert.ok
    assert cert.spec.case == "Case4"
    assert len(cert.spec.families) == 2
    limits = cert.computed_limits()
    assert len(limits) == 2
    # one branch semistable-only, the other strictly stable
    stabilities = sorted(is_stable(r.limit) for r in limits)
    assert stabilities == [False, True]
    assert all(is_semistable(r.limit) for r in limits)


def test_case4_degree_four():
    cert = certify(mp([0, 0, 0, 1, 0], [1, 0, 0, 0, 0]), 3)
    assert cert.ok
    assert cert.spec.case == "Case4"
    computed = cert.computed_limits()
    assert len(computed) >= 2
    for a_idx in range(len(computed)):
        for b_idx in range(a_idx + 1, len(computed)):
            a, b = computed[a_idx].limit, computed[b_idx].limit
            assert not (
                is_stable(a) and is_stable(b) and git_equal_stable(a, b)
            )


def test_case2_superattracting_fixed_hole():
    cert = certify(catalog_map("C2"), 2)
    assert cert.ok
    assert cert.spec.case == "Case2"


def test_case3_exceptional_inversion_cycle(p3_cert):
    cert = p3_cert
    assert cert.ok
    assert cert.spec.case == "Case3Exceptional"
    fam = cert.spec.families[0]
    assert fam.label == "inversion-cycle"
    assert len(cert.computed_limits()) == len(fam.lambdas)


def test_case3_generic_periodic_cycle():
    # holes 0 and infinity swapped by the induced map, depths (2, 1)
    cert = certify(mp([0, 0, 2, 1, 0], [0, 0, 0, 1, 0]), 2)
    spec = cert.spec
    assert spec.case in ("Case3", "Case0", "Case2", "Case3Exceptional")
    assert cert.ok


def test_case5_monomial_induced_cubic():
    cert = certify(catalog_map("M3"), 5)
    assert cert.ok
    assert cert.spec.case == "Case5"
    labels = {f.label for f in cert.spec.families}
    assert labels == {"single-zero-branch", "zero-pole-branch"}
    # the degree bound forces some skips at n = 5, recorded honestly
    assert all(r.reason for r in cert.limits if r.skipped)


def test_constant_stable_pair():
    cert = certify(catalog_map("S5"), 2)
    assert cert.ok
    assert cert.spec.case == "ConstantStable"
    d0s = sorted(f.parameters["d0_n"] for f in cert.spec.families)
    assert d0s == [5, 6]
    for fam in cert.spec.families:
        assert is_stable(fam.parameters["closed_form"])


def test_constant_delegated_bridges():
    cert = certify(catalog_map("F3"), 2)
    assert cert.ok
    assert cert.spec.case.startswith("ConstantDelegated")
    assert cert.spec.bridges
    for bridge in cert.spec.bridges:
        bridge.verify()


# -- applicability ----------------------------------------------------


def test_not_applicable_nondegenerate():
    with pytest.raises(NotApplicable):
        build_family_spec(mp([0, 0, 0, 1], [1, 0, 0, 0]), 2)


def test_not_applicable_unstable_input():
    # depth-3 fixed hole out of degree 4: not semistable to begin with
    f = mp([0, 0, 0, 0, 1], [0, 0, 0, 1, 0])
    assert not is_semistable(f)
    with pytest.raises(NotApplicable):
        build_family_spec(f, 2)


# -- verification and serialization -----------------------------------


def test_verify_recomputes(p3_cert):
    ok, failures = verify_certificate(p3_cert)
    assert ok and not failures


def test_tampered_limit_is_rejected(p3_cert):
    cert = p3_cert
    fake = mp([0, 0, 1], [1, 0, 0])
    bad_limits = tuple(
        LimitRecord(r.family_label, r.lam, fake, r.skipped, r.reason)
        if not r.skipped and idx == 0
        else r
        for idx, r in enumerate(cert.limits)
    )
    tampered = Certificate(
        cert.input, cert.n, cert.budget, cert.spec, bad_limits, cert.checks
    )
    ok, failures = verify_certificate(tampered)
    assert not ok
    assert any("does not match recomputation" in f for f in failures)


def test_certificate_json_roundtrip(p3_cert):
    text = ser.dumps(ser.certificate_to_json(p3_cert))
    back = ser.certificate_from_json(json.loads(text))
    assert back == p3_cert
    assert back.ok == p3_cert.ok


def test_certificate_json_rejects_bad_format(p3_cert):
    data = ser.certificate_to_json(p3_cert)
    data["format"] = "something-else"
    with pytest.raises(ValueError):
        ser.certificate_from_json(data)


def test_map_argument_parsing():
    assert ser.parse_map_argument("G3") == catalog_map("G3")
    assert ser.parse_map_argument("0,0,1,0;1,0,0,0") == catalog_map("G3")
    assert ser.parse_map_argument(
        '[["0","0","1","0"],["1","0","0","0"]]'
    ) == catalog_map("G3")
    with pytest.raises(ValueError):
        ser.parse_map_argument("0,1;1")  # degree mismatch
    with pytest.raises(ValueError):
        ser.parse_map_argument("NoSuchMap")


def test_points_serialize_with_inf():
    from degmaps.points import INFINITY, pp

    assert ser.point_to_str(INFINITY) == "inf"
    assert ser.point_from_str("inf") == INFINITY
    assert ser.point_from_str("-1/2") == pp(gr("-1/2"))
