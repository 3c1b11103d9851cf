import json

import pytest

from degmaps.cli import main, nondegenerate_map, planted_map

import random


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


# -- analyze ----------------------------------------------------------


def test_analyze_catalog_entry(capsys):
    code, data, _ = run_json(capsys, "analyze", "G3", "--n", "2", "--json")
    assert code == 0
    assert data["semistable"] is True
    assert data["stable"] is False
    assert data["U_n"] is True
    assert data["case"] == "Case4"
    assert data["bad_hole"] == "inf"


def test_analyze_nondegenerate(capsys):
    literal = '[["0","0","0","1"],["1","0","0","0"]]'
    code, data, _ = run_json(capsys, "analyze", literal, "--n", "2", "--json")
    assert code == 0
    assert data["stable"] is True
    assert data["U_n"] is False
    assert data["holes"] == []


def test_analyze_indeterminacy_member(capsys):
    code, data, _ = run_json(capsys, "analyze", "F3", "--json")
    assert code == 0
    assert data["I(d)"] is True
    assert data["U_n"] is False


def test_analyze_rejects_degree_mismatch(capsys):
    code, out, err = run(capsys, "analyze", "0,0,1;1,0")
    assert code == 3
    assert "disagree" in err


def test_unknown_map_name_is_input_error(capsys):
    code, _, err = run(capsys, "analyze", "NoSuchMap")
    assert code == 3
    assert "unknown map" in err


def test_bad_n_is_input_error(capsys):
    code, _, err = run(capsys, "analyze", "G3", "--n", "0")
    assert code == 3


# -- iterate and reduce cross-check -----------------------------------


@pytest.mark.parametrize("name,n", [("P3", 3), ("G3", 2), ("C2", 2)])
def test_iterate_matches_reduce(capsys, name, n):
    code1, fast, _ = run_json(
        capsys, "iterate", name, "--n", str(n), "--json"
    )
    code2, brute, _ = run_json(
        capsys, "reduce", name, "--n", str(n), "--json"
    )
    assert code1 == code2 == 0
    assert fast["depths"] == brute["depths"]
    assert fast["induced_degree"] == brute["induced_degree"]
    assert fast["semistable"] == brute["semistable"]
    assert fast["formula_crosscheck"] is True


def test_iterate_on_indeterminacy_is_input_error(capsys):
    code, _, err = run(capsys, "iterate", "F3", "--n", "2")
    assert code == 3


# -- witness ----------------------------------------------------------


def test_witness_not_applicable(capsys):
    literal = '[["0","0","0","1"],["1","0","0","0"]]'
    code, data, _ = run_json(
        capsys, "witness", literal, "--n", "2", "--json"
    )
    assert code == 0
    assert data["applicable"] is False


def test_witness_build_and_replay(capsys, tmp_path):
    code, data, _ = run_json(capsys, "witness", "P3", "--n", "2", "--json")
    assert code == 0
    assert data["ok"] is True
    assert data["verified"] is True
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(data), encoding="ascii")
    code, out, _ = run(capsys, "witness", "--replay", str(path))
    assert code == 0
    assert "verified: True" in out


def test_witness_replay_rejects_tampering(capsys, tmp_path):
    code, data, _ = run_json(capsys, "witness", "P3", "--n", "2", "--json")
    assert code == 0
    # corrupt one computed limit coefficient
    for rec in data["limits"]:
        if not rec["skipped"]:
            rec["limit"]["p"][0] = "77"
            break
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(data), encoding="ascii")
    code, out, _ = run(capsys, "witness", "--replay", str(path))
    assert code == 2
    assert "verified: False" in out


def test_witness_needs_map_or_replay(capsys):
    code, _, err = run(capsys, "witness")
    assert code == 3


def test_witness_custom_lambdas(capsys):
    code, data, _ = run_json(
        capsys,
        "witness", "C2", "--n", "2", "--lambda", "2", "--lambda", "7",
        "--json",
    )
    assert code == 0
    assert data["ok"] is True


# -- selftest ---------------------------------------------------------


def test_selftest_passes_and_counts(capsys):
    code, data, _ = run_json(capsys, "selftest", "--json")
    assert code == 0
    assert data["ok"] is True
    names = [s["name"] for s in data["suites"]]
    assert names == [
        "catalog-verdicts",
        "depth-formula",
        "surplus-steps",
        "structural-lemmas",
        "negative-control",
    ]
    for suite in data["suites"]:
        assert suite["checks"] > 0
        assert suite["passed"] == suite["checks"]


def test_selftest_deterministic_output(capsys):
    _, out1, _ = run(capsys, "selftest", "--seed", "5", "--json")
    _, out2, _ = run(capsys, "selftest", "--seed", "5", "--json")
    assert out1 == out2


def test_selftest_mutation_is_detected(capsys):
    code, data, _ = run_json(
        capsys, "selftest", "--mutate", "catalog-verdicts", "--json"
    )
    assert code == 2
    assert data["ok"] is False
    bad = [s for s in data["suites"] if s["name"] == "catalog-verdicts"][0]
    assert bad["failures"]


def test_selftest_unknown_mutation_target(capsys):
    code, _, err = run(capsys, "selftest", "--mutate", "nope")
    assert code == 3


# -- samplers ---------------------------------------------------------


def test_planted_map_is_degenerate():
    from degmaps.decompose import decompose

    rng = random.Random(3)
    for _ in range(10):
        f = planted_map(rng, 4)
        dec = decompose(f)
        assert dec.is_degenerate()
        assert dec.induced_degree >= 1


def test_nondegenerate_map_has_no_holes():
    from degmaps.decompose import decompose

    rng = random.Random(4)
    for _ in range(5):
        f = nondegenerate_map(rng, 3)
        assert not decompose(f).holes.entries
