"""JSON encoding and decoding for maps, families, and certificates.

Conventions:
  * scalars (Gaussian rationals) are strings like "3/4", "-i", "1/2+2*i";
  * rationals (exponents, radii) are strings like "-5/2";
  * projective points are scalar strings, with "inf" for [1 : 0];
  * a rational map over the constants is {"p": [...], "q": [...]} with
    coefficient strings ordered by ascending X-power; both lists must have
    the same length, and the degree is one less than that length;
  * Laurent series in t are sorted [exponent, coefficient] string pairs.

Every decoder validates shape and raises ValueError on malformed input so
the command-line layer can map failures to its input-error exit code.
"""

from __future__ import annotations

import json

from .berk import FactoredRat, TypeIIPoint
from .catalog import CATALOG
from .homog import MapPoint, Moebius
from .points import INFINITY, PPoint
from .scalars import GaussRat, rat, rat_str
from .tpoly import TPoly
from .witness import (
    Bridge,
    Certificate,
    CheckRecord,
    Family,
    FamilySpec,
    LimitRecord,
)

CERTIFICATE_FORMAT = "degmaps-certificate/1"


# -- scalars and points -----------------------------------------------


def scalar_to_str(x: GaussRat) -> str:
    return str(x)


def scalar_from_str(s) -> GaussRat:
    if not isinstance(s, str):
        raise ValueError(f"expected a scalar string, got {s!r}")
    return GaussRat.parse(s)


def point_to_str(p: PPoint) -> str:
    return "inf" if p.is_infinity else str(p.value)


def point_from_str(s) -> PPoint:
    if s == "inf":
        return INFINITY
    return PPoint(scalar_from_str(s))


def tpoly_to_json(p: TPoly) -> list:
    return [[rat_str(q), str(p.terms[q])] for q in sorted(p.terms)]


def tpoly_from_json(data) -> TPoly:
    if not isinstance(data, list):
        raise ValueError("series must be a list of [exponent, coefficient]")
    terms = {}
    for item in data:
        if not (isinstance(item, list) and len(item) == 2):
            raise ValueError(f"bad series term {item!r}")
        terms[rat(item[0])] = GaussRat.parse(item[1])
    return TPoly(terms)


# -- maps -------------------------------------------------------------


def map_to_json(f: MapPoint) -> dict:
    """A map over the constants as coefficient-string lists."""
    return {
        "p": [str(c) for c in f.p.coeffs],
        "q": [str(c) for c in f.q.coeffs],
    }


def map_from_json(data) -> MapPoint:
    if not (isinstance(data, dict) and set(data) >= {"p", "q"}):
        raise ValueError("map must be an object with 'p' and 'q' lists")
    p, q = data["p"], data["q"]
    if not (isinstance(p, list) and isinstance(q, list)):
        raise ValueError("map coefficients must be lists")
    if len(p) != len(q):
        raise ValueError(
            f"coefficient vectors disagree on degree: {len(p)} vs {len(q)}"
        )
    if len(p) < 2:
        raise ValueError("a map needs degree at least 1")
    return MapPoint.from_coeff_lists(
        [scalar_from_str(c) for c in p], [scalar_from_str(c) for c in q]
    )


def parse_map_argument(text: str) -> MapPoint:
    """A catalog name, a JSON pair of coefficient lists, or 'p0,..;q0,..'."""
    name = text.strip()
    if name in CATALOG:
        return CATALOG[name].map
    if name.startswith("["):
        try:
            data = json.loads(name)
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad JSON map literal: {exc}") from None
        if not (isinstance(data, list) and len(data) == 2):
            raise ValueError("JSON map literal must be [[p...], [q...]]")
        return map_from_json({"p": data[0], "q": data[1]})
    if ";" in name:
        p_part, _, q_part = name.partition(";")
        return map_from_json(
            {
                "p": [c.strip() for c in p_part.split(",")],
                "q": [c.strip() for c in q_part.split(",")],
            }
        )
    raise ValueError(
        f"unknown map {text!r}: expected a catalog name "
        f"({', '.join(sorted(CATALOG))}), a JSON pair of coefficient "
        "lists, or 'p0,p1,...;q0,q1,...'"
    )


def _tmap_to_json(f: MapPoint) -> dict:
    return {
        "ring": "t",
        "p": [tpoly_to_json(c) for c in f.p.coeffs],
        "q": [tpoly_to_json(c) for c in f.q.coeffs],
    }


def _tmap_from_json(data) -> MapPoint:
    p = [tpoly_from_json(c) for c in data["p"]]
    q = [tpoly_from_json(c) for c in data["q"]]
    if len(p) != len(q):
        raise ValueError("coefficient vectors disagree on degree")
    return MapPoint.from_coeff_lists(p, q)


def factored_to_json(f: FactoredRat) -> dict:
    return {
        "kind": "factored",
        "unit": tpoly_to_json(f.unit),
        "zeros": [[tpoly_to_json(r), m] for r, m in f.zeros],
        "poles": [[tpoly_to_json(r), m] for r, m in f.poles],
        "base_num": [tpoly_to_json(c) for c in f.base_num],
        "base_den": [tpoly_to_json(c) for c in f.base_den],
    }


def factored_from_json(data) -> FactoredRat:
    return FactoredRat(
        tpoly_from_json(data["unit"]),
        tuple((tpoly_from_json(r), int(m)) for r, m in data["zeros"]),
        tuple((tpoly_from_json(r), int(m)) for r, m in data["poles"]),
        [tpoly_from_json(c) for c in data["base_num"]],
        [tpoly_from_json(c) for c in data["base_den"]],
    )


def family_map_to_json(g) -> dict:
    if isinstance(g, FactoredRat):
        return factored_to_json(g)
    data = _tmap_to_json(g)
    data["kind"] = "pair"
    return data


def family_map_from_json(data):
    kind = data.get("kind")
    if kind == "factored":
        return factored_from_json(data)
    if kind == "pair":
        return _tmap_from_json(data)
    raise ValueError(f"unknown family map kind {kind!r}")


# -- Moebius transformations and vertices -----------------------------


def moebius_to_json(m: Moebius) -> dict:
    if isinstance(m.a, TPoly):
        return {
            "ring": "t",
            "entries": [tpoly_to_json(x) for x in (m.a, m.b, m.c, m.d)],
        }
    return {"ring": "c", "entries": [str(x) for x in (m.a, m.b, m.c, m.d)]}


def moebius_from_json(data) -> Moebius:
    entries = data["entries"]
    if len(entries) != 4:
        raise ValueError("a Moebius map needs four entries")
    if data.get("ring") == "t":
        return Moebius(*(tpoly_from_json(x) for x in entries))
    return Moebius(*(scalar_from_str(x) for x in entries))


def vertex_to_json(xi: TypeIIPoint) -> dict:
    return {"center": tpoly_to_json(xi.center), "alpha": rat_str(xi.alpha)}


def vertex_from_json(data) -> TypeIIPoint:
    return TypeIIPoint(tpoly_from_json(data["center"]), rat(data["alpha"]))


# -- family specifications and certificates ---------------------------


def _param_value_to_json(v):
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, str):
        return v
    if isinstance(v, GaussRat):
        return {"scalar": str(v)}
    if isinstance(v, MapPoint):
        return {"map": map_to_json(v)}
    return {"rational": rat_str(v)}


def _param_value_from_json(v):
    if isinstance(v, dict):
        if "scalar" in v:
            return scalar_from_str(v["scalar"])
        if "map" in v:
            return map_from_json(v["map"])
        if "rational" in v:
            return rat(v["rational"])
        raise ValueError(f"unknown parameter value {v!r}")
    return v


def family_to_json(fam: Family) -> dict:
    return {
        "label": fam.label,
        "lambdas": [str(lam) for lam in fam.lambdas],
        "maps": [family_map_to_json(g) for g in fam.maps],
        "conjugator": moebius_to_json(fam.conjugator),
        "vertex": vertex_to_json(fam.zeta0),
        "claims_stable": fam.claims_stable,
        "parameters": {
            k: _param_value_to_json(v) for k, v in sorted(fam.parameters.items())
        },
    }


def family_from_json(data) -> Family:
    return Family(
        label=data["label"],
        lambdas=tuple(scalar_from_str(s) for s in data["lambdas"]),
        maps=tuple(family_map_from_json(g) for g in data["maps"]),
        conjugator=moebius_from_json(data["conjugator"]),
        zeta0=vertex_from_json(data["vertex"]),
        claims_stable=bool(data["claims_stable"]),
        parameters={
            k: _param_value_from_json(v) for k, v in data["parameters"].items()
        },
    )


def bridge_to_json(b: Bridge) -> dict:
    return {
        "source": map_to_json(b.source),
        "target": map_to_json(b.target),
        "conjugator": moebius_to_json(b.conjugator),
    }


def bridge_from_json(data) -> Bridge:
    return Bridge(
        source=map_from_json(data["source"]),
        target=map_from_json(data["target"]),
        conjugator=moebius_from_json(data["conjugator"]),
    )


def family_spec_to_json(spec: FamilySpec) -> dict:
    return {
        "input": map_to_json(spec.input),
        "n": spec.n,
        "case": spec.case,
        "pre_conjugation": (
            None
            if spec.pre_conjugation is None
            else moebius_to_json(spec.pre_conjugation)
        ),
        "base": map_to_json(spec.base),
        "families": [family_to_json(f) for f in spec.families],
        "bridges": [bridge_to_json(b) for b in spec.bridges],
        "notes": list(spec.notes),
    }


def family_spec_from_json(data) -> FamilySpec:
    return FamilySpec(
        input=map_from_json(data["input"]),
        n=int(data["n"]),
        case=data["case"],
        pre_conjugation=(
            None
            if data["pre_conjugation"] is None
            else moebius_from_json(data["pre_conjugation"])
        ),
        base=map_from_json(data["base"]),
        families=tuple(family_from_json(f) for f in data["families"]),
        bridges=tuple(bridge_from_json(b) for b in data["bridges"]),
        notes=tuple(data["notes"]),
    )


def limit_to_json(rec: LimitRecord) -> dict:
    return {
        "family": rec.family_label,
        "lambda": None if rec.lam is None else str(rec.lam),
        "limit": None if rec.limit is None else map_to_json(rec.limit),
        "skipped": rec.skipped,
        "reason": rec.reason,
    }


def limit_from_json(data) -> LimitRecord:
    return LimitRecord(
        family_label=data["family"],
        lam=None if data["lambda"] is None else scalar_from_str(data["lambda"]),
        limit=None if data["limit"] is None else map_from_json(data["limit"]),
        skipped=bool(data["skipped"]),
        reason=data["reason"],
    )


def check_to_json(c: CheckRecord) -> dict:
    return {"name": c.name, "passed": c.passed, "detail": c.detail}


def check_from_json(data) -> CheckRecord:
    return CheckRecord(
        name=data["name"], passed=bool(data["passed"]), detail=data["detail"]
    )


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "format": CERTIFICATE_FORMAT,
        "input": map_to_json(cert.input),
        "n": cert.n,
        "budget": cert.budget,
        "spec": family_spec_to_json(cert.spec),
        "limits": [limit_to_json(r) for r in cert.limits],
        "checks": [check_to_json(c) for c in cert.checks],
        "ok": cert.ok,
    }


def certificate_from_json(data) -> Certificate:
    if not isinstance(data, dict):
        raise ValueError("certificate must be a JSON object")
    if data.get("format") != CERTIFICATE_FORMAT:
        raise ValueError(f"unknown certificate format {data.get('format')!r}")
    return Certificate(
        input=map_from_json(data["input"]),
        n=int(data["n"]),
        budget=int(data["budget"]),
        spec=family_spec_from_json(data["spec"]),
        limits=tuple(limit_from_json(r) for r in data["limits"]),
        checks=tuple(check_from_json(c) for c in data["checks"]),
    )


def dumps(data) -> str:
    """Deterministic serialization: fixed key order, no whitespace drift."""
    return json.dumps(data, indent=2, sort_keys=False, ensure_ascii=True)
