"""Exact arithmetic for degenerate rational maps on the projective line.

Subsystems:

- scalars / tpoly: exact Gaussian rationals and Laurent polynomials in t
- homog / decompose / stability / gitequal: degenerate pairs [P:Q],
  holes and depths, iterate depth formulas, (semi)stability, case tags
- berk: action on type II points of the Berkovich line over the series field
- witness: perturbation families, exact limits, verified certificates
- cli: command-line front end and example catalog
"""

from .scalars import GaussRat, Rational, gr, rat
from .tpoly import TPoly, tp
from .homog import HomogPoly, MapPoint, Moebius, resultant
from .points import INFINITY, PPoint, pp
from .decompose import Decomposition, HoleDivisor, decompose, depth, local_multiplicity
from .stability import (
    CaseTag,
    bad_hole,
    classify_case,
    depth_iterate,
    is_in_Id,
    is_n_unstable,
    is_semistable,
    is_stable,
    iterate_compose,
    iterate_factored,
    mu_minus,
    mu_plus,
)
from .witness import Certificate, build_family_spec, certify, verify_certificate

__all__ = [
    "Certificate",
    "build_family_spec",
    "certify",
    "verify_certificate",
    "GaussRat",
    "Rational",
    "gr",
    "rat",
    "TPoly",
    "tp",
    "HomogPoly",
    "MapPoint",
    "Moebius",
    "resultant",
    "INFINITY",
    "PPoint",
    "pp",
    "Decomposition",
    "HoleDivisor",
    "decompose",
    "depth",
    "local_multiplicity",
    "CaseTag",
    "bad_hole",
    "classify_case",
    "depth_iterate",
    "is_in_Id",
    "is_n_unstable",
    "is_semistable",
    "is_stable",
    "iterate_compose",
    "iterate_factored",
    "mu_minus",
    "mu_plus",
]

__version__ = "0.1.0"
