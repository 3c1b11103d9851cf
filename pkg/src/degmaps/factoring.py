"""Factorization of univariate polynomials over Q(i), via sympy.

This is the only place the package touches sympy; everything else stays in
the package's own exact types.
"""

from __future__ import annotations

import sympy as sp

from .scalars import GaussRat, gr, rat
from .unipoly import pmonic, pnorm

_z = sp.Symbol("z")


def _to_sympy(p: list):
    expr = sp.Integer(0)
    for i, c in enumerate(p):
        coef = sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(
            int(c.im.numerator), int(c.im.denominator)
        )
        expr += coef * _z**i
    return expr


def _from_sympy_number(c) -> GaussRat:
    c = sp.expand(c)
    re_, im_ = c.as_real_imag()
    re_ = sp.Rational(re_)
    im_ = sp.Rational(im_)
    return GaussRat(rat(int(re_.p), int(re_.q)), rat(int(im_.p), int(im_.q)))


def factor_gaussrat(p: list) -> list:
    """Monic irreducible factorization over Q(i).

    Input: coefficient list over GaussRat.  Returns a list of
    (factor_coeffs, multiplicity) with each factor monic and irreducible;
    the overall unit is dropped (callers work projectively).
    """
    p = pnorm(p)
    if len(p) <= 1:
        return []
    poly = sp.Poly(_to_sympy(p), _z, domain="QQ_I")
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        coeffs = [_from_sympy_number(c) for c in reversed(fac.all_coeffs())]
        out.append((pmonic(coeffs), int(mult)))
    return out


def roots_gaussrat(p: list) -> list:
    """Roots in Q(i) with multiplicities, as (GaussRat, int) pairs."""
    out = []
    for fac, mult in factor_gaussrat(p):
        if len(fac) == 2:
            # monic z + c  ->  root -c
            out.append((-fac[0], mult))
    return out


def nth_roots_gaussrat(c: GaussRat, n: int) -> list:
    """Solutions of x^n = c lying in Q(i)."""
    from .scalars import GR_ONE, GR_ZERO

    p = [-c] + [GR_ZERO] * (n - 1) + [GR_ONE]
    return [r for r, _ in roots_gaussrat(p)]
