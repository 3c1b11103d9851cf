"""Univariate polynomial helpers over GaussRat or TPoly coefficients.

Polynomials are plain lists [c0, c1, ...] (index = power), normalized so the
last entry is nonzero; the zero polynomial is the empty list.  Generic
operations work over any coefficient ring with +, -, *, and is_zero();
division and gcd require the GaussRat field.
"""

from __future__ import annotations

from .scalars import GR_ONE, GR_ZERO, GaussRat


def pnorm(coeffs: list) -> list:
    out = list(coeffs)
    while out and out[-1].is_zero():
        out.pop()
    return out


def pdeg(p: list) -> int:
    """Degree; -1 for the zero polynomial."""
    return len(p) - 1


def padd(p: list, q: list) -> list:
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else None
        b = q[i] if i < len(q) else None
        if a is None:
            out.append(b)
        elif b is None:
            out.append(a)
        else:
            out.append(a + b)
    return pnorm(out)


def pneg(p: list) -> list:
    return [-c for c in p]


def psub(p: list, q: list) -> list:
    return padd(p, pneg(q))


def pmul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [None] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            t = a * b
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = p[0] - p[0]
    return pnorm([zero if c is None else c for c in out])


def pscale(p: list, c) -> list:
    return pnorm([a * c for a in p])


def ppow(p: list, n: int) -> list:
    result = None
    base = p
    while n:
        if n & 1:
            result = base if result is None else pmul(result, base)
        n >>= 1
        if n:
            base = pmul(base, base)
    if result is None:
        raise ValueError("ppow with n = 0 needs a ring unit; avoid")
    return result


def peval(p: list, x):
    """Horner evaluation; returns a ring zero-compatible value for p = []."""
    if not p:
        return None
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def pshift(p: list, k: int) -> list:
    """Multiply by z^k."""
    if not p:
        return []
    zero = p[0] - p[0]
    return [zero] * k + list(p)


# -- field operations (GaussRat coefficients only) --------------------


def pdivmod(p: list, q: list) -> tuple:
    """Exact Euclidean division over the GaussRat field."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    d = len(q) - 1
    lc = q[-1]
    quot = [GR_ZERO] * max(0, len(p) - d)
    while len(r) - 1 >= d and r:
        r = pnorm(r)
        if len(r) - 1 < d:
            break
        k = len(r) - 1 - d
        c = r[-1] / lc
        quot[k] = c
        for i, b in enumerate(q):
            r[k + i] = r[k + i] - c * b
        r.pop()
    return pnorm(quot), pnorm(r)


def pmonic(p: list) -> list:
    if not p:
        return []
    lc = p[-1]
    return [c / lc for c in p]


def pgcd(p: list, q: list) -> list:
    """Monic gcd over GaussRat."""
    a, b = pnorm(p), pnorm(q)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    return pmonic(a)


def pdivexact(p: list, q: list) -> list:
    quot, rem = pdivmod(p, q)
    if rem:
        raise ValueError("polynomial division not exact")
    return quot


def root_multiplicity(p: list, z: GaussRat) -> int:
    """Multiplicity of z as a root of p (0 if not a root)."""
    m = 0
    cur = pnorm(p)
    lin = [-z, GR_ONE]
    while cur:
        quot, rem = pdivmod(cur, lin)
        if rem:
            break
        m += 1
        cur = quot
    return m


def pderiv(p: list) -> list:
    return pnorm([p[i] * i for i in range(1, len(p))])


def preverse(p: list, degree: int) -> list:
    """Coefficient reversal z -> 1/z at the given ambient degree."""
    if degree < pdeg(p):
        raise ValueError("degree smaller than polynomial degree")
    zero = p[0] - p[0] if p else GR_ZERO
    out = [zero] * (degree + 1)
    for i, c in enumerate(p):
        out[degree - i] = c
    return pnorm(out)


def pcompose(p: list, q: list) -> list:
    """p(q(z)) by Horner."""
    if not p:
        return []
    acc = [p[-1]]
    for c in reversed(p[:-1]):
        acc = padd(pmul(acc, q), [c])
    return pnorm(acc)
