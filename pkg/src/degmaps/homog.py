"""Pairs of homogeneous polynomials on the projective line.

A HomogPoly of degree d stores coeffs[j] multiplying X^j Y^(d-j); the
coefficient list doubles as the dehomogenized polynomial in z = X/Y.
MapPoint is a pair [P:Q] of equal degree, projectively normalized over the
Gaussian rationals.
"""

from __future__ import annotations

from . import unipoly as up
from .errors import DegreeMismatch
from .scalars import GR_ONE, GR_ZERO, UNITS, GaussRat, gint_gcd, gr, rat
from .tpoly import TPoly, tp


class HomogPoly:
    """Homogeneous polynomial of fixed degree in X, Y."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != degree + 1:
            raise DegreeMismatch(
                f"degree {degree} needs {degree + 1} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("HomogPoly is immutable")

    @staticmethod
    def from_univariate(p: list, degree: int, zero=GR_ZERO) -> "HomogPoly":
        """Homogenize a dehomogenized coefficient list to the given degree."""
        if len(p) - 1 > degree:
            raise DegreeMismatch("univariate degree exceeds homogeneous degree")
        return HomogPoly(degree, list(p) + [zero] * (degree + 1 - len(p)))

    def univariate(self) -> list:
        """Dehomogenization P(z, 1) as a normalized coefficient list."""
        return up.pnorm(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def x_multiplicity(self) -> int:
        """Order of vanishing at [0:1] (power of X dividing)."""
        for j, c in enumerate(self.coeffs):
            if not c.is_zero():
                return j
        return self.degree + 1

    def y_multiplicity(self) -> int:
        """Order of vanishing at [1:0] (power of Y dividing)."""
        for j in range(self.degree, -1, -1):
            if not self.coeffs[j].is_zero():
                return self.degree - j
        return self.degree + 1

    def mul(self, other: "HomogPoly") -> "HomogPoly":
        zero = self.coeffs[0] - self.coeffs[0]
        d = self.degree + other.degree
        out = [zero] * (d + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return HomogPoly(d, out)

    def pow(self, n: int) -> "HomogPoly":
        if n == 0:
            one = GR_ONE if isinstance(self.coeffs[0], GaussRat) else tp(1)
            return HomogPoly(0, [one])
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    def scale(self, c) -> "HomogPoly":
        return HomogPoly(self.degree, [a * c for a in self.coeffs])

    def compose_pair(self, a: "HomogPoly", b: "HomogPoly") -> "HomogPoly":
        """Substitute X -> a(X,Y), Y -> b(X,Y); a, b of equal degree e."""
        if a.degree != b.degree:
            raise DegreeMismatch("substitution pair must have equal degrees")
        d = self.degree
        zero = a.coeffs[0] - a.coeffs[0]
        # accumulate sum_j coeffs[j] * a^j * b^(d-j)
        result = HomogPoly(d * a.degree, [zero] * (d * a.degree + 1))
        a_pows = [None] * (d + 1)
        b_pows = [None] * (d + 1)
        for j, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            term = None
            if j > 0:
                if a_pows[j] is None:
                    a_pows[j] = a.pow(j)
                term = a_pows[j]
            if d - j > 0:
                if b_pows[d - j] is None:
                    b_pows[d - j] = b.pow(d - j)
                term = b_pows[d - j] if term is None else term.mul(b_pows[d - j])
            if term is None:
                term = HomogPoly(0, [c])
            else:
                term = term.scale(c)
            result = HomogPoly(
                result.degree,
                [x + y for x, y in zip(result.coeffs, term.coeffs)],
            )
        return result

    def eval(self, x, y):
        """Evaluate at scalars (x, y)."""
        zero = self.coeffs[0] - self.coeffs[0]
        acc = zero
        xp = None  # x^j, built incrementally
        for j, c in enumerate(self.coeffs):
            if j > 0:
                xp = x if xp is None else xp * x
            if c.is_zero():
                continue
            t = c if j == 0 else c * xp
            for _ in range(self.degree - j):
                t = t * y
            acc = acc + t
        return acc

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return self.degree == other.degree and all(
            (a - b).is_zero() for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.degree, tuple(self.coeffs)))

    def __str__(self):
        parts = []
        for j in range(self.degree, -1, -1):
            c = self.coeffs[j]
            if c.is_zero():
                continue
            xs = "" if j == 0 else ("X" if j == 1 else f"X^{j}")
            k = self.degree - j
            ys = "" if k == 0 else ("Y" if k == 1 else f"Y^{k}")
            cs = str(c)
            if ("+" in cs[1:]) or ("-" in cs[1:]) or "t" in cs:
                cs = f"({cs})"
            mono = "".join(x for x in (xs, ys) if x)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"HomogPoly({self})"


class MapPoint:
    """A pair [P:Q] of equal-degree homogeneous polynomials, not both zero."""

    __slots__ = ("p", "q")

    def __init__(self, p: HomogPoly, q: HomogPoly):
        if p.degree != q.degree:
            raise DegreeMismatch("P and Q must have the same degree")
        if p.is_zero() and q.is_zero():
            raise ValueError("[0:0] is not a point of projective space")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("MapPoint is immutable")

    @property
    def degree(self) -> int:
        return self.p.degree

    def is_gaussrat(self) -> bool:
        for c in self.p.coeffs + self.q.coeffs:
            if not c.is_zero():
                return isinstance(c, GaussRat)
        return True

    @staticmethod
    def from_coeff_lists(p_coeffs, q_coeffs, degree=None) -> "MapPoint":
        if degree is None:
            degree = max(len(p_coeffs), len(q_coeffs)) - 1
        everything = list(p_coeffs) + list(q_coeffs)
        if any(isinstance(c, TPoly) for c in everything):
            zero = TPoly.zero()
            coerce = tp
        else:
            zero = GR_ZERO
            coerce = gr
        p = HomogPoly.from_univariate([coerce(c) for c in p_coeffs], degree, zero)
        q = HomogPoly.from_univariate([coerce(c) for c in q_coeffs], degree, zero)
        return MapPoint(p, q)

    # -- canonical form over GaussRat --------------------------------

    def canonical(self) -> "MapPoint":
        """Clear Z[i] content and fix the unit so the first nonzero
        coefficient has positive real part (ties: positive imaginary)."""
        if not self.is_gaussrat():
            raise TypeError("canonical form is defined over GaussRat only")
        coeffs = list(self.p.coeffs) + list(self.q.coeffs)
        # common denominator
        den = 1
        for c in coeffs:
            den = den * c.re.denominator // _gcd(den, int(c.re.denominator))
            den = den * c.im.denominator // _gcd(den, int(c.im.denominator))
        ints = []
        for c in coeffs:
            r = c.re * den
            i = c.im * den
            ints.append((int(r), int(i)))
        g = (0, 0)
        for z in ints:
            if z != (0, 0):
                g = gint_gcd(g, z) if g != (0, 0) else z
        scale = GaussRat(rat(den)) * GaussRat(rat(g[0]), rat(g[1])).inv()
        scaled = [c * scale for c in coeffs]
        first = next(c for c in scaled if not c.is_zero())
        unit = GR_ONE
        for u in UNITS:
            v = first * u
            if v.re > 0 or (v.re == 0 and v.im > 0):
                unit = u
                break
        scaled = [c * unit for c in scaled]
        n = self.degree + 1
        return MapPoint(
            HomogPoly(self.degree, scaled[:n]), HomogPoly(self.degree, scaled[n:])
        )

    # -- composition --------------------------------------------------

    def compose(self, other: "MapPoint") -> "MapPoint":
        """self after other, as a literal homogeneous pair (no gcd)."""
        return MapPoint(
            self.p.compose_pair(other.p, other.q),
            self.q.compose_pair(other.p, other.q),
        )

    def scale(self, c) -> "MapPoint":
        return MapPoint(self.p.scale(c), self.q.scale(c))

    def __eq__(self, other):
        if not isinstance(other, MapPoint):
            return NotImplemented
        if self.is_gaussrat() and other.is_gaussrat():
            a, b = self.canonical(), other.canonical()
            return a.p == b.p and a.q == b.q
        return proj_equal(self, other)

    def __hash__(self):
        c = self.canonical()
        return hash((c.p, c.q))

    def __str__(self):
        return f"[{self.p} : {self.q}]"

    def __repr__(self):
        return f"MapPoint({self})"


def proj_equal(f: MapPoint, g: MapPoint) -> bool:
    """Projective equality via cross-multiplication (any coefficient ring)."""
    if f.degree != g.degree:
        return False
    fc = list(f.p.coeffs) + list(f.q.coeffs)
    gc = list(g.p.coeffs) + list(g.q.coeffs)
    i0 = next((i for i, c in enumerate(fc) if not c.is_zero()), None)
    j0 = next((j for j, c in enumerate(gc) if not c.is_zero()), None)
    if i0 != j0:
        return False
    a, b = fc[i0], gc[i0]
    return all((fc[k] * b - gc[k] * a).is_zero() for k in range(len(fc)))


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b) if gcd(a, b) else 1


def resultant(p: HomogPoly, q: HomogPoly) -> GaussRat:
    """Sylvester determinant of a degree-d pair over GaussRat."""
    if p.degree != q.degree:
        raise DegreeMismatch("resultant needs equal degrees")
    d = p.degree
    if d < 1:
        raise DegreeMismatch("resultant needs degree >= 1")
    n = 2 * d
    # rows: d rows of p-coefficients (descending), d rows of q
    a = [list(reversed(p.coeffs)), list(reversed(q.coeffs))]
    m = []
    for blk in range(2):
        for r in range(d):
            row = [GR_ZERO] * n
            for k, c in enumerate(a[blk]):
                row[r + k] = c
            m.append(row)
    return _det_fraction(m)


def _det_fraction(m: list) -> GaussRat:
    """Exact determinant by Gaussian elimination over the field."""
    n = len(m)
    m = [row[:] for row in m]
    det = GR_ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            return GR_ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        inv = m[col][col].inv()
        for r in range(col + 1, n):
            if m[r][col].is_zero():
                continue
            factor = m[r][col] * inv
            for c in range(col, n):
                m[r][c] = m[r][c] - factor * m[col][c]
    return det


# -- Moebius maps -----------------------------------------------------


class Moebius:
    """A degree-1 projective transformation given by a 2x2 matrix."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        det = a * d - b * c
        if det.is_zero() if hasattr(det, "is_zero") else det == 0:
            raise ValueError("singular Moebius matrix")

    def __setattr__(self, name, value):
        raise AttributeError("Moebius is immutable")

    def __eq__(self, other):
        if not isinstance(other, Moebius):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (
            other.a,
            other.b,
            other.c,
            other.d,
        )

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    @staticmethod
    def identity_gauss() -> "Moebius":
        return Moebius(GR_ONE, GR_ZERO, GR_ZERO, GR_ONE)

    @staticmethod
    def identity_tpoly() -> "Moebius":
        return Moebius(tp(1), tp(0), tp(0), tp(1))

    def inverse(self) -> "Moebius":
        """Projective inverse (adjugate)."""
        return Moebius(self.d, -self.b, -self.c, self.a)

    def then(self, other: "Moebius") -> "Moebius":
        """other composed after self (matrix product other * self)."""
        return Moebius(
            other.a * self.a + other.b * self.c,
            other.a * self.b + other.b * self.d,
            other.c * self.a + other.d * self.c,
            other.c * self.b + other.d * self.d,
        )

    def as_mappoint(self) -> MapPoint:
        return MapPoint(
            HomogPoly(1, [self.b, self.a]), HomogPoly(1, [self.d, self.c])
        )

    def conjugate(self, f: MapPoint) -> MapPoint:
        """M o f o M^(-1) as a literal homogeneous pair."""
        inv = self.inverse()
        x = HomogPoly(1, [inv.b, inv.a])
        y = HomogPoly(1, [inv.d, inv.c])
        p1 = f.p.compose_pair(x, y)
        q1 = f.q.compose_pair(x, y)
        return MapPoint(
            HomogPoly(p1.degree, [self.a * u + self.b * v for u, v in zip(p1.coeffs, q1.coeffs)]),
            HomogPoly(p1.degree, [self.c * u + self.d * v for u, v in zip(p1.coeffs, q1.coeffs)]),
        )
