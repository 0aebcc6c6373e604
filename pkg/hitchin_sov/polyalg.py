"""Complex polynomials in one variable, the quartic in radicals, and the
companion-matrix root oracle."""

import cmath
import logging

import numpy as np
import numpy.polynomial.polynomial as poly

from hitchin_sov.conf import app_settings
from hitchin_sov.errors import ZeroPolynomial, DegenerateLeadingCoefficient

log = logging.getLogger(__name__)

_OMEGA = complex(-0.5, 3 ** 0.5 / 2)


class ComplexPoly(object):
    """Immutable polynomial with complex coefficients in ascending order."""

    __slots__ = ('coeffs',)
    # numpy scalars defer to the reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs=(0,)):
        c = [complex(a) for a in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, 'coeffs', tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError('ComplexPoly is immutable')

    @classmethod
    def from_roots(cls, roots, leading=1):
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def scale(self):
        return max(abs(c) for c in self.coeffs)

    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def __eq__(self, other):
        return isinstance(other, ComplexPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return 'ComplexPoly(%r)' % (list(self.coeffs),)

    def __add__(self, other):
        other = _coerce(other)
        return ComplexPoly(poly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _coerce(other)
        return ComplexPoly(poly.polysub(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(poly.polymul(self.coeffs, other.coeffs))
        other = complex(other)
        return ComplexPoly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ComplexPoly([1])
        for _ in range(int(k)):
            out = out * self
        return out

    def derivative(self):
        if self.degree == 0:
            return ComplexPoly([0])
        return ComplexPoly([k * c for k, c in enumerate(self.coeffs) if k > 0])

    def __call__(self, z):
        return horner(self.coeffs, z)

    evaluate = __call__

    def trimmed(self, tol):
        """Drop leading coefficients with modulus <= tol * scale."""
        c = list(self.coeffs)
        cutoff = tol * self.scale
        while len(c) > 1 and abs(c[-1]) <= cutoff:
            c.pop()
        return ComplexPoly(c)

    def as_list(self):
        return list(self.coeffs)


def _coerce(p):
    return p if isinstance(p, ComplexPoly) else ComplexPoly([p])


def horner(coeffs, z):
    """Evaluate ascending coefficients at z (scalar or ndarray)."""
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def companion_roots(p):
    """All roots of p with multiplicity, from the eigenvalues of its companion
    matrix, sorted by (real part, imaginary part)."""
    if not isinstance(p, ComplexPoly):
        p = ComplexPoly(p)
    if p.is_zero():
        raise ZeroPolynomial('cannot take the roots of the zero polynomial')
    if p.degree == 0:
        return []
    c = np.asarray(p.coeffs, dtype=complex)
    if p.degree == 1:
        roots = [-c[0] / c[1]]
    else:
        roots = list(np.linalg.eigvals(poly.polycompanion(c)))
    roots = [_polish(p, complex(r)) for r in roots]
    return sort_roots(roots)


def sort_roots(roots):
    return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


def _polish(p, z, steps=2):
    # Newton refinement, kept only while it lowers the residual.
    dp = p.derivative()
    fz = abs(p(z))
    for _ in range(steps):
        d = dp(z)
        if d == 0 or fz == 0:
            break
        w = z - p(z) / d
        fw = abs(p(w))
        if not fw < fz:
            break
        z, fz = w, fw
    return z


def root_residual(coeffs, t):
    """|p(t)| normalized by max|c_k| * max(1, |t|)^degree."""
    coeffs = list(coeffs)
    scale = max(abs(c) for c in coeffs) or 1.0
    return abs(horner(coeffs, t)) / (scale * max(1.0, abs(t)) ** (len(coeffs) - 1))


def quadratic_roots(b, c):
    """Roots of u^2 + b u + c, without cancellation."""
    b, c = complex(b), complex(c)
    disc = cmath.sqrt(b * b - 4 * c)
    if (b.conjugate() * disc).real < 0:
        disc = -disc
    q = -0.5 * (b + disc)
    if q == 0:
        return [0j, 0j]
    return [q, c / q]


def _cbrt(z):
    if z == 0:
        return 0j
    return complex(z) ** (1.0 / 3)


def cubic_roots(p2, p1, p0):
    """Roots of m^3 + p2 m^2 + p1 m + p0 by Cardano's formula."""
    shift = p2 / 3.0
    P = p1 - p2 * p2 / 3.0
    Q = 2 * p2 ** 3 / 27.0 - p2 * p1 / 3.0 + p0
    disc = cmath.sqrt((Q / 2) ** 2 + (P / 3) ** 3)
    w = -Q / 2 + disc
    w2 = -Q / 2 - disc
    if abs(w2) > abs(w):
        w = w2
    C = _cbrt(w)
    if C == 0:
        return [-shift] * 3
    return [C * _OMEGA ** k - P / (3 * C * _OMEGA ** k) - shift for k in range(3)]


def quartic_roots_radicals(c0, c1, c2, c3, c4):
    """The four roots of c0 + c1 t + c2 t^2 + c3 t^3 + c4 t^4 by Ferrari's
    method: depress, solve the resolvent cubic, split into two quadratics.

    Of the three resolvent roots the one of largest modulus is used, which
    keeps the square root below away from zero.
    """
    coeffs = [complex(c) for c in (c0, c1, c2, c3, c4)]
    scale = max(abs(c) for c in coeffs)
    if coeffs[4] == 0 or abs(coeffs[4]) < app_settings.LEADING_FLOOR * scale:
        raise DegenerateLeadingCoefficient(
            'leading coefficient %r is negligible against scale %g' % (coeffs[4], scale))
    a, b, c, d = [x / coeffs[4] for x in coeffs[3::-1]]

    # t = u - a/4 gives u^4 + p u^2 + q u + r
    p = b - 3 * a * a / 8
    q = c - a * b / 2 + a ** 3 / 8
    r = d - a * c / 4 + a * a * b / 16 - 3 * a ** 4 / 256

    ms = cubic_roots(p, p * p / 4 - r, -q * q / 8)
    m = max(ms, key=abs)
    if abs(m) <= 1e-300:
        # Only possible when p = q = r = 0 up to roundoff: u^4 + p u^2 + r.
        us = []
        for v in quadratic_roots(p, r):
            s = cmath.sqrt(v)
            us += [s, -s]
    else:
        s = cmath.sqrt(2 * m)
        half = q / (2 * s)
        us = quadratic_roots(-s, p / 2 + m + half) + quadratic_roots(s, p / 2 + m - half)

    quartic = ComplexPoly(coeffs)
    roots = sort_roots(_polish(quartic, u - a / 4, steps=1) for u in us)
    worst = max(root_residual(coeffs, t) for t in roots)
    if worst > app_settings.ROOT_TOL:
        log.warning('Quartic root residual %g exceeds %g.' % (worst, app_settings.ROOT_TOL))
    return roots
