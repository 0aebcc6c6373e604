#coding: utf8
"""Spectral curves R(λ, x, y; H) = 0 of the classical root systems.

R is monic of degree rep_dim in λ. A non-Pfaffian invariant of degree d
contributes r(x, y) λ^(rep_dim - d), the Pfaffian of the D series
contributes r_0(x, y)^2, where

    r(x, y) = sum_k h0[k] x^k + y sum_s h1[s] x^s

with d(g - 1) + 1 coefficients h0 and max(0, (d - 1)(g - 1) - 1)
coefficients h1.
"""

import cmath
import logging
from collections import namedtuple

import numpy as np

import hitchin_sov
from hitchin_sov.conf import app_settings
from hitchin_sov.errors import UnsupportedFamily, ShapeMismatch, ConfigError, SheetCollision, InvalidPoint
from hitchin_sov.formats import complex_pair, complex_pairs, parse_complex_list
from hitchin_sov.hyperelliptic import y_step, march
from hitchin_sov.polyalg import ComplexPoly, companion_roots, horner, quadratic_roots, sort_roots

log = logging.getLogger(__name__)

Invariant = namedtuple('Invariant', 'degree pfaffian')
Coefficient = namedtuple('Coefficient', 'index degree pfaffian series power')

# Fixed sample points for the identically-degenerate test; any generic points do.
_PROBES = (0.3183 + 0.7071j, -0.6180 + 0.2718j, 0.9134 - 0.4142j)


class RootSystemSpec(object):

    def __init__(self, family, rank):
        self.info = hitchin_sov.lookup(family)
        if self.info is None:
            raise UnsupportedFamily('unknown root system family %r' % (family,))
        try:
            self.rank = int(rank)
        except (TypeError, ValueError):
            raise ConfigError('rank must be an integer, got %r' % (rank,))
        self.family = str(family).upper()
        if self.rank < self.info['min_rank']:
            raise UnsupportedFamily('%s needs rank >= %d, got %d'
                                    % (self.family, self.info['min_rank'], self.rank))

    def __repr__(self):
        return '%s%d' % (self.family, self.rank)

    def __eq__(self, other):
        return isinstance(other, RootSystemSpec) and (self.family, self.rank) == (other.family, other.rank)

    def __hash__(self):
        return hash((self.family, self.rank))

    @property
    def name(self):
        return self.info['name']

    @property
    def rep_dim(self):
        return self.info['rep_dim'](self.rank)

    @property
    def dimension(self):
        return self.info['dimension'](self.rank)

    @property
    def invariants(self):
        """Pfaffian first (if any), then the others by ascending degree."""
        out = []
        if self.info['pfaffian_degree'] is not None:
            out.append(Invariant(self.info['pfaffian_degree'](self.rank), True))
        out += [Invariant(d, False) for d in sorted(self.info['degrees'](self.rank))]
        return out

    @property
    def has_pfaffian(self):
        return self.info['pfaffian_degree'] is not None

    def as_dict(self):
        return {'family': self.family, 'rank': self.rank}


def invariant_degrees(roots):
    return roots.invariants


def block_shape(degree, genus):
    return degree * (genus - 1) + 1, max(0, (degree - 1) * (genus - 1) - 1)


def _check_genus(genus):
    if isinstance(genus, bool) or not isinstance(genus, (int, np.integer)) or genus < 2:
        raise ConfigError('genus must be an integer >= 2, got %r' % (genus,))
    return int(genus)


def hamiltonian_count(roots, genus):
    genus = _check_genus(genus)
    return roots.dimension * (genus - 1)


def reduced_system_size(roots, genus):
    """Unknowns left once the blocks entering R linearly are eliminated."""
    genus = _check_genus(genus)
    for inv in roots.invariants:
        if inv.pfaffian:
            return sum(block_shape(inv.degree, genus))
    return 0


def flat_layout(roots, genus):
    genus = _check_genus(genus)
    layout = []
    for inv in roots.invariants:
        n0, n1 = block_shape(inv.degree, genus)
        for series, size in (('h0', n0), ('h1', n1)):
            for k in range(size):
                layout.append(Coefficient(len(layout) + 1, inv.degree, inv.pfaffian, series, k))
    return layout


def _lambda_power(roots, inv):
    return 0 if inv.pfaffian else roots.rep_dim - inv.degree


def _term(power, name):
    if power == 0:
        return name
    if power == 1:
        return 'x %s' % name
    return 'x^%d %s' % (power, name)


def _lambda(power):
    if power == 0:
        return ''
    if power == 1:
        return ' λ'
    return ' λ^%d' % power


def render(roots, genus):
    """The spectral polynomial written with flat coefficient names H1..HN."""
    layout = flat_layout(roots, genus)
    parts = ['λ^%d' % roots.rep_dim]
    pfaffian = None
    for inv in roots.invariants:
        coeffs = [c for c in layout if c.degree == inv.degree and c.pfaffian == inv.pfaffian]
        body = ' + '.join(_term(c.power, 'H%d' % c.index) for c in coeffs if c.series == 'h0')
        ys = [_term(c.power, 'H%d' % c.index) for c in coeffs if c.series == 'h1']
        if len(ys) == 1:
            body += ' + y %s' % ys[0]
        elif ys:
            body += ' + y (%s)' % ' + '.join(ys)
        if inv.pfaffian:
            pfaffian = '(%s)^2' % body
        else:
            parts.append('(%s)%s' % (body, _lambda(_lambda_power(roots, inv))))
    if pfaffian:
        parts.append(pfaffian)
    return ' + '.join(parts)


class Block(object):
    __slots__ = ('invariant', 'h0', 'h1')

    def __init__(self, invariant, h0, h1):
        self.invariant = invariant
        self.h0 = np.array(h0, dtype=complex).reshape(-1)
        self.h1 = np.array(h1, dtype=complex).reshape(-1)

    @property
    def label(self):
        return 'degree %d%s' % (self.invariant.degree, ' (pfaffian)' if self.invariant.pfaffian else '')

    def as_dict(self):
        return {
            'degree': self.invariant.degree,
            'pfaffian': self.invariant.pfaffian,
            'h0': complex_pairs(self.h0),
            'h1': complex_pairs(self.h1),
        }


class HamiltonianVector(object):
    """The coefficients of the invariant expansion, block by block in
    flat_layout order."""

    def __init__(self, roots, genus, blocks):
        self.roots = roots
        self.genus = _check_genus(genus)
        expected = roots.invariants
        if len(blocks) != len(expected):
            raise ShapeMismatch('%s on genus %d has %d blocks, got %d'
                                % (roots, genus, len(expected), len(blocks)))
        for inv, block in zip(expected, blocks):
            if block.invariant != inv:
                raise ShapeMismatch('expected block %r, got %r' % (inv, block.invariant))
            n0, n1 = block_shape(inv.degree, self.genus)
            if len(block.h0) != n0 or len(block.h1) != n1:
                raise ShapeMismatch('block %s: expected %d h0 and %d h1 coefficients, got %d and %d'
                                    % (block.label, n0, n1, len(block.h0), len(block.h1)))
        self.blocks = list(blocks)

    @classmethod
    def zeros(cls, roots, genus):
        return cls.from_flat(roots, genus, np.zeros(hamiltonian_count(roots, genus), dtype=complex))

    @classmethod
    def from_flat(cls, roots, genus, values):
        values = np.asarray(values, dtype=complex).reshape(-1)
        count = hamiltonian_count(roots, genus)
        if len(values) != count:
            raise ShapeMismatch('%s on genus %d has %d Hamiltonians, got %d'
                                % (roots, genus, count, len(values)))
        blocks, at = [], 0
        for inv in roots.invariants:
            n0, n1 = block_shape(inv.degree, genus)
            blocks.append(Block(inv, values[at:at + n0], values[at + n0:at + n0 + n1]))
            at += n0 + n1
        return cls(roots, genus, blocks)

    @property
    def flat(self):
        return np.concatenate([np.concatenate([b.h0, b.h1]) for b in self.blocks])

    def __len__(self):
        return sum(len(b.h0) + len(b.h1) for b in self.blocks)

    def __repr__(self):
        return 'HamiltonianVector(%s, genus=%d, %r)' % (self.roots, self.genus, list(self.flat))

    @property
    def pfaffian(self):
        for block in self.blocks:
            if block.invariant.pfaffian:
                return block
        return None

    def negate_pfaffian(self):
        blocks = [Block(b.invariant, -b.h0, -b.h1) if b.invariant.pfaffian else b for b in self.blocks]
        return HamiltonianVector(self.roots, self.genus, blocks)

    def as_dict(self):
        data = self.roots.as_dict()
        data['genus'] = self.genus
        data['blocks'] = [b.as_dict() for b in self.blocks]
        return data

    @classmethod
    def from_dict(cls, data, roots=None, genus=None):
        if not isinstance(data, dict):
            raise ConfigError('hamiltonian: expected an object')
        if roots is None:
            roots = RootSystemSpec(data.get('family', 'D'), data.get('rank', 2))
        if genus is None:
            genus = data.get('genus')
        if 'H' in data:
            return cls.from_flat(roots, genus, parse_complex_list(data['H'], 'hamiltonian.H'))
        if 'blocks' not in data:
            raise ConfigError('hamiltonian: expected "blocks" or "H"')
        given = {}
        for i, raw in enumerate(data['blocks']):
            inv = Invariant(raw.get('degree'), bool(raw.get('pfaffian', False)))
            given[inv] = Block(inv, parse_complex_list(raw.get('h0', []), 'blocks[%d].h0' % i),
                               parse_complex_list(raw.get('h1', []), 'blocks[%d].h1' % i))
        blocks = []
        for inv in roots.invariants:
            if inv not in given:
                raise ShapeMismatch('missing block degree %d%s'
                                    % (inv.degree, ' (pfaffian)' if inv.pfaffian else ''))
            blocks.append(given.pop(inv))
        if given:
            raise ShapeMismatch('unexpected blocks: %s' % ', '.join(b.label for b in given.values()))
        return cls(roots, genus, blocks)


def canonicalize(roots, h):
    """The representative whose first non-negligible Pfaffian coefficient has
    nonnegative real part (nonnegative imaginary part on a tie)."""
    block = h.pfaffian
    if block is None:
        return h
    values = np.concatenate([block.h0, block.h1])
    floor = 1e-12 * (1 + float(np.max(np.abs(h.flat))))
    for v in values:
        if abs(v) > floor:
            if v.real < 0 or (v.real == 0 and v.imag < 0):
                return h.negate_pfaffian()
            return h
    return h


class SpectralPoint(object):
    __slots__ = ('lam', 'at')

    def __init__(self, lam, at):
        self.lam = complex(lam)
        self.at = at

    @property
    def x(self):
        return self.at.x

    @property
    def y(self):
        return self.at.y

    def __repr__(self):
        return 'SpectralPoint(%r, %r, %r)' % (self.lam, self.x, self.y)

    def as_dict(self):
        data = self.at.as_dict()
        data['lambda'] = complex_pair(self.lam)
        return data


class SpectralCurveModel(object):

    def __init__(self, roots, base, h):
        self.roots = roots
        self.base = base
        self.h = h
        self.rep_dim = roots.rep_dim
        self.terms = []
        for block in h.blocks:
            a, b = ComplexPoly(block.h0), ComplexPoly(block.h1 if len(block.h1) else [0])
            self.terms.append((block.invariant, _lambda_power(roots, block.invariant), a, b))
        self.even = self.rep_dim % 2 == 0 and all(p % 2 == 0 for _, p, _, _ in self.terms)
        self.y_free = all(len(block.h1) == 0 or not np.any(block.h1) for block in h.blocks)
        self.h_max = float(np.max(np.abs(h.flat)))
        self.scale = 1 + self.h_max
        self._degenerate = None
        self._discriminant_points = None

    def __repr__(self):
        return 'SpectralCurveModel(%s, genus=%d)' % (self.roots, self.base.genus)

    def r(self, inv_index, x, y):
        _, _, a, b = self.terms[inv_index]
        return a(x) + y * b(x)

    def lambda_coefficients(self, x, y):
        """Coefficients of R(·, x, y) in ascending powers of λ."""
        c = np.zeros(self.rep_dim + 1, dtype=complex)
        c[-1] = 1
        for inv, power, a, b in self.terms:
            r = a(x) + y * b(x)
            if inv.pfaffian:
                c[0] += r * r
            else:
                c[power] += r
        return c

    def value(self, lam, x, y):
        return horner(self.lambda_coefficients(x, y), lam)

    def residual_scale(self, lam):
        return 1 + abs(lam) ** self.rep_dim + self.h_max

    def fiber(self, x, y):
        c = self.lambda_coefficients(x, y)
        if self.even:
            mu = c[::2]
            if len(mu) == 3:
                mus = quadratic_roots(mu[1], mu[0])
            else:
                mus = companion_roots(ComplexPoly(mu))
            roots = []
            for m in mus:
                s = cmath.sqrt(m)
                roots += [s, -s]
            return sort_roots(roots)
        return companion_roots(ComplexPoly(c))

    @property
    def degenerate(self):
        """True when the λ-fiber has a repeated root at every x."""
        if self._degenerate is None:
            self._degenerate = all(_collides(self.fiber(x, cmath.sqrt(self.base(x)))) for x in _PROBES)
            if self._degenerate:
                log.info('%r is degenerate: its fiber collides everywhere.' % self)
        return self._degenerate

    @property
    def discriminant_points(self):
        """Cached x_discriminant_points(self) without the branch points."""
        if self._discriminant_points is None:
            self._discriminant_points = x_discriminant_points(self, include_branch_points=False)
        return self._discriminant_points

    def as_dict(self):
        return {
            'curve': self.base.as_dict(),
            'hamiltonian': self.h.as_dict(),
            'degenerate': self.degenerate,
        }


def _collides(roots):
    spread = 1 + max(abs(r) for r in roots)
    return min_separation(roots) <= app_settings.NEAR_DISCRIMINANT * spread


def min_separation(roots):
    roots = list(roots)
    if len(roots) < 2:
        return float('inf')
    return min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:])


def build_model(roots, base, h, canonical=True):
    if h.roots != roots:
        raise ShapeMismatch('Hamiltonians are for %s, model is %s' % (h.roots, roots))
    if h.genus != base.genus:
        raise ShapeMismatch('Hamiltonians are laid out for genus %d, curve has genus %d'
                            % (h.genus, base.genus))
    if canonical:
        h = canonicalize(roots, h)
    return SpectralCurveModel(roots, base, h)


def eval_R(model, lam, pt):
    return model.value(complex(lam), pt.x, pt.y)


def partials(model, lam, pt):
    """(dR/dλ, dR/dH in flat order).

    The Pfaffian enters R squared, so its coefficients carry the chain rule
    factor 2 r_0; so4_partials leaves that factor out."""
    lam, x, y = complex(lam), pt.x, pt.y
    c = model.lambda_coefficients(x, y)
    d_lam = horner([k * c[k] for k in range(1, len(c))], lam)
    out = []
    for inv, power, a, b in model.terms:
        n0, n1 = block_shape(inv.degree, model.h.genus)
        if inv.pfaffian:
            factor = 2 * (a(x) + y * b(x))
        else:
            factor = lam ** power
        out += [factor * x ** k for k in range(n0)]
        out += [factor * y * x ** s for s in range(n1)]
    return d_lam, np.array(out, dtype=complex)


def so4_partials(h, lam, x):
    """Closed-form so(4) derivatives on a genus 2 curve, flat order H1..H6.

    The Pfaffian entries omit the chain-rule factor 2; partials() carries it.
    """
    h = np.asarray(h, dtype=complex)
    pf = h[0] + x * h[1] + x * x * h[2]
    d_h = [pf, x * pf, x * x * pf, lam ** 2, lam ** 2 * x, lam ** 2 * x * x]
    d_lam = 4 * lam ** 3 + 2 * lam * (h[3] + x * h[4] + x * x * h[5])
    return d_lam, np.array(d_h, dtype=complex)


def dR_dx(model, lam, pt):
    """Derivative of R along the base curve: ∂R/∂x + ∂R/∂y P'(x) / (2y)."""
    lam, x, y = complex(lam), pt.x, pt.y
    dy_dx = model.base.dp(x) / (2 * y)
    total = 0j
    for inv, power, a, b in model.terms:
        da, db = a.derivative(), b.derivative()
        along = da(x) + y * db(x) + b(x) * dy_dx
        if inv.pfaffian:
            total += 2 * (a(x) + y * b(x)) * along
        else:
            total += lam ** power * along
    return total


def lambda_fiber(model, pt):
    return model.fiber(pt.x, pt.y)


def _nearest(fiber, lam):
    """Index of the fiber root nearest lam and that root's distance to the rest."""
    k = min(range(len(fiber)), key=lambda i: abs(fiber[i] - lam))
    gap = min((abs(fiber[i] - fiber[k]) for i in range(len(fiber)) if i != k), default=float('inf'))
    return k, gap


def cover_step(model):
    """Step function for march() carrying (y, λ) over the spectral cover.

    A step is refused unless λ moves by less than a third of the gap to the
    next fiber root at both ends, and unless it stays within half the distance
    from x0 to the nearest discriminant point."""
    ystep = y_step(model.base)
    tol = app_settings.SHEET_COLLISION_TOL
    obstacles = model.discriminant_points

    def step(x0, x1, state):
        y0, lam0 = state
        if obstacles:
            p = min(obstacles, key=lambda q: abs(x0 - q))
            if abs(x0 - p) <= app_settings.NEAR_DISCRIMINANT * (1 + abs(p)):
                raise SheetCollision('continuation reached the discriminant point %r' % p)
            if abs(x1 - x0) > 0.5 * abs(x0 - p):
                return None
        y1 = ystep(x0, x1, y0)
        if y1 is None:
            return None
        c = model.lambda_coefficients(x1, y1)
        dc = [k * c[k] for k in range(1, len(c))]
        lam = lam0
        for _ in range(app_settings.NEWTON_INNER_MAX):
            slope = horner(dc, lam)
            if slope == 0:
                return None
            delta = horner(c, lam) / slope
            lam -= delta
            if abs(delta) <= 1e-13 * (1 + abs(lam)):
                break
        else:
            return None
        fiber = model.fiber(x1, y1)
        if min_separation(fiber) < tol * (1 + max(abs(r) for r in fiber)):
            raise SheetCollision('λ-fiber collides near x = %r' % x1)
        _, gap0 = _nearest(model.fiber(x0, y0), lam0)
        landed, gap1 = _nearest(fiber, lam)
        if abs(lam - lam0) > min(gap0, gap1) / 3 or abs(fiber[landed] - lam) > gap1 / 3:
            return None
        return y1, lam
    return step


def continue_lambda(model, path, y_start, lambda_start, return_y=False):
    y_start, lambda_start = complex(y_start), complex(lambda_start)
    if not model.base.contains(path.start, y_start):
        raise InvalidPoint('y_start = %r is not over the path start %r' % (y_start, path.start))
    residual = abs(model.value(lambda_start, path.start, y_start))
    if residual > app_settings.RESIDUAL_TOL * model.residual_scale(lambda_start):
        raise InvalidPoint('λ = %r is not on the spectral curve over %r (|R| = %g)'
                           % (lambda_start, path.start, residual))
    y, lam = march(path, (y_start, lambda_start), cover_step(model))
    return (lam, y) if return_y else lam


def _poly_trim(p, tol):
    c = list(p)
    while len(c) > 1 and abs(c[-1]) <= tol:
        c.pop()
    return ComplexPoly(c)


def _det_bareiss(matrix, tol):
    # Fraction-free elimination over polynomials in x; the divisions are
    # exact in exact arithmetic and only approximately so here.
    n = len(matrix)
    a = [row[:] for row in matrix]
    denom = ComplexPoly([1])
    sign = 1
    for k in range(n - 1):
        if a[k][k].scale <= tol:
            swap = next((i for i in range(k + 1, n) if a[i][k].scale > tol), None)
            if swap is None:
                return ComplexPoly([0])
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * pivot - a[i][k] * a[k][j]
                if k > 0:
                    q = np.polynomial.polynomial.polydiv(np.asarray(num.coeffs), np.asarray(denom.coeffs))[0]
                    num = ComplexPoly(q)
                a[i][j] = _poly_trim(num, tol)
        denom = pivot
    return a[n - 1][n - 1] * sign


def discriminant(coeffs, tol=1e-14):
    """Discriminant (up to a constant) of sum_k coeffs[k] t^k, coeffs being
    polynomials in x, as the Sylvester determinant of f and f'."""
    f = list(coeffs)
    m = len(f) - 1
    df = [f[k] * k for k in range(1, m + 1)]
    size = 2 * m - 1
    zero = ComplexPoly([0])
    rows = []
    # descending powers of t across the columns
    for r in range(m - 1):
        row = [zero] * size
        for k in range(m + 1):
            row[r + m - k] = f[k]
        rows.append(row)
    for r in range(m):
        row = [zero] * size
        for k in range(m):
            row[r + m - 1 - k] = df[k]
        rows.append(row)
    return _det_bareiss(rows, tol)


def _x_coefficients(model):
    # λ-coefficients of R as (c_k(x), d_k(x)) with R = sum (c_k + y d_k) λ^k
    # after reducing y^2 = P.
    n = model.rep_dim
    c = [ComplexPoly([0]) for _ in range(n + 1)]
    d = [ComplexPoly([0]) for _ in range(n + 1)]
    c[n] = ComplexPoly([1])
    for inv, power, a, b in model.terms:
        if inv.pfaffian:
            c[0] = c[0] + a * a + model.base.p * b * b
            d[0] = d[0] + a * b * 2
        else:
            c[power] = c[power] + a
            d[power] = d[power] + b
    return c, d


def x_discriminant_points(model, include_branch_points=True):
    """x-values over which the λ-fiber has a repeated root."""
    branch = list(model.base.branch_points) if include_branch_points else []
    if model.degenerate:
        return branch
    tol = app_settings.DISCRIMINANT_TOL
    if model.roots.family == 'D' and model.roots.rank == 2 and model.y_free:
        s = model.terms[1][2]
        p = model.terms[0][2]
        loci = [s * s - p * p * 4, p]
    else:
        c, d = _x_coefficients(model)
        if model.even:
            c, d = c[::2], d[::2]
        if all(q.is_zero() for q in d):
            f = c
            zero_root = c[0]
        else:
            # Norm over the two sheets: (sum c_k t^k)^2 - P (sum d_k t^k)^2.
            f = [ComplexPoly([0]) for _ in range(2 * len(c) - 1)]
            for i in range(len(c)):
                for j in range(len(c)):
                    f[i + j] = f[i + j] + c[i] * c[j] - model.base.p * d[i] * d[j]
            zero_root = f[0]
        scale = max(q.scale for q in f)
        loci = [discriminant(f, tol * scale)]
        if model.even:
            loci.append(zero_root)
    points = []
    for q in loci:
        if not np.all(np.isfinite(q.coeffs)):
            log.warning('%r: discriminant overflowed; using branch points only.' % model)
            continue
        q = q.trimmed(tol)
        if q.degree < 1:
            continue
        for z in companion_roots(q):
            if all(abs(z - w) > 1e-9 * (1 + abs(z)) for w in points):
                points.append(z)
    log.debug('%r: %d discriminant points.' % (model, len(points)))
    return branch + sort_roots(points)
