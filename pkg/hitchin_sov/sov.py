#coding: utf8
"""Recovering the Hamiltonians from a spectral divisor."""

import cmath
import enum
import logging

import numpy as np
import scipy.linalg

from hitchin_sov.conf import app_settings
from hitchin_sov.errors import (DegenerateDivisor, DegenerateModel, NoSolution, NewtonDiverged,
    ShapeMismatch, InvalidCurve, ConfigError, ResidualCheckFailed, DegenerateLeadingCoefficient)
from hitchin_sov.formats import parse_complex
from hitchin_sov.hyperelliptic import HyperellipticCurve, CurvePoint
from hitchin_sov.polyalg import ComplexPoly, companion_roots, quartic_roots_radicals, horner
from hitchin_sov.spectral import (RootSystemSpec, HamiltonianVector, SpectralCurveModel, SpectralPoint,
    hamiltonian_count, block_shape, canonicalize, partials, min_separation, x_discriminant_points)

log = logging.getLogger(__name__)

SO4 = RootSystemSpec('D', 2)

# Pairs (i, j), i < j, in the order of the cross-term columns H1H2, H1H3, H2H3.
_PAIRS = [(0, 1), (0, 2), (1, 2)]


class SpectralDivisor(object):

    def __init__(self, points):
        self.points = list(points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def xs(self):
        return np.array([p.x for p in self.points], dtype=complex)

    @property
    def lams(self):
        return np.array([p.lam for p in self.points], dtype=complex)

    def subset(self, indices):
        return SpectralDivisor([self.points[i] for i in indices])

    def check(self, curve, distinct=True):
        for i, p in enumerate(self.points):
            curve.point(p.x, p.y)
        if distinct and len(self.points) > 1:
            gap = min_separation(self.xs)
            if gap <= 1e-8:
                raise DegenerateDivisor('divisor x-values are not distinct (closest pair %g apart)' % gap)
        return self

    def as_dict(self):
        return {'points': [p.as_dict() for p in self.points]}

    @classmethod
    def from_dict(cls, data, curve=None):
        if not isinstance(data, dict) or not isinstance(data.get('points'), list):
            raise ConfigError('divisor: expected an object with a "points" list')
        points = []
        for i, raw in enumerate(data['points']):
            try:
                lam, x, y = raw['lambda'], raw['x'], raw['y']
            except (KeyError, TypeError):
                raise ConfigError('divisor.points[%d]: expected "lambda", "x" and "y"' % i)
            x = parse_complex(x, 'divisor.points[%d].x' % i)
            y = parse_complex(y, 'divisor.points[%d].y' % i)
            at = curve.point(x, y) if curve is not None else CurvePoint(x, y)
            points.append(SpectralPoint(parse_complex(lam, 'divisor.points[%d].lambda' % i), at))
        return cls(points)


class Candidate(object):
    __slots__ = ('h', 'residual')

    def __init__(self, h, residual):
        self.h = h
        self.residual = float(residual)

    def as_dict(self):
        data = self.h.as_dict()
        data['residual'] = self.residual
        return data


class SolutionSet(object):

    def __init__(self, candidates, method=''):
        self.candidates = sorted(candidates, key=lambda c: c.residual)
        self.method = method

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    @property
    def best(self):
        return self.candidates[0] if self.candidates else None

    def closest(self, h):
        """The candidate nearest to h, componentwise."""
        flat = h.flat if isinstance(h, HamiltonianVector) else np.asarray(h, dtype=complex)
        return min(self.candidates, key=lambda c: float(np.max(np.abs(c.h.flat - flat))))

    def as_dict(self):
        return {'method': self.method, 'candidates': [c.as_dict() for c in self.candidates]}


class Stage(enum.Enum):
    LINEAR = 'linear'
    QUADRATIC = 'quadratic'
    DIAGONALIZED = 'diagonalized'
    EQUALIZED = 'equalized'
    QUARTIC = 'quartic'


class EliminationState(object):
    """One stage of the so(4) elimination. a holds square-term coefficients,
    b cross-term coefficients (columns H1H2, H1H3, H2H3), c linear-term
    coefficients where a stage has them, rhs the right-hand sides."""

    def __init__(self, stage, a=None, b=None, c=None, rhs=None, **data):
        self.stage = stage
        self.a = a
        self.b = b
        self.c = c
        self.rhs = rhs
        self.data = data

    def __repr__(self):
        return 'EliminationState(%s)' % self.stage.value


def divisor_scale(divisor, h, rep_dim):
    lams = np.abs(divisor.lams)
    h_max = float(np.max(np.abs(h))) if len(h) else 0.0
    return 1 + float(np.max(lams)) ** rep_dim + h_max


def _system(roots, curve, divisor, flat):
    # F_i = R(λ_i, x_i, y_i; H) and dF_i/dH_j.
    model = SpectralCurveModel(roots, curve, HamiltonianVector.from_flat(roots, curve.genus, flat))
    f = np.empty(len(divisor), dtype=complex)
    jac = np.empty((len(divisor), len(flat)), dtype=complex)
    for i, p in enumerate(divisor):
        f[i] = model.value(p.lam, p.x, p.y)
        jac[i] = partials(model, p.lam, p.at)[1]
    return f, jac


def residuals(model, divisor):
    """Scale-normalized |R| at each divisor point, and their maximum. model
    may also be a (roots, curve, h) triple."""
    if isinstance(model, tuple):
        model = SpectralCurveModel(*model)
    values = np.array([abs(model.value(p.lam, p.x, p.y)) for p in divisor])
    values /= divisor_scale(divisor, model.h.flat, model.rep_dim)
    return values, float(np.max(values)) if len(values) else 0.0


def _residual(roots, curve, divisor, flat):
    f = _system(roots, curve, divisor, flat)[0]
    return float(np.max(np.abs(f))) / divisor_scale(divisor, flat, roots.rep_dim)


def _refine(roots, curve, divisor, flat, steps=3):
    # Plain Newton steps, each kept only if it lowers the residual.
    best = _residual(roots, curve, divisor, flat)
    for _ in range(steps):
        f, jac = _system(roots, curve, divisor, flat)
        try:
            delta = scipy.linalg.lstsq(jac, -f)[0]
        except (ValueError, np.linalg.LinAlgError):
            break
        trial = flat + delta
        value = _residual(roots, curve, divisor, trial)
        if not value < best:
            break
        flat, best = trial, value
    return flat, best


def solve_newton(roots, curve, divisor, h0, tol=None, canonical=True):
    """Damped Newton on F(H) = (R(λ_i, x_i, y_i; H))_i from h0."""
    count = hamiltonian_count(roots, curve.genus)
    if len(divisor) != count:
        raise ShapeMismatch('%s on genus %d needs %d divisor points, got %d'
                            % (roots, curve.genus, count, len(divisor)))
    if tol is None:
        tol = app_settings.NEWTON_TOL
    flat = np.array(h0.flat if isinstance(h0, HamiltonianVector) else h0, dtype=complex)
    if len(flat) != count:
        raise ShapeMismatch('seed has %d coefficients, expected %d' % (len(flat), count))

    for iteration in range(app_settings.NEWTON_MAX_ITER + 1):
        f, jac = _system(roots, curve, divisor, flat)
        norm = float(np.max(np.abs(f)))
        scale = divisor_scale(divisor, flat, roots.rep_dim)
        if norm <= tol * scale:
            if iteration:
                flat = _refine(roots, curve, divisor, flat, steps=1)[0]
            break
        if iteration == app_settings.NEWTON_MAX_ITER:
            raise NewtonDiverged('no convergence after %d iterations (|F| = %g)' % (iteration, norm))
        cond = np.linalg.cond(jac)
        if not cond <= app_settings.NEWTON_MAX_COND:
            raise NewtonDiverged('Jacobian condition estimate %g at iteration %d' % (cond, iteration))
        delta = scipy.linalg.solve(jac, -f)
        t = 1.0
        while True:
            trial = flat + t * delta
            trial_norm = float(np.max(np.abs(_system(roots, curve, divisor, trial)[0])))
            if trial_norm <= (1 - 1e-4 * t) * norm or t < 1.0 / 1024:
                break
            t /= 2
        flat = trial
        log.debug('Newton iteration %d: |F| = %g, step %g.' % (iteration, trial_norm, t))

    h = HamiltonianVector.from_flat(roots, curve.genus, flat)
    if canonical:
        h = canonicalize(roots, h)
    residual = _residual(roots, curve, divisor, h.flat)
    log.info('Newton converged after %d iterations, residual %g.' % (iteration, residual))
    return SolutionSet([Candidate(h, residual)], method='newton')


def complete_seed(roots, curve, divisor, pfaffian=None):
    """Solve for the blocks entering R linearly, the Pfaffian block given,
    by least squares over the divisor equations."""
    layout = HamiltonianVector.zeros(roots, curve.genus)
    flat = layout.flat
    pf_size = 0
    if roots.has_pfaffian:
        inv = roots.invariants[0]
        pf_size = sum(block_shape(inv.degree, curve.genus))
        if pfaffian is None:
            raise ConfigError('%s needs the Pfaffian block to complete a seed' % roots)
        pfaffian = np.asarray(pfaffian, dtype=complex).reshape(-1)
        if len(pfaffian) != pf_size:
            raise ShapeMismatch('Pfaffian block has %d coefficients, expected %d' % (pf_size, len(pfaffian)))
        flat[:pf_size] = pfaffian
    f, jac = _system(roots, curve, divisor, flat)
    # R is affine in the remaining coefficients; at zero it equals f.
    linear = scipy.linalg.lstsq(jac[:, pf_size:], -f)[0]
    flat[pf_size:] = linear
    return HamiltonianVector.from_flat(roots, curve.genus, flat)


class _RoleFailed(Exception):
    pass


class _So4Elimination(object):
    """The elimination down to one quartic. H1..H3 is the Pfaffian block,
    H4..H6 the degree 2 block."""

    def __init__(self, curve, divisor):
        if curve.genus != 2:
            raise InvalidCurve('the radical solver needs a genus 2 curve, got genus %d' % curve.genus)
        if len(divisor) != 6:
            raise ShapeMismatch('so(4) on genus 2 needs 6 divisor points, got %d' % len(divisor))
        divisor.check(curve)
        lams = divisor.lams
        if np.all(np.abs(lams) <= 1e-14):
            raise DegenerateDivisor('all λ_i vanish: the linear block is unconstrained')
        order = sorted(range(6), key=lambda i: (-abs(lams[i]), i))
        self.chosen, self.others = order[:3], sorted(order[3:])
        if abs(lams[self.chosen[2]]) <= 1e-8 * abs(lams[self.chosen[0]]):
            raise DegenerateDivisor('fewer than three nonzero λ_i: insufficient rank for the linear elimination')

        self.mu = lams ** 2
        xs = divisor.xs
        self.v = np.stack([np.ones(6, dtype=complex), xs, xs * xs], axis=1)
        v_e, v_f = self.v[self.chosen], self.v[self.others]
        self.lu = scipy.linalg.lu_factor(v_e)
        # W = V_F V_E^-1
        self.w = scipy.linalg.lu_solve(self.lu, v_f.T, trans=1).T
        self.stages = [EliminationState(Stage.LINEAR, a=v_e, b=self.w, rhs=self.mu[self.chosen],
                                        chosen=list(self.chosen), others=list(self.others))]

        rows = np.zeros((3, 7), dtype=complex)
        for r, f in enumerate(self.others):
            q = np.outer(self.v[f], self.v[f])
            for k, e in enumerate(self.chosen):
                q -= self.mu[f] * self.w[r, k] / self.mu[e] * np.outer(self.v[e], self.v[e])
            rows[r, :3] = np.diag(q)
            rows[r, 3:6] = [2 * q[i, j] for i, j in _PAIRS]
            rows[r, 6] = self.mu[f] * (np.dot(self.w[r], self.mu[self.chosen]) - self.mu[f])
        self.stages.append(self._state(Stage.QUADRATIC, rows))
        self.rows = self._diagonalize(rows)
        self.stages.append(self._state(Stage.DIAGONALIZED, self.rows))

    @staticmethod
    def _state(stage, rows, **data):
        return EliminationState(stage, a=rows[:, :3].copy(), b=rows[:, 3:6].copy(),
                                c=np.zeros((3, 3), dtype=complex), rhs=rows[:, 6].copy(), **data)

    @staticmethod
    def _diagonalize(rows):
        # Gauss-Jordan on the square-term columns, partial pivoting.
        m = rows.copy()
        size = float(np.max(np.abs(m[:, :3])))
        for k in range(3):
            p = k + int(np.argmax(np.abs(m[k:, k])))
            if abs(m[p, k]) <= 1e-13 * size:
                raise DegenerateDivisor('square-term matrix is singular: insufficient rank')
            m[[k, p]] = m[[p, k]]
            m[k] /= m[k, k]
            m[k, k] = 1
            for i in range(3):
                if i != k:
                    m[i] -= m[i, k] * m[k]
                    m[i, k] = 0
        return m

    def linear_block(self, pf):
        q = (self.v @ pf) ** 2
        e = self.chosen
        return -scipy.linalg.lu_solve(self.lu, self.mu[e] + q[e] / self.mu[e])

    def quartic(self, role):
        """Quartic in t_b (b the larger of the two indices other than role),
        t = H / H_role. Raises _RoleFailed when the role divides by zero."""
        m = self.rows
        r = m[:, 6]
        if abs(r[role]) <= 1e-10 * (1 + float(np.max(np.abs(self.mu)))) ** 2:
            raise _RoleFailed('right side %d vanishes' % role)
        a, b = [k for k in range(3) if k != role]

        equalized = m.copy()
        for j in (a, b):
            if abs(r[j]) > 0:
                equalized[j] *= r[role] / r[j]
        self.stages.append(self._state(Stage.EQUALIZED, equalized, role=role))

        # Subtract the role row: r_role * row_j - r_j * row_role has no right side.
        z = {j: [complex(c) for c in r[role] * m[j, :6] - r[j] * m[role, :6]] for j in (a, b)}

        def cross(row, i, j):
            return row[3 + _PAIRS.index((min(i, j), max(i, j)))]

        t = ComplexPoly([0, 1])
        # Row b is linear in t_a: beta * t_a + gamma = 0.
        zb = z[b]
        beta = cross(zb, a, b) * t + cross(zb, a, role)
        gamma = zb[b] * t * t + cross(zb, b, role) * t + zb[role]
        za = z[a]
        a2 = za[a]
        a1 = cross(za, a, b) * t + cross(za, a, role)
        a0 = za[b] * t * t + cross(za, b, role) * t + za[role]
        quartic = gamma * gamma * a2 - a1 * gamma * beta + a0 * beta * beta
        if quartic.is_zero() or quartic.scale == 0:
            raise _RoleFailed('quartic vanishes identically')
        coeffs = [quartic[k] for k in range(5)]
        self.stages.append(EliminationState(Stage.QUARTIC, rhs=np.zeros(0), role=role, variable=b,
                                            other=a, coefficients=coeffs))
        return coeffs, beta, gamma, (a, b)

    def candidates(self, role):
        coeffs, beta, gamma, (a, b) = self.quartic(role)
        try:
            roots = quartic_roots_radicals(*coeffs)
        except DegenerateLeadingCoefficient:
            log.warning('Degenerate quartic for role H%d; falling back to companion roots.' % (role + 1))
            poly = ComplexPoly(coeffs).trimmed(app_settings.LEADING_FLOOR)
            if poly.degree < 1:
                raise _RoleFailed('quartic has no roots')
            roots = companion_roots(poly)
        m = self.rows
        out = []
        for tb in roots:
            denom = beta(tb)
            if abs(denom) <= 1e-14 * (1 + abs(tb)) * (1 + beta.scale):
                continue
            t = np.zeros(3, dtype=complex)
            t[role], t[b], t[a] = 1, tb, -gamma(tb) / denom
            form = t[role] ** 2 + sum(m[role, 3 + k] * t[i] * t[j] for k, (i, j) in enumerate(_PAIRS))
            if form == 0:
                continue
            h_role = cmath.sqrt(m[role, 6] / form)
            pf = h_role * t
            out.append(np.concatenate([pf, self.linear_block(pf)]))
        log.debug('Role H%d: %d candidates from %d quartic roots.' % (role + 1, len(out), len(roots)))
        return out


def elimination_stages(curve, divisor, role=0):
    """Stage states of the elimination for one role (0 divides by H1, 2 by H3)."""
    work = _So4Elimination(curve, divisor)
    try:
        work.quartic(role)
    except _RoleFailed as e:
        raise DegenerateDivisor('role H%d: %s' % (role + 1, e))
    return work.stages


def solve_so4_radicals(curve, divisor):
    work = _So4Elimination(curve, divisor)
    raw, failures = [], 0
    for role in (0, 2):
        try:
            raw += work.candidates(role)
        except _RoleFailed as e:
            failures += 1
            log.info('Role H%d skipped: %s.' % (role + 1, e))

    if failures == 2:
        log.warning('Both roles divide by zero; falling back to Newton from a zero Pfaffian block.')
        seed = np.concatenate([np.zeros(3, dtype=complex), work.linear_block(np.zeros(3, dtype=complex))])
        solution = solve_newton(SO4, curve, divisor, seed)
        solution.method = 'newton-fallback'
        return solution

    tol = app_settings.RESIDUAL_TOL
    kept = []
    for flat in raw:
        flat, residual = _refine(SO4, curve, divisor, flat)
        if residual > tol:
            continue
        h = canonicalize(SO4, HamiltonianVector.from_flat(SO4, 2, flat))
        if any(np.max(np.abs(h.flat - c.h.flat)) < app_settings.DUPLICATE_TOL for c in kept):
            continue
        kept.append(Candidate(h, residual))
    log.info('Radical pipeline: %d of %d candidates kept.' % (len(kept), len(raw)))
    if not kept:
        raise NoSolution('none of %d candidates has residual below %g' % (len(raw), tol))
    return SolutionSet(kept, method='radicals')


def sample_divisor(model, seed, count=None):
    """Seeded random divisor on the spectral curve of model."""
    if model.degenerate:
        raise DegenerateModel('cannot sample a divisor on a degenerate spectral curve')
    if count is None:
        count = hamiltonian_count(model.roots, model.base.genus)
    rng = np.random.default_rng(seed)
    obstacles = x_discriminant_points(model)
    spread = 1 + max(abs(e) for e in model.base.branch_points)
    gap = 0.05 * spread
    points = []
    for _ in range(1000 * count):
        if len(points) == count:
            break
        x = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * 0.75 * spread
        if any(abs(x - o) < gap for o in obstacles) or any(abs(x - p.x) < gap for p in points):
            continue
        y = cmath.sqrt(model.base(x)) * (1 if rng.random() < 0.5 else -1)
        fiber = model.fiber(x, y)
        if min_separation(fiber) < 1e-3 * (1 + max(abs(l) for l in fiber)):
            continue
        lam = fiber[int(rng.integers(len(fiber)))]
        c = model.lambda_coefficients(x, y)
        dc = [k * c[k] for k in range(1, len(c))]
        for _ in range(2):
            slope = horner(dc, lam)
            if slope != 0:
                lam -= horner(c, lam) / slope
        if abs(model.value(lam, x, y)) > 1e-10 * model.residual_scale(lam):
            raise ResidualCheckFailed('sampled point misses the spectral curve at x = %r' % x)
        points.append(SpectralPoint(lam, CurvePoint(x, y)))
    if len(points) < count:
        raise DegenerateModel('could only place %d of %d divisor points' % (len(points), count))
    return SpectralDivisor(points)


def sample_curve(genus, rng):
    """Random squarefree P of degree 2g + 1 with planted roots in |x| < 1.5."""
    planted = []
    while len(planted) < 2 * genus + 1:
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if abs(z) < 1.5 and all(abs(z - w) > 0.3 for w in planted):
            planted.append(z)
    return HyperellipticCurve(ComplexPoly.from_roots(planted))


def sample_instance(roots, genus, seed, scale=0.5):
    """A seeded random curve and Hamiltonian vector."""
    rng = np.random.default_rng(seed)
    curve = sample_curve(genus, rng)
    count = hamiltonian_count(roots, genus)
    flat = (rng.normal(size=count) + 1j * rng.normal(size=count)) * scale
    h = canonicalize(roots, HamiltonianVector.from_flat(roots, genus, flat))
    return curve, h
