#coding: utf8
"""Angle coordinates: φ_j = -Σ_i ∫ R'_{H_j} / (y R'_λ) dx from the base point
to each divisor point, λ and y continued along the path."""

import cmath
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from hitchin_sov.conf import app_settings
from hitchin_sov.errors import DegenerateModel, NearDiscriminant, SheetMatchFailed, SheetCollision
from hitchin_sov.formats import complex_pair, complex_pairs
from hitchin_sov.hyperelliptic import (CurvePoint, plan_path, continue_y, default_basepoint,
    integrate_path)
from hitchin_sov.spectral import partials, cover_step, continue_lambda

log = logging.getLogger(__name__)


class PathRecord(object):
    """How one divisor point was reached: the path, the lifts of the base
    point it starts from, and the panel count the quadrature settled on."""

    def __init__(self, path, base_y, base_lambda, panels):
        self.path = path
        self.base_y = complex(base_y)
        self.base_lambda = complex(base_lambda)
        self.panels = panels

    def as_dict(self):
        data = self.path.as_dict()
        data.update({
            'base_y': complex_pair(self.base_y),
            'base_lambda': complex_pair(self.base_lambda),
            'panels': self.panels,
        })
        return data


class AngleVector(object):

    def __init__(self, phi, basepoint, path_class):
        self.phi = np.asarray(phi, dtype=complex)
        self.basepoint = complex(basepoint)
        self.path_class = list(path_class)

    def __len__(self):
        return len(self.phi)

    def as_dict(self, paths=False):
        data = {'basepoint': complex_pair(self.basepoint), 'phi': complex_pairs(self.phi)}
        if paths:
            data['paths'] = [r.as_dict() for r in self.path_class]
        return data


def _check_slope(model, d_lam, lam, x):
    if abs(d_lam) <= app_settings.DISCRIMINANT_TOL * model.residual_scale(lam):
        raise NearDiscriminant('R_λ = %g at x = %r: too close to the discriminant' % (abs(d_lam), x))


def integrand_vector(model, lam, pt):
    """R'_{H_j} / (y R'_λ) for all j at once."""
    d_lam, d_h = partials(model, lam, pt)
    _check_slope(model, d_lam, lam, pt.x)
    return d_h / (pt.y * d_lam)


def integrand(model, j, lam, pt):
    """The j-th integrand, j counted from 1 as in H1..HN."""
    return complex(integrand_vector(model, lam, pt)[j - 1])


def _fiber_candidates(model, x0, y0):
    seen = []
    for lam in model.fiber(x0, y0):
        if all(abs(lam - s) > 1e-12 * (1 + abs(lam)) for s in seen):
            seen.append(lam)
    return seen


def _matches(a, b):
    return abs(a - b) <= app_settings.SHEET_MATCH_TOL * (1 + abs(b))


def _locate(model, x0, point, path):
    # Base lifts (y0, λ0) whose continuation along path lands on point.
    y_principal = cmath.sqrt(model.base(x0))
    y_end = continue_y(model.base, path, y_principal)
    y0 = y_principal if abs(y_end - point.y) <= abs(y_end + point.y) else -y_principal
    found = []
    for lam0 in _fiber_candidates(model, x0, y0):
        try:
            lam_end = continue_lambda(model, path, y0, lam0)
        except SheetCollision:
            continue
        if _matches(lam_end, point.lam):
            found.append(lam0)
    if len(found) != 1:
        raise SheetMatchFailed('%d base sheets continue onto λ = %r at x = %r'
                               % (len(found), point.lam, point.x))
    return y0, found[0]


def _one_point(model, x0, point, record, obstacles, tol):
    if record is None:
        path = plan_path(model.base, x0, point.x, obstacles)
        y0, lam0 = _locate(model, x0, point, path)
        panels = None
    else:
        path, panels = record.path, record.panels
        y0 = record.base_y
        lam0 = min(model.fiber(path.start, y0), key=lambda l: abs(l - record.base_lambda))

    def f(x, state):
        y, lam = state
        return integrand_vector(model, lam, CurvePoint(x, y))

    values, panels, (y_end, lam_end), samples = integrate_path(
        path, f, (y0, lam0), cover_step(model), width=len(model.h), tol=tol, panels=panels)
    if not (_matches(lam_end, point.lam) and _matches(y_end, point.y)):
        raise SheetMatchFailed('continuation along the stored path misses λ = %r at x = %r'
                               % (point.lam, point.x))
    return values, PathRecord(path, y0, lam0, panels), samples


def angle_coordinates(model, divisor, basepoint_x=None, path_class=None, tol=None, trace=None):
    """φ for the divisor. With path_class (from an earlier call) the same
    paths, base lifts and panel counts are reused. trace, if a list, receives
    (path index, t, x, y, λ, integrand values) for every quadrature node."""
    if model.degenerate:
        raise DegenerateModel('angle coordinates need a nondegenerate spectral curve')
    if tol is None:
        tol = app_settings.ANGLE_QUAD_TOL
    x0 = default_basepoint(model.base) if basepoint_x is None else complex(basepoint_x)

    obstacles = []
    if path_class is None:
        obstacles = list(model.discriminant_points)
        for p in divisor:
            for o in obstacles:
                if abs(p.x - o) <= app_settings.NEAR_DISCRIMINANT * (1 + abs(o)):
                    raise NearDiscriminant('divisor point x = %r lies on the discriminant near %r' % (p.x, o))
    for p in divisor:
        _check_slope(model, partials(model, p.lam, p.at)[0], p.lam, p.x)

    records = path_class or [None] * len(divisor)
    if len(records) != len(divisor):
        raise SheetMatchFailed('%d stored paths for %d divisor points' % (len(records), len(divisor)))

    def work(i):
        return _one_point(model, x0, divisor[i], records[i], obstacles, tol)

    indices = range(len(divisor))
    if app_settings.THREADS > 1:
        with ThreadPoolExecutor(max_workers=app_settings.THREADS) as pool:
            results = list(pool.map(work, indices))
    else:
        results = [work(i) for i in indices]

    phi = np.zeros(len(model.h), dtype=complex)
    for values, _, _ in results:
        phi -= values
    if trace is not None:
        for i, (_, _, samples) in enumerate(results):
            for t, x, (y, lam), values in samples:
                trace.append((i, t, x, y, lam, values))
    log.info('Angle coordinates at base point %r over %d paths.' % (x0, len(results)))
    return AngleVector(phi, x0, [r for _, r, _ in results])

