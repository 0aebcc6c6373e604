#coding: utf8
"""The base curve y^2 = P(x), paths in the x-plane, continuation of y and
the abelian integrals of x^k dx / y."""

import cmath
import logging
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from hitchin_sov.conf import app_settings
from hitchin_sov.errors import (InvalidCurve, InvalidPoint, AtBranchPoint, PathBlocked,
    ContinuationStalled, QuadratureNotConverged, ConfigError)
from hitchin_sov.formats import complex_pair, complex_pairs, parse_complex, parse_complex_list
from hitchin_sov.polyalg import ComplexPoly, companion_roots

log = logging.getLogger(__name__)


class HyperellipticCurve(object):

    def __init__(self, p):
        if not isinstance(p, ComplexPoly):
            p = ComplexPoly(p)
        if p.degree < 5 or p.degree % 2 == 0:
            raise InvalidCurve('P must have odd degree >= 5, got degree %d' % p.degree)
        self.p = p
        self.genus = (p.degree - 1) // 2
        self.dp = p.derivative()
        self.branch_points = tuple(companion_roots(p))
        spread = 1 + max(abs(e) for e in self.branch_points)
        gap = min(abs(e - f) for i, e in enumerate(self.branch_points)
                  for f in self.branch_points[i + 1:])
        if gap <= app_settings.SQUAREFREE_TOL * spread:
            raise InvalidCurve('P is not squarefree: branch points %g apart' % gap)

    def __call__(self, x):
        return self.p(x)

    def __repr__(self):
        return 'HyperellipticCurve(genus=%d, p=%r)' % (self.genus, self.p.as_list())

    @property
    def diameter(self):
        return max(abs(e - f) for e in self.branch_points for f in self.branch_points)

    def contains(self, x, y):
        px = self.p(x)
        return abs(y * y - px) <= app_settings.POINT_TOL * (1 + abs(px))

    def point(self, x, y):
        """A CurvePoint, checked to lie on the curve."""
        x, y = complex(x), complex(y)
        if not self.contains(x, y):
            raise InvalidPoint('(%r, %r) is not on the curve: |y^2 - P(x)| = %g'
                               % (x, y, abs(y * y - self.p(x))))
        return CurvePoint(x, y)

    def as_dict(self):
        return {'p': complex_pairs(self.p), 'genus': self.genus}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or 'p' not in data:
            raise ConfigError('curve: expected an object with a "p" coefficient list')
        curve = cls(parse_complex_list(data['p'], 'curve.p'))
        if 'genus' in data and data['genus'] != curve.genus:
            raise InvalidCurve('curve.genus is %r but P has genus %d' % (data['genus'], curve.genus))
        return curve


class CurvePoint(object):
    __slots__ = ('x', 'y')

    def __init__(self, x, y):
        self.x = complex(x)
        self.y = complex(y)

    def __iter__(self):
        return iter((self.x, self.y))

    def __repr__(self):
        return 'CurvePoint(%r, %r)' % (self.x, self.y)

    def as_dict(self):
        return {'x': complex_pair(self.x), 'y': complex_pair(self.y)}


class CanonicalPoint(object):
    """(λ, x̃): the spectral coordinate and the abelian integral of dx/y up to
    the point."""
    __slots__ = ('lam', 'x_tilde')

    def __init__(self, lam, x_tilde):
        self.lam = complex(lam)
        self.x_tilde = complex(x_tilde)

    def as_dict(self):
        return {'lambda': complex_pair(self.lam), 'x_tilde': complex_pair(self.x_tilde)}


class XPath(object):
    """Piecewise-linear path in the x-plane."""

    def __init__(self, waypoints, clearance=0.0):
        self.waypoints = tuple(complex(w) for w in waypoints)
        if not self.waypoints:
            raise ConfigError('a path needs at least one waypoint')
        self.clearance = float(clearance)

    def __repr__(self):
        return 'XPath(%r)' % (list(self.waypoints),)

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]

    @property
    def segments(self):
        return [(a, b) for a, b in zip(self.waypoints, self.waypoints[1:]) if a != b]

    @property
    def length(self):
        return sum(abs(b - a) for a, b in self.segments)

    @property
    def end_direction(self):
        """Unit tangent of the last segment (1 for a constant path)."""
        segments = self.segments
        if not segments:
            return 1 + 0j
        a, b = segments[-1]
        return (b - a) / abs(b - a)

    def reversed(self):
        return XPath(self.waypoints[::-1], self.clearance)

    def concat(self, other):
        if abs(other.start - self.end) > 1e-12 * (1 + abs(self.end)):
            raise ConfigError('paths do not join: %r != %r' % (self.end, other.start))
        return XPath(self.waypoints + other.waypoints[1:], min(self.clearance, other.clearance))

    def as_dict(self):
        return {'waypoints': complex_pairs(self.waypoints), 'clearance': self.clearance}

    @classmethod
    def from_dict(cls, data):
        return cls(parse_complex_list(data['waypoints'], 'path.waypoints'), data.get('clearance', 0.0))


def branch_points(curve):
    return list(curve.branch_points)


def lift_x(curve, x):
    """The two points over x, principal square root first."""
    x = complex(x)
    for e in curve.branch_points:
        if abs(x - e) <= app_settings.BRANCH_TOL:
            raise AtBranchPoint('x = %r is a branch point' % x)
    y = cmath.sqrt(curve(x))
    return CurvePoint(x, y), CurvePoint(x, -y)


def default_clearance(curve):
    return app_settings.CLEARANCE_FRACTION * curve.diameter


def default_basepoint(curve):
    """Above the branch points, at distance >= 1 from their convex hull."""
    centre = sum(curve.branch_points) / len(curve.branch_points)
    radius = max(abs(e - centre) for e in curve.branch_points)
    return centre + 1j * (radius + 1)


def extend_path(path, x):
    return XPath(path.waypoints + (complex(x),), path.clearance)


def segment_distance(a, b, z):
    if a == b:
        return abs(z - a)
    u = (b - a) / abs(b - a)
    t = ((z - a) / u).real
    t = min(max(t, 0.0), abs(b - a))
    return abs(a + u * t - z)


def plan_path(curve, x_from, x_to, obstacles=(), clearance=None):
    """Straight path from x_from to x_to, bent around every obstacle (and
    branch point) it would pass closer than clearance to."""
    x_from, x_to = complex(x_from), complex(x_to)
    if clearance is None:
        clearance = default_clearance(curve)
    blockers = list(curve.branch_points) + [complex(o) for o in obstacles]
    for end in (x_from, x_to):
        for c in blockers:
            if abs(end - c) <= clearance:
                raise PathBlocked('endpoint %r is within %g of obstacle %r' % (end, clearance, c))
    waypoints = [x_from, x_to]
    if x_from == x_to:
        return XPath([x_from], clearance)

    for _ in range(16 * (len(blockers) + 1)):
        hit = _first_violation(waypoints, blockers, clearance)
        if hit is None:
            log.debug('Planned path %r -> %r with %d waypoints.' % (x_from, x_to, len(waypoints)))
            return XPath(waypoints, clearance)
        k, c = hit
        waypoints[k + 1:k + 1] = _detour(waypoints[k], waypoints[k + 1], c, clearance)
    raise PathBlocked('no path from %r to %r keeps clearance %g' % (x_from, x_to, clearance))


def _first_violation(waypoints, blockers, clearance):
    for k, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
        if a == b:
            continue
        u = (b - a) / abs(b - a)
        near = [c for c in blockers if segment_distance(a, b, c) < clearance]
        if near:
            return k, min(near, key=lambda c: ((c - a) / u).real)
    return None


def _detour(a, b, c, clearance):
    # Arc around c on the far side of the segment, at radius 2 * clearance
    # where the segment allows it.
    length = abs(b - a)
    u = (b - a) / length
    rel = (c - a) / u
    radius = 2 * clearance
    half = math.sqrt(max(radius * radius - rel.imag * rel.imag, 0.0))
    p_in = a + u * max(rel.real - half, 0.0)
    p_out = a + u * min(rel.real + half, length)

    theta_in = cmath.phase(p_in - c)
    theta_out = cmath.phase(p_out - c)
    if rel.imag > 0:
        sweep = (theta_out - theta_in) % (2 * math.pi)
    else:
        sweep = -((theta_in - theta_out) % (2 * math.pi))
    r_in, r_out = abs(p_in - c), abs(p_out - c)
    floor = min(r_in, r_out)
    step = min(math.pi / 8, 1.8 * math.acos(min(1.0, clearance / floor)))
    pieces = min(15, max(2, int(math.ceil(abs(sweep) / step)) if step > 0 else 15))

    points = [] if p_in == a else [p_in]
    for k in range(1, pieces):
        s = k / pieces
        points.append(c + (r_in + (r_out - r_in) * s) * cmath.exp(1j * (theta_in + sweep * s)))
    if p_out != b:
        points.append(p_out)
    return points


def nearest_sqrt(value, previous):
    root = cmath.sqrt(value)
    return root if abs(root - previous) <= abs(root + previous) else -root


def y_step(curve):
    """Step function for march(): carries y across [x0, x1], or None when the
    step is too long to be sure of the sheet."""
    tol = app_settings.CONTINUATION_TOL

    def step(x0, x1, y0):
        y1 = nearest_sqrt(curve(x1), y0)
        if abs(y1 - y0) > 0.5 * abs(y0):
            return None
        y_mid = nearest_sqrt(curve(0.5 * (x0 + x1)), y0)
        if abs(nearest_sqrt(curve(x1), y_mid) - y1) > tol * (1 + abs(y1)):
            return None
        return y1
    return step


def advance(x_from, x_to, state, step, min_step):
    """Carry state along the straight segment x_from -> x_to, halving the step
    whenever step() rejects it and doubling it after each success."""
    length = abs(x_to - x_from)
    if length == 0:
        return state
    done, h = 0.0, length
    while True:
        last = h >= length - done
        if last:
            h = length - done
        x0 = x_from + (x_to - x_from) * (done / length)
        x1 = x_to if last else x_from + (x_to - x_from) * ((done + h) / length)
        new = step(x0, x1, state)
        if new is None:
            h /= 2
            if h < min_step:
                raise ContinuationStalled('continuation stalled near x = %r' % x0)
            continue
        state = new
        if last:
            return state
        done += h
        h *= 2


def march(path, state, step):
    min_step = app_settings.MIN_STEP_FRACTION * max(path.length, 1e-300)
    for a, b in path.segments:
        state = advance(a, b, state, step, min_step)
    return state


def continue_y(curve, path, y_start):
    y_start = complex(y_start)
    if not curve.contains(path.start, y_start):
        raise InvalidPoint('y_start = %r is not over the path start %r' % (y_start, path.start))
    return march(path, y_start, y_step(curve))


@lru_cache(maxsize=8)
def _gauss_rule(order):
    nodes, weights = leggauss(order)
    return nodes, weights


def _sweep(path, per_segment, state, integrand, step, width, min_step):
    # One pass over all nodes with per_segment panels on every segment.
    nodes, weights = _gauss_rule(app_settings.QUAD_ORDER)
    total = np.zeros(width, dtype=complex)
    peak = 0.0
    samples = []
    here = path.start
    walked, length = 0.0, path.length
    for a, b in path.segments:
        seg = abs(b - a)
        u = (b - a) / seg
        h = seg / per_segment
        for m in range(per_segment):
            for node, weight in zip(nodes, weights):
                s = h * (m + 0.5 * (node + 1))
                x = a + u * s
                state = advance(here, x, state, step, min_step)
                here = x
                values = np.asarray(integrand(x, state), dtype=complex).reshape(width)
                total += values * (0.5 * h * weight * u)
                peak = max(peak, float(np.max(np.abs(values))))
                samples.append(((walked + s) / length, x, state, values))
        walked += seg
    state = advance(here, path.end, state, step, min_step)
    return total, peak, state, samples


def integrate_path(path, integrand, state, step, width=1, tol=None, panels=None):
    """Integrate integrand(x, state) dx along path by Gauss-Legendre panels,
    the state (sheet data) being carried from node to node by step.

    Panels per segment double until two successive sums agree to
    tol * length * max|integrand|. With panels given, that panel count is
    used as is. Returns (values, panels, end state, node samples).
    """
    if tol is None:
        tol = app_settings.QUAD_TOL
    length = path.length
    if length == 0:
        return np.zeros(width, dtype=complex), 0, state, []
    min_step = app_settings.MIN_STEP_FRACTION * length
    nseg = len(path.segments)
    if panels:
        total, _, end, samples = _sweep(path, panels, state, integrand, step, width, min_step)
        return total, panels, end, samples

    m = 1
    previous = _sweep(path, m, state, integrand, step, width, min_step)
    while True:
        if 2 * m * nseg > app_settings.QUAD_MAX_PANELS:
            raise QuadratureNotConverged('no convergence with %d panels' % (m * nseg))
        current = _sweep(path, 2 * m, state, integrand, step, width, min_step)
        err = float(np.max(np.abs(current[0] - previous[0])))
        if err <= tol * length * max(current[1], 1e-300):
            log.debug('Quadrature converged with %d panels per segment (err %g).' % (2 * m, err))
            total, _, end, samples = current
            return total, 2 * m, end, samples
        m *= 2
        previous = current


def abelian_integral(curve, path, y_start, k=0, tol=None):
    """∫ x^k dx / y along path, y continued from y_start."""
    if not 0 <= k <= curve.genus - 1:
        raise ConfigError('k = %r: only holomorphic differentials, 0 <= k <= %d' % (k, curve.genus - 1))
    y_start = complex(y_start)
    if not curve.contains(path.start, y_start):
        raise InvalidPoint('y_start = %r is not over the path start %r' % (y_start, path.start))
    value = integrate_path(path, lambda x, y: x ** k / y, y_start, y_step(curve), tol=tol)[0]
    return complex(value[0])
