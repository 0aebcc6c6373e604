#coding: utf8
"""Checks that (H, φ) are Darboux coordinates for σ = Σ dλ_i ∧ dx̃_i.

Complex coordinates are split into real and imaginary parts. For the real
part of σ the standard matrix J on (Re λ, Im λ, Re x̃, Im x̃) has the blocks

    J[Re λ, Re x̃] = I    J[Re x̃, Re λ] = -I
    J[Im λ, Im x̃] = -I   J[Im x̃, Im λ] = I

and the same layout is used for (Re H, Im H, Re φ, Im φ).
"""

import cmath
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.linalg

from hitchin_sov.angle import PathRecord, angle_coordinates
from hitchin_sov.conf import app_settings
from hitchin_sov.errors import InversionFailed, FDUnstable, ResidualCheckFailed, ConfigError
from hitchin_sov.formats import complex_pair
from hitchin_sov.hyperelliptic import (CanonicalPoint, CurvePoint, XPath, continue_y, default_basepoint,
    extend_path, integrate_path, plan_path, y_step)
from hitchin_sov.sov import SpectralDivisor, solve_newton, solve_so4_radicals, residuals, SO4
from hitchin_sov.spectral import SpectralCurveModel, SpectralPoint, partials, dR_dx, continue_lambda

log = logging.getLogger(__name__)


class CanonicalChart(object):

    def __init__(self, pairs, basepoint, paths=()):
        self.pairs = list(pairs)
        self.basepoint = complex(basepoint)
        self.paths = list(paths)

    @property
    def lams(self):
        return np.array([p.lam for p in self.pairs], dtype=complex)

    @property
    def x_tilde(self):
        return np.array([p.x_tilde for p in self.pairs], dtype=complex)

    def as_dict(self):
        return {'basepoint': complex_pair(self.basepoint), 'pairs': [p.as_dict() for p in self.pairs]}


def _dx_over_y(x, y):
    return 1 / y


def _lift_sign(curve, path, point):
    y0 = cmath.sqrt(curve(path.start))
    y_end = continue_y(curve, path, y0)
    return y0 if abs(y_end - point.y) <= abs(y_end + point.y) else -y0


def canonical_chart(curve, divisor, basepoint_x=None, paths=None, obstacles=()):
    """(λ_i, x̃_i) with x̃_i the integral of dx/y from the base point. paths
    may be PathRecords from angle_coordinates, so both share contours."""
    x0 = default_basepoint(curve) if basepoint_x is None else complex(basepoint_x)
    pairs, used = [], []
    for i, p in enumerate(divisor):
        if paths is not None:
            record = paths[i]
            path = record.path if isinstance(record, PathRecord) else record
        else:
            path = plan_path(curve, x0, p.x, obstacles)
        y0 = _lift_sign(curve, path, p.at)
        value = integrate_path(path, _dx_over_y, y0, y_step(curve))[0]
        pairs.append(CanonicalPoint(p.lam, value[0]))
        used.append(path)
    return CanonicalChart(pairs, x0, used)


def _segment_integral(curve, x_from, y_from, x_to, panels=4):
    # ∫ dx / y over the straight segment, and y at its end.
    values, _, y_end, _ = integrate_path(XPath([x_from, x_to]), _dx_over_y, y_from, y_step(curve),
                                         panels=panels)
    return complex(values[0]), y_end


def invert_abelian(curve, x_start, y_start, delta):
    """x, y near (x_start, y_start) with ∫ dx / y from x_start equal to
    delta, by Newton with dx̃/dx = 1/y."""
    if delta == 0:
        return complex(x_start), complex(y_start)
    x = x_start + delta * y_start
    for _ in range(30):
        value, y = _segment_integral(curve, x_start, y_start, x)
        miss = value - delta
        x = x - miss * y
        if abs(miss) <= app_settings.INVERSION_TOL:
            # one more step past the tolerance
            return x, _segment_integral(curve, x_start, y_start, x)[1]
    raise InversionFailed('abelian integral inversion did not converge (miss %g)' % abs(miss))


def symplectic_matrix(n):
    j = np.zeros((4 * n, 4 * n))
    eye = np.eye(n)
    pr, pi, qr, qi = (slice(k * n, (k + 1) * n) for k in range(4))
    j[pr, qr] = eye
    j[qr, pr] = -eye
    j[pi, qi] = -eye
    j[qi, pi] = eye
    return j


def to_real(z):
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


class ForwardMap(object):
    """(λ, x̃) -> (H, φ) near a divisor, in real form. Perturbed points are
    reached by inverting x̃ along a straight extension of each path; H is
    Newton-continued from the unperturbed solution."""

    def __init__(self, roots, curve, divisor, h, basepoint_x=None):
        self.roots = roots
        self.curve = curve
        self.divisor = divisor
        self.h = h
        self.model = SpectralCurveModel(roots, curve, h)
        self.angles = angle_coordinates(self.model, divisor, basepoint_x)
        self.basepoint = self.angles.basepoint
        self.chart = canonical_chart(curve, divisor, self.basepoint, self.angles.path_class)
        self.n = len(divisor)
        self.origin = np.concatenate([to_real(self.chart.lams), to_real(self.chart.x_tilde)])

    def moved(self, u):
        """The divisor at real coordinates u, with the stored paths extended."""
        n = self.n
        lams = u[:n] + 1j * u[n:2 * n]
        shift = (u[2 * n:3 * n] - self.origin[2 * n:3 * n]) + 1j * (u[3 * n:] - self.origin[3 * n:])
        points, records = [], []
        for i, p in enumerate(self.divisor):
            x, y = invert_abelian(self.curve, p.x, p.y, shift[i])
            points.append(SpectralPoint(lams[i], CurvePoint(x, y)))
            record = self.angles.path_class[i]
            path = extend_path(record.path, x) if x != p.x else record.path
            records.append(PathRecord(path, record.base_y, record.base_lambda, record.panels))
        return SpectralDivisor(points), records

    def __call__(self, u):
        divisor, records = self.moved(u)
        h = solve_newton(self.roots, self.curve, divisor, self.h, canonical=False).best.h
        model = SpectralCurveModel(self.roots, self.curve, h)
        phi = angle_coordinates(model, divisor, self.basepoint, path_class=records).phi
        return np.concatenate([to_real(h.flat), to_real(phi)])


def fd_jacobian(fmap, step):
    """Central differences of fmap at its origin, one column per real
    coordinate; columns are gathered in order."""
    origin = fmap.origin

    def column(k):
        e = np.zeros_like(origin)
        e[k] = step
        return (fmap(origin + e) - fmap(origin - e)) / (2 * step)

    indices = range(len(origin))
    if app_settings.THREADS > 1:
        with ThreadPoolExecutor(max_workers=app_settings.THREADS) as pool:
            columns = list(pool.map(column, indices))
    else:
        columns = [column(k) for k in indices]
    log.debug('Finite-difference Jacobian with step %g: %d evaluations.' % (step, 2 * len(columns)))
    return np.stack(columns, axis=1)


def defect_of(m):
    j = symplectic_matrix(m.shape[0] // 4)
    return float(np.max(np.abs(m.T @ j @ m - j)))


def _default_h(roots, curve, divisor, h):
    if h is not None:
        return h
    if roots != SO4:
        raise ConfigError('%s needs Hamiltonians to test; only so(4) solves for them here' % roots)
    return solve_so4_radicals(curve, divisor).best.h


def defect_pair(roots, curve, divisor, basepoint_x=None, fd_step=None, h=None, fmap=None):
    """Defects at fd_step and fd_step / 2, and the Jacobian at fd_step."""
    if fd_step is None:
        fd_step = app_settings.FD_STEP
    if fmap is None:
        fmap = ForwardMap(roots, curve, divisor, _default_h(roots, curve, divisor, h), basepoint_x)
    m = fd_jacobian(fmap, fd_step)
    coarse = defect_of(m)
    fine = defect_of(fd_jacobian(fmap, fd_step / 2))
    log.info('Symplectic defect %g at step %g, %g at step %g.' % (coarse, fd_step, fine, fd_step / 2))
    return coarse, fine, m


def _stable(coarse, fine):
    if max(coarse, fine) <= app_settings.FD_NOISE_FLOOR:
        return True
    ratio = coarse / fine if fine else float('inf')
    return 0.1 <= ratio <= 10


def _converging(coarse, fine):
    """(ok, waived) for the step-halving ratio coarse / fine."""
    if fine <= app_settings.FD_NOISE_FLOOR:
        return True, True
    low, high = app_settings.CONVERGENCE_RATIO
    return low <= coarse / fine <= high, False


def symplectic_defect(curve, roots, divisor, basepoint_x=None, fd_step=None, h=None):
    """max |Mᵀ J M - J| for the finite-difference Jacobian M of
    (λ, x̃) -> (H, φ)."""
    coarse, fine, _ = defect_pair(roots, curve, divisor, basepoint_x, fd_step, h)
    if not _stable(coarse, fine):
        raise FDUnstable('defect moves from %g to %g when the step is halved' % (coarse, fine))
    return coarse


def hamiltonian_jacobian(model, divisor):
    """(dH/dλ, dH/dx̃) from differentiating R(λ_i, x_i, y_i; H) = 0."""
    rows, d_lam, d_xt = [], [], []
    for p in divisor:
        slope, d_h = partials(model, p.lam, p.at)
        rows.append(d_h)
        d_lam.append(slope)
        d_xt.append(dR_dx(model, p.lam, p.at) * p.y)
    a = np.array(rows)
    lu = scipy.linalg.lu_factor(a)
    return (-scipy.linalg.lu_solve(lu, np.diag(d_lam)),
            -scipy.linalg.lu_solve(lu, np.diag(d_xt)))


def complex_blocks(m):
    """dH/dλ, dH/dx̃, dφ/dλ and dφ/dx̃ read off the real-form Jacobian."""
    n = m.shape[0] // 4
    blocks = {}
    for out_name, out_at in (('H', 0), ('phi', 2 * n)):
        for in_name, in_at in (('lambda', 0), ('x_tilde', 2 * n)):
            re = m[out_at:out_at + n, in_at:in_at + n]
            im = m[out_at + n:out_at + 2 * n, in_at:in_at + n]
            blocks[out_name, in_name] = re + 1j * im
    return blocks


def conjugacy_residual(model, divisor, basepoint_x=None, fd_step=None, angles=None):
    """|∂φ_j/∂x̃_i + R'_{H_j}/R'_λ| at each divisor point, H held fixed, the
    derivative taken by central differences as point i slides along its path."""
    if fd_step is None:
        fd_step = app_settings.FD_STEP
    if angles is None:
        angles = angle_coordinates(model, divisor, basepoint_x)
    n, width = len(divisor), len(model.h)
    out = np.zeros((n, width))
    for i, p in enumerate(divisor):
        record = angles.path_class[i]
        direction = record.path.end_direction
        phis, xts = [], []
        for sign in (1, -1):
            x = p.x + sign * fd_step * direction
            dxt, y = _segment_integral(model.base, p.x, p.y, x)
            lam = continue_lambda(model, XPath([p.x, x]), p.y, p.lam)
            moved = SpectralDivisor([SpectralPoint(lam, CurvePoint(x, y))])
            stored = PathRecord(extend_path(record.path, x), record.base_y, record.base_lambda, record.panels)
            phis.append(angle_coordinates(model, moved, angles.basepoint, path_class=[stored]).phi)
            xts.append(dxt)
        derivative = (phis[0] - phis[1]) / (xts[0] - xts[1])
        slope, d_h = partials(model, p.lam, p.at)
        out[i] = np.abs(derivative + d_h / slope)
    log.info('Conjugacy residual: max %g.' % out.max())
    return out


def verification_report(model, divisor, basepoint_x=None, fd_step=None, tol_residual=None):
    """Everything the verify command reports. Raises ResidualCheckFailed when
    H does not put the divisor on the spectral curve."""
    if fd_step is None:
        fd_step = app_settings.FD_STEP
    if tol_residual is None:
        tol_residual = app_settings.RESIDUAL_TOL
    _, worst = residuals(model, divisor)
    if worst > tol_residual:
        raise ResidualCheckFailed('divisor residual %g exceeds %g' % (worst, tol_residual))

    fmap = ForwardMap(model.roots, model.base, divisor, model.h, basepoint_x)
    coarse, fine, m = defect_pair(model.roots, model.base, divisor, fd_step=fd_step, fmap=fmap)
    ratio = coarse / fine if fine else None
    conjugacy = conjugacy_residual(model, divisor, fd_step=fd_step, angles=fmap.angles)
    scale = 1 + float(np.max(np.abs(divisor.lams))) ** model.rep_dim + model.h_max

    implicit = hamiltonian_jacobian(model, divisor)
    blocks = complex_blocks(m)
    hamiltonian_gap = max(float(np.max(np.abs(blocks['H', 'lambda'] - implicit[0]))),
                          float(np.max(np.abs(blocks['H', 'x_tilde'] - implicit[1]))))

    converging, waived = _converging(coarse, fine)
    if waived:
        log.info('Halved-step defect %g is below the noise floor; ratio not judged.' % fine)
    defect_ok = coarse <= app_settings.DEFECT_THRESHOLD and converging
    conjugacy_ok = float(conjugacy.max()) <= app_settings.CONJUGACY_THRESHOLD * scale
    return {
        'residual': worst,
        'defect': coarse,
        'defect_half_step': fine,
        'convergence_ratio': ratio,
        'ratio_waived': waived,
        'fd_step': fd_step,
        'conjugacy_max': float(conjugacy.max()),
        'per_entry': conjugacy.tolist(),
        'hamiltonian_block_gap': hamiltonian_gap,
        'basepoint': complex_pair(fmap.basepoint),
        'thresholds': {
            'defect': app_settings.DEFECT_THRESHOLD,
            'convergence_ratio': list(app_settings.CONVERGENCE_RATIO),
            'conjugacy': app_settings.CONJUGACY_THRESHOLD * scale,
            'residual': tol_residual,
        },
        'passed': bool(defect_ok and conjugacy_ok),
    }
