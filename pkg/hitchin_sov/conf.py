import logging
import os
from contextlib import contextmanager

from django.conf import settings

if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
    # Library or console-script use without a Django project.
    settings.configure(INSTALLED_APPS=['hitchin_sov'])

from appconf import AppConf

log = logging.getLogger(__name__)


def worker_threads(value):
    """Thread count from an environment string; 1 unless a positive integer."""
    try:
        return max(1, int(value or 1))
    except ValueError:
        log.warning('Ignoring HITCHIN_SOV_THREADS=%r: not an integer.' % value)
        return 1


class SovConf(AppConf):
    # To override any of these settings, set HITCHIN_SOV_<setting name>
    # in the main Django settings.

    # Polynomial root residuals are measured against this, relative to the
    # coefficient scale.
    ROOT_TOL = 1e-10
    # |c4| below LEADING_FLOOR * max|c_k| is not treated as a quartic
    LEADING_FLOOR = 1e-13

    # Branch points closer than this (relative) make a curve non-smooth
    SQUAREFREE_TOL = 1e-8
    BRANCH_TOL = 1e-10
    POINT_TOL = 1e-9
    # Default path clearance, as a fraction of the branch-point diameter
    CLEARANCE_FRACTION = 1e-2

    CONTINUATION_TOL = 1e-8
    # Steps shorter than this fraction of the path length stall continuation
    MIN_STEP_FRACTION = 1e-12

    # Gauss-Legendre panels along paths
    QUAD_TOL = 1e-10
    ANGLE_QUAD_TOL = 1e-9
    QUAD_ORDER = 16
    QUAD_MAX_PANELS = 2 ** 20

    RESIDUAL_TOL = 1e-8
    NEWTON_TOL = 1e-10
    NEWTON_MAX_ITER = 200
    NEWTON_MAX_COND = 1e14
    # Newton iterations allowed for one λ continuation step
    NEWTON_INNER_MAX = 8

    SHEET_COLLISION_TOL = 1e-8
    SHEET_MATCH_TOL = 1e-6
    DISCRIMINANT_TOL = 1e-12
    NEAR_DISCRIMINANT = 1e-6
    DUPLICATE_TOL = 1e-7

    FD_STEP = 1e-5
    # Defects below this are roundoff; step halving is not judged there
    FD_NOISE_FLOOR = 1e-9
    # Defect ratio expected when the step is halved; second order gives 4
    CONVERGENCE_RATIO = (2, 8)
    INVERSION_TOL = 1e-11
    DEFECT_THRESHOLD = 1e-3
    CONJUGACY_THRESHOLD = 1e-4

    # Caps worker threads for per-point path work
    THREADS = worker_threads(os.environ.get('HITCHIN_SOV_THREADS'))

    class Meta:
        prefix = 'hitchin_sov'


app_settings = SovConf()


@contextmanager
def overrides(**values):
    """Temporarily replace settings, e.g. overrides(QUAD_TOL=1e-8)."""
    saved = dict((name, getattr(app_settings, name)) for name in values)
    try:
        for name, value in values.items():
            setattr(app_settings, name, value)
        yield app_settings
    finally:
        for name, value in saved.items():
            setattr(app_settings, name, value)
