""" A mini command framework: JSON config in, JSON result out.
"""

import io
import logging

from django.core.management.base import BaseCommand, CommandError

from hitchin_sov import formats
from hitchin_sov.conf import overrides
from hitchin_sov.errors import SovError, ConfigError
from hitchin_sov.hyperelliptic import HyperellipticCurve
from hitchin_sov.sov import SpectralDivisor
from hitchin_sov.spectral import RootSystemSpec, HamiltonianVector

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}

# command-line flag -> settings it overrides
TOLERANCE_FLAGS = {
    'tol_root': ('ROOT_TOL',),
    'tol_residual': ('RESIDUAL_TOL',),
    'tol_quad': ('QUAD_TOL', 'ANGLE_QUAD_TOL'),
    'fd_step': ('FD_STEP',),
}


class RunConfig(object):
    """The parsed --config file plus the command-line flags."""

    def __init__(self, data, options):
        if not isinstance(data, dict):
            raise ConfigError('config: expected a JSON object at the top level')
        self.data = data
        self.options = options
        self.seed = options.get('seed')
        self.out = options.get('out')

    def __contains__(self, key):
        return key in self.data

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require(self, key):
        if key not in self.data:
            raise ConfigError('config: missing "%s"' % key)
        return self.data[key]

    @property
    def roots(self):
        source = self.data
        if 'family' not in source and isinstance(source.get('hamiltonian'), dict):
            source = source['hamiltonian']
        return RootSystemSpec(source.get('family', 'D'), source.get('rank', 2))

    @property
    def genus(self):
        if 'genus' in self.data:
            return self.data['genus']
        if 'curve' in self.data:
            return self.curve.genus
        return self.require('hamiltonian').get('genus')

    @property
    def curve(self):
        if not hasattr(self, '_curve'):
            self._curve = HyperellipticCurve.from_dict(self.require('curve'))
        return self._curve

    @property
    def hamiltonian(self):
        return HamiltonianVector.from_dict(self.require('hamiltonian'), self.roots, self.curve.genus)

    @property
    def divisor(self):
        return SpectralDivisor.from_dict(self.require('divisor'), self.curve)

    @property
    def basepoint(self):
        if self.options.get('basepoint'):
            return formats.parse_basepoint(self.options['basepoint'])
        if 'basepoint' in self.data:
            return formats.parse_complex(self.data['basepoint'], 'basepoint')
        return None


class JSONCommand(BaseCommand):
    """Base command class that serializes subclass results to JSON.

    Subclasses define run(config) and return a dict. Package errors become
    CommandErrors carrying the exit code of the error class."""

    requires_system_checks = []
    needs_config = True

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config',
            help='JSON file describing the curve, Hamiltonians and divisor.')
        parser.add_argument('--seed', dest='seed', type=int, default=42,
            help='Seed for the random generators.')
        parser.add_argument('--out', dest='out',
            help='Write the JSON result here instead of stdout.')
        parser.add_argument('--tol-root', dest='tol_root', type=float,
            help='Relative residual tolerance for polynomial roots.')
        parser.add_argument('--tol-residual', dest='tol_residual', type=float,
            help='Scale-normalized tolerance for |R| on the divisor.')
        parser.add_argument('--tol-quad', dest='tol_quad', type=float,
            help='Quadrature tolerance along paths.')
        parser.add_argument('--fd-step', dest='fd_step', type=float,
            help='Finite-difference step for the canonicity checks.')
        parser.add_argument('--basepoint', dest='basepoint',
            help='Base point of the path integrals, as "re,im".')

    def handle(self, *args, **options):
        handler, level = self._start_logging(options.get('verbosity', 1))
        try:
            with overrides(**self.tolerances(options)):
                config = self.load(options)
                result = self.run(config)
        except SovError as e:
            raise CommandError('%s: %s' % (type(e).__name__, e), returncode=e.exit_code)
        finally:
            logger = logging.getLogger('hitchin_sov')
            logger.removeHandler(handler)
            logger.setLevel(level)
        self.emit(result, options.get('out'))
        self.after(result)

    def run(self, config):
        raise NotImplementedError

    def after(self, result):
        """Hook run once the result is written."""

    def tolerances(self, options):
        values = {}
        for flag, names in TOLERANCE_FLAGS.items():
            value = options.get(flag)
            if value is None:
                continue
            if not value > 0:
                raise CommandError('--%s must be positive, got %r' % (flag.replace('_', '-'), value),
                                   returncode=ConfigError.exit_code)
            for name in names:
                values[name] = value
        return values

    def load(self, options):
        path = options.get('config')
        if not path:
            if self.needs_config:
                raise ConfigError('--config is required')
            return RunConfig({}, options)
        try:
            with io.open(path, encoding='utf-8') as f:
                text = f.read()
        except (IOError, OSError) as e:
            raise ConfigError('cannot read %s: %s' % (path, e))
        return RunConfig(formats.loads(text, path), options)

    def emit(self, result, out=None):
        text = formats.dumps(result)
        if out:
            with io.open(out, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
        else:
            self.stdout.write(text, ending='')

    def _start_logging(self, verbosity):
        handler = logging.StreamHandler(self.stderr)
        handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
        logger = logging.getLogger('hitchin_sov')
        level = logger.level
        logger.setLevel(LOG_LEVELS.get(int(verbosity), logging.DEBUG))
        logger.addHandler(handler)
        return handler, level

