#coding: utf8

import logging
log = logging.getLogger(__name__)

from hitchin_sov.management.base import JSONCommand
from hitchin_sov.sov import sample_divisor, sample_instance
from hitchin_sov.spectral import RootSystemSpec, build_model


class Command(JSONCommand):
    help = ('Generate a seeded random instance: a curve, Hamiltonians and a divisor on '
            'their spectral curve, written as a config the other commands accept.')
    needs_config = False

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--family', dest='family', default='D',
            help='Root system family letter (A, B, C or D).')
        parser.add_argument('--rank', dest='rank', type=int, default=2)
        parser.add_argument('--genus', dest='genus', type=int, default=2)
        parser.add_argument('--count', dest='count', type=int, default=None,
            help='Number of divisor points; defaults to the number of Hamiltonians.')

    def run(self, config):
        options = config.options
        roots = RootSystemSpec(options['family'], options['rank'])
        curve, h = sample_instance(roots, options['genus'], config.seed)
        model = build_model(roots, curve, h)
        divisor = sample_divisor(model, config.seed, options.get('count'))
        log.info('Sampled %s on genus %d with seed %d.' % (roots, curve.genus, config.seed))
        result = roots.as_dict()
        result.update({
            'genus': curve.genus,
            'seed': config.seed,
            'curve': curve.as_dict(),
            'hamiltonian': h.as_dict(),
            'divisor': divisor.as_dict(),
        })
        return result
