#coding: utf8

import io

from hitchin_sov.angle import angle_coordinates
from hitchin_sov.formats import write_trace_csv
from hitchin_sov.management.base import JSONCommand
from hitchin_sov.spectral import build_model


class Command(JSONCommand):
    help = 'Compute the angle coordinates of a divisor on the spectral curve.'

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--trace', dest='trace',
            help='Write every quadrature node (t, x, y, λ, integrands) to this CSV file.')
        parser.add_argument('--paths', action='store_true', dest='paths', default=False,
            help='Include the integration paths in the output.')

    def run(self, config):
        model = build_model(config.roots, config.curve, config.hamiltonian)
        trace = [] if config.options.get('trace') else None
        angles = angle_coordinates(model, config.divisor, config.basepoint, trace=trace)
        if trace is not None:
            with io.open(config.options['trace'], 'w', encoding='utf-8', newline='') as f:
                write_trace_csv(trace, len(model.h), f)
        return angles.as_dict(paths=config.options.get('paths', False))
