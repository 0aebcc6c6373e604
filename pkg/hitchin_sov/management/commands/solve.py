#coding: utf8

import logging
log = logging.getLogger(__name__)

from hitchin_sov.errors import ConfigError
from hitchin_sov.formats import parse_complex_list
from hitchin_sov.management.base import JSONCommand
from hitchin_sov.sov import SO4, complete_seed, solve_newton, solve_so4_radicals
from hitchin_sov.spectral import HamiltonianVector


class Command(JSONCommand):
    help = ('Recover the Hamiltonians from a spectral divisor: in radicals for so(4) on '
            'genus 2, by Newton from the "h0" seed otherwise.')

    def run(self, config):
        roots, curve = config.roots, config.curve
        divisor = config.divisor
        if roots == SO4 and curve.genus == 2 and 'h0' not in config:
            solution = solve_so4_radicals(curve, divisor)
        else:
            solution = solve_newton(roots, curve, divisor, self.seed(config, roots, curve, divisor))
        result = solution.as_dict()
        result.update(roots.as_dict())
        result['genus'] = curve.genus
        return result

    def seed(self, config, roots, curve, divisor):
        if 'h0' not in config:
            raise ConfigError('%s on genus %d is solved by Newton: give a seed as "h0" '
                              '(a Hamiltonian object, or {"pfaffian": [...]})' % (roots, curve.genus))
        raw = config.get('h0')
        if isinstance(raw, dict) and 'pfaffian' in raw:
            log.info('Completing the seed from its Pfaffian block.')
            return complete_seed(roots, curve, divisor, parse_complex_list(raw['pfaffian'], 'h0.pfaffian'))
        return HamiltonianVector.from_dict(raw, roots, curve.genus)
