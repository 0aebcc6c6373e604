#coding: utf8

import logging
log = logging.getLogger(__name__)

from hitchin_sov.formats import complex_pairs
from hitchin_sov.management.base import JSONCommand
from hitchin_sov.spectral import (build_model, flat_layout, hamiltonian_count, invariant_degrees,
    reduced_system_size, render, x_discriminant_points)


class Command(JSONCommand):
    help = 'Describe the spectral curve of a root system on a hyperelliptic curve.'

    def run(self, config):
        roots, genus = config.roots, config.genus
        result = roots.as_dict()
        result.update({
            'name': roots.name,
            'genus': genus,
            'rep_dim': roots.rep_dim,
            'dimension': roots.dimension,
            'degrees': [{'degree': inv.degree, 'pfaffian': inv.pfaffian} for inv in invariant_degrees(roots)],
            'N': hamiltonian_count(roots, genus),
            'reduced_system_size': reduced_system_size(roots, genus),
            'layout': [c._asdict() for c in flat_layout(roots, genus)],
            'rendered': render(roots, genus),
        })
        if 'curve' in config and 'hamiltonian' in config:
            model = build_model(roots, config.curve, config.hamiltonian)
            result['model'] = model.as_dict()
            result['discriminant_points'] = complex_pairs(x_discriminant_points(model))
        log.info('Built %s on genus %s: N = %d.' % (roots, genus, result['N']))
        return result
