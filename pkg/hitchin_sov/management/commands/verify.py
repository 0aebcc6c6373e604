#coding: utf8

from django.core.management.base import CommandError

from hitchin_sov.canonicity import verification_report
from hitchin_sov.errors import NumericError
from hitchin_sov.management.base import JSONCommand
from hitchin_sov.spectral import build_model


class Command(JSONCommand):
    help = ('Check that the Hamiltonians and angles are Darboux coordinates near the divisor. '
            'Exits with 3 when a threshold is missed; the report is written either way.')

    def run(self, config):
        # H as given; the finite-difference map continues it without sign normalization.
        model = build_model(config.roots, config.curve, config.hamiltonian, canonical=False)
        return verification_report(model, config.divisor, config.basepoint)

    def after(self, result):
        if not result['passed']:
            raise CommandError('verification failed: defect %g, conjugacy %g'
                               % (result['defect'], result['conjugacy_max']),
                               returncode=NumericError.exit_code)
