import django
import numpy as np
from pytest import fixture

from hitchin_sov import conf, formats  # noqa: F401

django.setup()

from hitchin_sov.hyperelliptic import HyperellipticCurve
from hitchin_sov.polyalg import ComplexPoly
from hitchin_sov.sov import SO4, SpectralDivisor
from hitchin_sov.spectral import HamiltonianVector, build_model

from .testing_utils import fixture_path

# P = x (x^2 - 1)(x^2 - 4) + 1, so P = 1 at x = -2..2 and P(3) = 121
QUINTIC = [1, 4, 0, -5, 0, 1]
# r0 = 15 - x - 2x^2, s = 34 - 14x + 5x^2: the λ-fiber is ±i(x + 3), ±i(2x - 5)
TRUTH = [15, -1, -2, 34, -14, 5]


@fixture
def quintic():
    return HyperellipticCurve(ComplexPoly(QUINTIC))


@fixture
def fifth_root_curve():
    """y^2 = x^5 + 1."""
    return HyperellipticCurve(ComplexPoly([1, 0, 0, 0, 0, 1]))


@fixture
def truth():
    return HamiltonianVector.from_flat(SO4, 2, np.array(TRUTH, dtype=complex))


@fixture
def model(quintic, truth):
    return build_model(SO4, quintic, truth)


@fixture
def roundtrip_divisor(quintic):
    with open(fixture_path('roundtrip.json')) as f:
        data = formats.loads(f.read())
    return SpectralDivisor.from_dict(data['divisor'], quintic)
