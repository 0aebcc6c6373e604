import numpy as np

from pytest import mark, raises
from hypothesis import given, settings
from hypothesis.strategies import floats, lists

from hitchin_sov.errors import ZeroPolynomial, DegenerateLeadingCoefficient
from hitchin_sov.polyalg import (ComplexPoly, companion_roots, cubic_roots, horner, quadratic_roots,
    quartic_roots_radicals, root_residual, sort_roots)
from .testing_utils import match_roots

coefficient = floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def planted(rng, count, spread=1.0):
    return spread * (rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count))


def test_trailing_zeros_are_stripped():
    p = ComplexPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert ComplexPoly([0, 0]).is_zero()
    assert p[5] == 0


def test_poly_is_immutable():
    p = ComplexPoly([1, 2])
    with raises(AttributeError):
        p.coeffs = (3,)


def test_from_roots_vanishes_at_roots():
    roots = [1, -2j, 0.5 + 0.5j]
    p = ComplexPoly.from_roots(roots, leading=3)
    assert p.degree == 3
    assert p.leading == 3
    for r in roots:
        assert abs(p(r)) < 1e-14


def test_derivative():
    p = ComplexPoly([5, 3, 0, 2])
    assert p.derivative() == ComplexPoly([3, 0, 6])
    assert ComplexPoly([7]).derivative().is_zero()


def test_derivative_matches_a_difference_quotient():
    p = ComplexPoly([1 - 2j, 0.5, 3j, -1, 2])
    z, step = 0.3 + 0.7j, 1e-6
    fd = (p(z + step) - p(z - step)) / (2 * step)
    assert abs(p.derivative()(z) - fd) < 1e-8 * (1 + abs(fd))


def test_numpy_scalars_on_the_left():
    t = ComplexPoly([0, 1])
    for scalar in (np.complex128(2 - 1j), np.float64(2.5), np.int64(3)):
        product = scalar * t
        assert isinstance(product, ComplexPoly)
        assert product == ComplexPoly([0, complex(scalar)])
        total = scalar + t
        assert isinstance(total, ComplexPoly)
        assert total == ComplexPoly([complex(scalar), 1])
    assert isinstance(np.complex128(1j) * t * t - np.float64(1), ComplexPoly)


@given(lists(coefficient, min_size=1, max_size=6), lists(coefficient, min_size=1, max_size=6),
       floats(min_value=-2, max_value=2))
def test_product_evaluates_to_product_of_values(a, b, x):
    p, q = ComplexPoly(a), ComplexPoly(b)
    scale = (1 + sum(abs(c) for c in a)) * (1 + sum(abs(c) for c in b)) * 2 ** 12
    assert abs((p * q)(x) - p(x) * q(x)) <= 1e-12 * scale
    assert abs((p + q)(x) - (p(x) + q(x))) <= 1e-12 * scale
    assert abs((p - q)(x) - (p(x) - q(x))) <= 1e-12 * scale


def test_horner_on_arrays():
    x = np.array([0, 1, 2.0])
    assert np.allclose(horner([1, 0, 1], x), [1, 2, 5])


def test_companion_roots_zero_polynomial():
    with raises(ZeroPolynomial):
        companion_roots(ComplexPoly([0]))


def test_companion_roots_constant():
    assert companion_roots(ComplexPoly([4])) == []


def test_companion_roots_are_sorted():
    roots = companion_roots(ComplexPoly.from_roots([2, -1, 1j, -1j]))
    assert roots == sort_roots(roots)
    assert match_roots(roots, [2, -1, 1j, -1j]) < 1e-12


@mark.parametrize('seed', range(10))
def test_companion_roots_recover_planted(seed):
    rng = np.random.default_rng(seed)
    roots = planted(rng, 7, 1.5)
    p = ComplexPoly.from_roots(roots, leading=complex(rng.normal(), rng.normal()))
    assert match_roots(companion_roots(p), roots) < 1e-8


def test_quadratic_roots_without_cancellation():
    # u^2 + 1e8 u + 1: the small root is -1e-8 to full precision
    small, large = sorted(quadratic_roots(1e8, 1), key=abs)
    assert abs(small + 1e-8) < 1e-22
    assert abs(large + 1e8) < 1e-6


def test_cubic_roots():
    roots = [1, 2j, -0.5 - 1j]
    p = ComplexPoly.from_roots(roots)
    assert match_roots(cubic_roots(p[2], p[1], p[0]), roots) < 1e-12


def test_cubic_triple_root():
    # (m - 1)^3
    assert match_roots(cubic_roots(-3, 3, -1), [1, 1, 1]) < 1e-4


def test_quartic_biquadratic():
    # q = 0: one resolvent root vanishes
    assert match_roots(quartic_roots_radicals(4, 0, -5, 0, 1), [1, -1, 2, -2]) < 1e-13


def test_quartic_fourfold_root():
    assert match_roots(quartic_roots_radicals(1, -4, 6, -4, 1), [1] * 4) < 1e-3


def test_quartic_degenerate_leading_coefficient():
    with raises(DegenerateLeadingCoefficient):
        quartic_roots_radicals(1, 2, 3, 4, 0)
    with raises(DegenerateLeadingCoefficient):
        quartic_roots_radicals(1, 2, 3, 4, 1e-20)


def test_quartic_roots_are_sorted():
    roots = quartic_roots_radicals(*ComplexPoly.from_roots([3, -3, 1j, 2 - 1j]).coeffs)
    assert roots == sort_roots(roots)


def test_quartic_matches_companion_on_random_quartics():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        p = ComplexPoly.from_roots(planted(rng, 4, 2.0), leading=complex(rng.normal(), rng.normal()) + 2)
        radical = quartic_roots_radicals(*[p[k] for k in range(5)])
        assert match_roots(radical, companion_roots(p)) < 1e-8


@given(coefficient, coefficient, coefficient, coefficient)
@settings(max_examples=200)
def test_quartic_residuals(c0, c1, c2, c3):
    coeffs = [c0, c1, c2, c3, 1]
    for t in quartic_roots_radicals(*coeffs):
        assert root_residual(coeffs, t) < 1e-7


def test_root_residual_is_scale_free():
    coeffs = [2, -3, 1]
    assert root_residual(coeffs, 1) == 0
    assert abs(root_residual([1e6 * c for c in coeffs], 1.5) - root_residual(coeffs, 1.5)) < 1e-15


def test_trimmed():
    assert ComplexPoly([1, 2, 1e-20]).trimmed(1e-15).degree == 1
