#coding: utf8
import cmath

import numpy as np

from pytest import raises

from hitchin_sov.angle import angle_coordinates, integrand, integrand_vector
from hitchin_sov.conf import overrides
from hitchin_sov.errors import DegenerateModel, NearDiscriminant
from hitchin_sov.hyperelliptic import CurvePoint, XPath
from hitchin_sov.sov import SO4, SpectralDivisor
from hitchin_sov.spectral import HamiltonianVector, SpectralCurveModel, SpectralPoint, build_model, partials
from .testing_utils import max_difference


def test_integrand_is_the_ratio_of_partials(model):
    pt = CurvePoint(0.5, cmath.sqrt(model.base(0.5)))
    lam = 3.5j
    d_lam, d_h = partials(model, lam, pt)
    values = integrand_vector(model, lam, pt)
    assert max_difference(values, d_h / (pt.y * d_lam)) < 1e-15
    assert integrand(model, 4, lam, pt) == values[3]


def test_zero_length_paths_give_zero_angles(model):
    points = [SpectralPoint(lam, CurvePoint(0, y)) for lam, y in
              ((3j, 1), (-3j, 1), (5j, 1), (-5j, 1), (3j, -1), (-5j, -1))]
    angles = angle_coordinates(model, SpectralDivisor(points), basepoint_x=0)
    assert np.array_equal(angles.phi, np.zeros(6))
    assert all(r.panels == 0 for r in angles.path_class)


def test_angles_are_deterministic(model, roundtrip_divisor):
    a = angle_coordinates(model, roundtrip_divisor)
    b = angle_coordinates(model, roundtrip_divisor)
    assert np.array_equal(a.phi, b.phi)
    assert a.as_dict(paths=True) == b.as_dict(paths=True)


def test_stored_paths_reproduce_the_angles(model, roundtrip_divisor):
    first = angle_coordinates(model, roundtrip_divisor)
    again = angle_coordinates(model, roundtrip_divisor, first.basepoint, path_class=first.path_class)
    assert max_difference(first.phi, again.phi) < 1e-13


def test_threads_do_not_change_the_sum(model, roundtrip_divisor):
    serial = angle_coordinates(model, roundtrip_divisor)
    with overrides(THREADS=3):
        threaded = angle_coordinates(model, roundtrip_divisor)
    assert np.array_equal(serial.phi, threaded.phi)


def test_angles_add_over_points(model, roundtrip_divisor):
    whole = angle_coordinates(model, roundtrip_divisor)
    parts = [angle_coordinates(model, roundtrip_divisor.subset([i]), whole.basepoint).phi
             for i in range(len(roundtrip_divisor))]
    assert max_difference(whole.phi, sum(parts)) < 1e-9 * (1 + float(np.max(np.abs(whole.phi))))


def test_angle_along_a_short_segment(model):
    # φ over one point moved along a straight segment is minus the integral of the integrand
    x0, x1 = 0, 0.1 + 0.05j
    end_lam = 1j * (x1 + 3)
    end = SpectralPoint(end_lam, CurvePoint(x1, cmath.sqrt(model.base(x1))))
    phi = angle_coordinates(model, SpectralDivisor([end]), basepoint_x=x0).phi
    nodes, weights = np.polynomial.legendre.leggauss(40)
    total = np.zeros(6, dtype=complex)
    for s, w in zip(nodes, weights):
        x = x0 + (x1 - x0) * (s + 1) / 2
        y = cmath.sqrt(model.base(x))
        total += w * (x1 - x0) / 2 * integrand_vector(model, 1j * (x + 3), CurvePoint(x, y))
    assert max_difference(phi, -total) < 1e-8


def test_points_on_the_discriminant_are_rejected(model):
    x = 2 / 3.0
    point = SpectralPoint(11j / 3, CurvePoint(x, cmath.sqrt(model.base(x))))
    with raises(NearDiscriminant):
        angle_coordinates(model, SpectralDivisor([point]))


def test_degenerate_models_are_rejected(quintic, roundtrip_divisor):
    h = HamiltonianVector.from_flat(SO4, 2, [0, 0, 0, 1, 0, 0])
    with raises(DegenerateModel):
        angle_coordinates(SpectralCurveModel(SO4, quintic, h), roundtrip_divisor)


def test_trace_rows(model, roundtrip_divisor):
    trace = []
    angle_coordinates(model, roundtrip_divisor, trace=trace)
    assert {row[0] for row in trace} == set(range(6))
    for i in range(6):
        ts = [row[1] for row in trace if row[0] == i]
        assert ts == sorted(ts)
        assert 0 <= ts[0] and ts[-1] <= 1
    assert all(len(row[5]) == 6 for row in trace)


def test_angle_vector_dict(model, roundtrip_divisor):
    data = angle_coordinates(model, roundtrip_divisor).as_dict()
    assert sorted(data) == ['basepoint', 'phi']
    assert len(data['phi']) == 6
    assert XPath.from_dict(angle_coordinates(model, roundtrip_divisor).as_dict(paths=True)['paths'][0])


def test_integrand_matches_the_moving_fiber_root(model):
    # the integrand is -(dλ/dH_j) / y along the sheet through λ
    x = 0.5
    pt = CurvePoint(x, cmath.sqrt(model.base(x)))
    lam, step = 3.5j, 1e-6
    values = integrand_vector(model, lam, pt)
    for j in range(6):
        moved = []
        for sign in (1, -1):
            e = np.zeros(6, dtype=complex)
            e[j] = sign * step
            shifted = build_model(SO4, model.base, HamiltonianVector.from_flat(SO4, 2, model.h.flat + e),
                                  canonical=False)
            moved.append(min(shifted.fiber(x, pt.y), key=lambda r: abs(r - lam)))
        slope = (moved[0] - moved[1]) / (2 * step)
        assert abs(values[j] + slope / pt.y) < 1e-6 * (1 + abs(slope))


def test_moving_the_basepoint_shifts_phi_by_the_connecting_integral(model):
    x = 0.3 + 0.1j
    point = SpectralPoint(1j * (x + 3), CurvePoint(x, cmath.sqrt(model.base(x))))
    at_zero = SpectralPoint(3j, CurvePoint(0, 1))
    old = angle_coordinates(model, SpectralDivisor([point]), basepoint_x=0).phi
    new = angle_coordinates(model, SpectralDivisor([point]), basepoint_x=0.2j).phi
    between = angle_coordinates(model, SpectralDivisor([at_zero]), basepoint_x=0.2j).phi
    assert max_difference(new - old, between) < 1e-8
