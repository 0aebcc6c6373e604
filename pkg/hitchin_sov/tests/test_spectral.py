#coding: utf8
import cmath

import numpy as np

from pytest import mark, raises

from hitchin_sov.errors import UnsupportedFamily, ShapeMismatch, ConfigError, InvalidPoint, SheetCollision
from hitchin_sov.hyperelliptic import CurvePoint, HyperellipticCurve, XPath, default_basepoint, plan_path
from hitchin_sov.sov import SO4, sample_divisor, sample_instance
from hitchin_sov.spectral import (HamiltonianVector, RootSystemSpec, SpectralCurveModel, build_model,
    canonicalize, continue_lambda, so4_partials, dR_dx, discriminant, eval_R, flat_layout,
    hamiltonian_count, invariant_degrees, lambda_fiber, min_separation, partials, reduced_system_size,
    render, x_discriminant_points)
from hitchin_sov.polyalg import ComplexPoly, companion_roots
from .testing_utils import contains_close, match_roots


def fiber_at(x):
    a, b = x + 3, 2 * x - 5
    return [1j * a, -1j * a, 1j * b, -1j * b]


def test_so4_structure():
    assert render(SO4, 2) == 'λ^4 + (H4 + x H5 + x^2 H6) λ^2 + (H1 + x H2 + x^2 H3)^2'
    assert hamiltonian_count(SO4, 2) == 6
    assert reduced_system_size(SO4, 2) == 3
    assert SO4.rep_dim == 4
    assert SO4.dimension == 6


def test_render_with_y_terms():
    assert render(SO4, 3) == ('λ^4 + (H7 + x H8 + x^2 H9 + x^3 H10 + x^4 H11 + y H12) λ^2'
                              ' + (H1 + x H2 + x^2 H3 + x^3 H4 + x^4 H5 + y H6)^2')


@mark.parametrize('roots, genus, size', ((SO4, 2, 3), (RootSystemSpec('D', 3), 2, 5),
                                         (RootSystemSpec('D', 4), 3, 14), (RootSystemSpec('A', 3), 2, 0)))
def test_reduced_system_size(roots, genus, size):
    assert reduced_system_size(roots, genus) == size


@mark.parametrize('family', 'ABCD')
@mark.parametrize('rank', range(1, 6))
@mark.parametrize('genus', (2, 3, 4))
def test_parameter_count_law(family, rank, genus):
    if family == 'D' and rank < 2:
        with raises(UnsupportedFamily):
            RootSystemSpec(family, rank)
        return
    roots = RootSystemSpec(family, rank)
    assert sum(2 * inv.degree - 1 for inv in roots.invariants) == roots.dimension
    layout = flat_layout(roots, genus)
    assert len(layout) == hamiltonian_count(roots, genus) == roots.dimension * (genus - 1)
    assert [c.index for c in layout] == list(range(1, len(layout) + 1))


def test_layout_puts_pfaffian_first():
    layout = flat_layout(SO4, 2)
    assert [c.pfaffian for c in layout] == [True] * 3 + [False] * 3
    assert [c.power for c in layout] == [0, 1, 2] * 2
    assert all(c.series == 'h0' for c in layout)


def test_bad_root_systems():
    with raises(UnsupportedFamily):
        RootSystemSpec('E', 6)
    with raises(ConfigError):
        RootSystemSpec('A', 'two')
    with raises(ConfigError):
        hamiltonian_count(SO4, 1)


def test_hamiltonian_shape_checks(truth):
    with raises(ShapeMismatch):
        HamiltonianVector.from_flat(SO4, 2, np.zeros(5))
    data = truth.as_dict()
    data['blocks'] = data['blocks'][:1]
    with raises(ShapeMismatch):
        HamiltonianVector.from_dict(data)
    data = truth.as_dict()
    data['blocks'][1]['h0'] = data['blocks'][1]['h0'][:2]
    with raises(ShapeMismatch):
        HamiltonianVector.from_dict(data)


def test_hamiltonian_dict_forms(truth):
    assert np.array_equal(HamiltonianVector.from_dict(truth.as_dict()).flat, truth.flat)
    flat = {'family': 'D', 'rank': 2, 'genus': 2, 'H': [[v.real, v.imag] for v in truth.flat]}
    assert np.array_equal(HamiltonianVector.from_dict(flat).flat, truth.flat)


def test_canonicalize_fixes_the_pfaffian_sign(truth):
    flipped = truth.negate_pfaffian()
    assert np.array_equal(flipped.flat[3:], truth.flat[3:])
    assert np.array_equal(canonicalize(SO4, flipped).flat, truth.flat)
    assert canonicalize(SO4, truth) is truth
    # first coefficient zero: the next one decides
    h = HamiltonianVector.from_flat(SO4, 2, [0, -1j, 2, 1, 1, 1])
    assert canonicalize(SO4, h).flat[1] == 1j


def test_fiber_is_known(model):
    assert model.even and model.y_free
    for x in (0.5, -1.25 + 0.5j, 4j):
        y = cmath.sqrt(model.base(x))
        assert match_roots(model.fiber(x, y), fiber_at(x)) < 1e-10
        for lam in fiber_at(x):
            assert abs(model.value(lam, x, y)) < 1e-9


def test_model_is_nondegenerate(model):
    assert not model.degenerate


def test_degenerate_model(quintic):
    # R = λ^2 (λ^2 + 1): a double root at λ = 0 over every x
    h = HamiltonianVector.from_flat(SO4, 2, [0, 0, 0, 1, 0, 0])
    assert SpectralCurveModel(SO4, quintic, h).degenerate


def test_build_model_checks_shapes(quintic, truth):
    with raises(ShapeMismatch):
        build_model(RootSystemSpec('D', 3), quintic, truth)


def test_partials_match_finite_differences():
    rng = np.random.default_rng(7)
    roots = SO4
    # a vector with y terms needs genus 3
    curve = HyperellipticCurve(ComplexPoly([1, 2, 0, -1, 0, 3, 0, 1]))
    flat = rng.normal(size=hamiltonian_count(roots, 3)) + 1j * rng.normal(size=hamiltonian_count(roots, 3))
    model = SpectralCurveModel(roots, curve, HamiltonianVector.from_flat(roots, 3, flat))
    x = 0.3 + 0.2j
    pt = CurvePoint(x, cmath.sqrt(curve(x)))
    lam = 0.7 - 0.4j
    d_lam, d_h = partials(model, lam, pt)
    step = 1e-6
    assert abs(d_lam - (model.value(lam + step, x, pt.y) - model.value(lam - step, x, pt.y)) / (2 * step)) < 1e-6
    for j in range(len(flat)):
        e = np.zeros(len(flat), dtype=complex)
        e[j] = step
        up = SpectralCurveModel(roots, curve, HamiltonianVector.from_flat(roots, 3, flat + e))
        down = SpectralCurveModel(roots, curve, HamiltonianVector.from_flat(roots, 3, flat - e))
        fd = (up.value(lam, x, pt.y) - down.value(lam, x, pt.y)) / (2 * step)
        assert abs(d_h[j] - fd) < 1e-6 * (1 + abs(fd))


def test_so4_partials_omit_the_chain_rule_factor(model):
    x, lam = 0.4 - 0.1j, 1.1 + 0.3j
    d_lam, d_h = partials(model, lam, CurvePoint(x, cmath.sqrt(model.base(x))))
    c_lam, c_h = so4_partials(model.h.flat, lam, x)
    assert abs(d_lam - c_lam) < 1e-12 * abs(d_lam)
    assert np.allclose(d_h[:3], 2 * c_h[:3], rtol=1e-13)
    assert np.allclose(d_h[3:], c_h[3:], rtol=1e-13)


def test_so4_partials_values():
    # H = (1, 1, 1, 0, 0, 0) at x = 1: the Pfaffian block is 3
    d_lam, d_h = so4_partials([1, 1, 1, 0, 0, 0], 0, 1)
    assert d_h[1] == 3
    assert d_lam == 0


def test_dR_dx_matches_finite_differences(model):
    x, step = 0.4 + 0.3j, 1e-6
    lam = 0.9 + 0.2j

    def r_at(z):
        return model.value(lam, z, cmath.sqrt(model.base(z)))
    pt = CurvePoint(x, cmath.sqrt(model.base(x)))
    assert abs(dR_dx(model, lam, pt) - (r_at(x + step) - r_at(x - step)) / (2 * step)) < 1e-5


def test_continue_lambda_follows_an_analytic_sheet(model):
    path = XPath([0, 0.5 + 0.5j, 1])
    assert abs(continue_lambda(model, path, 1, 3j) - 4j) < 1e-10
    lam, y = continue_lambda(model, path, -1, -5j, return_y=True)
    assert abs(lam + 3j) < 1e-10
    assert abs(y * y - model.base(1)) < 1e-10


def test_continue_lambda_checks_the_start(model):
    with raises(InvalidPoint):
        continue_lambda(model, XPath([0, 1j]), 1, 2j)


def test_discriminant_of_a_quadratic():
    # t^2 + 2x t + 3: 12 - 4x^2 up to a constant
    d = discriminant([ComplexPoly([3]), ComplexPoly([0, 2]), ComplexPoly([1])])
    assert d.degree == 2
    assert match_roots(companion_roots(d), [3 ** 0.5, -3 ** 0.5]) < 1e-12


def test_discriminant_points(model):
    points = x_discriminant_points(model, include_branch_points=False)
    for expected in (-3, 2.5, 8, 2 / 3.0):
        assert contains_close(points, expected, 1e-6)
    with_branch = x_discriminant_points(model)
    for e in model.base.branch_points:
        assert e in with_branch


def test_discriminant_points_general_path(quintic):
    # D3 without y terms goes through the Sylvester determinant of a cubic in λ^2
    roots = RootSystemSpec('D', 3)
    rng = np.random.default_rng(3)
    n = hamiltonian_count(roots, 2)
    flat = 0.5 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    flat[[4, 13, 14]] = 0
    h = HamiltonianVector.from_flat(roots, 2, flat)
    model = build_model(roots, quintic, h)
    for x in x_discriminant_points(model, include_branch_points=False):
        fiber = model.fiber(x, cmath.sqrt(quintic(x)))
        gaps = [abs(a - b) for i, a in enumerate(fiber) for b in fiber[i + 1:]]
        assert min(gaps) < 1e-2 * (1 + max(abs(l) for l in fiber))


def test_eval_and_fiber_at_a_point(model):
    pt = CurvePoint(2, 1)
    assert abs(eval_R(model, 5j, pt)) < 1e-12
    assert match_roots(lambda_fiber(model, pt), [5j, -5j, 1j, -1j]) < 1e-12


def test_invariant_degrees():
    assert [(inv.degree, inv.pfaffian) for inv in invariant_degrees(RootSystemSpec('D', 4))] == [
        (4, True), (2, False), (4, False), (6, False)]
    assert [inv.degree for inv in invariant_degrees(RootSystemSpec('A', 3))] == [2, 3, 4]


def test_even_model_has_no_odd_lambda_powers(model):
    for x in (0.5, -1.25 + 0.5j):
        y = cmath.sqrt(model.base(x))
        c = model.lambda_coefficients(x, y)
        assert np.array_equal(c[1::2], np.zeros(len(c) // 2))
        for lam in (0.3 + 1j, 2 - 0.5j):
            assert abs(model.value(lam, x, y) - model.value(-lam, x, y)) < 1e-12 * model.residual_scale(lam)


@mark.parametrize('family, rank', (('A', 3), ('B', 2), ('C', 2), ('D', 2), ('D', 3)))
def test_fiber_has_rep_dim_roots(family, rank):
    roots = RootSystemSpec(family, rank)
    curve, h = sample_instance(roots, 2, 1)
    model = build_model(roots, curve, h)
    x = 0.3 - 0.2j
    y = cmath.sqrt(curve(x))
    fiber = model.fiber(x, y)
    assert len(fiber) == roots.rep_dim
    for lam in fiber:
        assert abs(model.value(lam, x, y)) < 1e-9 * model.residual_scale(lam)


@mark.parametrize('seed', range(5))
def test_so4_discriminant_points_give_a_double_root(seed):
    curve, h = sample_instance(SO4, 2, seed)
    model = build_model(SO4, curve, h)
    points = x_discriminant_points(model, include_branch_points=False)
    assert points
    for x in points:
        fiber = model.fiber(x, cmath.sqrt(curve(x)))
        assert min_separation(fiber) < 1e-6 * (1 + max(abs(lam) for lam in fiber))


def subdivided(path, pieces):
    points = [path.start]
    for a, b in path.segments:
        points += [a + (b - a) * k / pieces for k in range(1, pieces + 1)]
    return XPath(points)


def continued_both_ways(model, target):
    x0 = default_basepoint(model.base)
    path = plan_path(model.base, x0, target, model.discriminant_points)
    y0 = cmath.sqrt(model.base(x0))
    ends = []
    for lam0 in model.fiber(x0, y0):
        ends.append((continue_lambda(model, path, y0, lam0),
                     continue_lambda(model, subdivided(path, 200), y0, lam0)))
    return ends


@mark.parametrize('seed', range(10))
def test_continuation_does_not_depend_on_the_step_grid(seed):
    curve, h = sample_instance(SO4, 2, seed)
    model = build_model(SO4, curve, h)
    ends = continued_both_ways(model, sample_divisor(model, seed)[0].x)
    for coarse, fine in ends:
        assert abs(coarse - fine) < 1e-8 * (1 + abs(coarse))
    # distinct sheets stay distinct
    assert min_separation([coarse for coarse, _ in ends]) > 1e-6


def test_fixture_continuation_does_not_depend_on_the_step_grid(model, roundtrip_divisor):
    for p in roundtrip_divisor:
        for coarse, fine in continued_both_ways(model, p.x):
            assert abs(coarse - fine) < 1e-8 * (1 + abs(coarse))


def test_continuation_stops_at_a_sheet_collision(model):
    # i(x + 3) meets -i(2x - 5) at x = 2/3
    with raises(SheetCollision):
        continue_lambda(model, XPath([0, 2 / 3.0]), 1, 3j)


def test_discriminant_points_are_cached(model):
    assert model.discriminant_points is model.discriminant_points
    assert contains_close(model.discriminant_points, 2 / 3.0, 1e-6)
