"""Localized Muckenhoupt characteristics, the localized maximal operator,
weighted norms, and the structural weight lemma fits."""

import numpy as np
import pytest

import rholab as rl
from rholab.weights import DELTA_LADDER


@pytest.fixture(scope="module")
def grid():
    return rl.Grid(3, 4.0, 9)


@pytest.fixture(scope="module")
def family(grid):
    return rl.generate_ball_family(grid, rl.FamilyPolicy(2, (0.75, 1.5)))


@pytest.fixture(scope="module")
def rho(grid):
    return rl.rho_field(rl.constant_potential(grid, 1.0))


def test_ap_characteristic_unit_weight_exact_one(grid, family, rho):
    w = rl.constant_weight(grid, 1.0)
    for p in (1.0, 1.5, 2.0):
        assert rl.ap_characteristic(w, p, 0.0, rho, family).value == 1.0


def test_ap_characteristic_power_weight(grid, family, rho):
    w = rl.power_weight(grid, 1.0)
    char = rl.ap_characteristic(w, 2.0, 0.0, rho, family)
    assert np.isfinite(char.value)
    assert char.value > 1.0
    assert char.argmax_ball is not None


def test_ap_theta_monotone(grid, family, rho):
    w = rl.power_weight(grid, 1.0)
    vals = [rl.ap_characteristic(w, 2.0, t, rho, family).value for t in (0.0, 0.5, 1.0, 2.0)]
    assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))


def test_ap_class_nesting_in_p(grid, family, rho):
    # discrete Jensen: the characteristic does not increase with p
    w = rl.power_weight(grid, 1.0)
    vals = [rl.ap_characteristic(w, p, 0.0, rho, family).value for p in (1.0, 1.5, 2.0, 3.0)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_ap_duality_identity(grid, family, rho):
    w = rl.power_weight(grid, 1.0)
    for p in (1.5, 2.0, 3.0):
        pprime = p / (p - 1.0)
        dual = rl.Weight(
            rl.ScalarField(grid, w.field.values ** (-pprime / p)), "dual"
        )
        a = rl.ap_characteristic(w, p, 1.0, rho, family).value
        b = rl.ap_characteristic(dual, pprime, 1.0, rho, family).value
        assert a == pytest.approx(b, rel=1e-10)


def test_ap_validation(grid, family, rho):
    w = rl.constant_weight(grid, 1.0)
    with pytest.raises(ValueError):
        rl.ap_characteristic(w, 0.5, 0.0, rho, family)
    with pytest.raises(ValueError):
        rl.ap_characteristic(w, 2.0, -1.0, rho, family)
    with pytest.raises(ValueError):
        rl.constant_weight(grid, 0.0)
    with pytest.raises(ValueError):
        rl.Weight(rl.constant_field(grid, 0.0), "zero")


def test_power_weight_offset_positive(grid):
    w = rl.power_weight(grid, 1.0)
    assert np.all(w.field.values > 0)


def test_rho_modulated_weight(grid, rho):
    w = rl.rho_modulated_weight(rho, 1.5)
    assert np.all(w.field.values >= 1.0)


def test_maximal_constant_function(grid, rho):
    f = rl.constant_field(grid, 1.0)
    M0 = rl.maximal_rho_theta(f, 0.0, rho, radii=(0.75, 1.5))
    assert np.allclose(M0.values, 1.0)
    # with damping the smallest radius wins
    theta = 1.2
    M = rl.maximal_rho_theta(f, theta, rho, radii=(0.75, 1.5))
    expected = (1.0 + 0.75 / rho.values) ** (-theta)
    assert np.allclose(M.values, expected)


def test_maximal_stride_subsample(grid, rho):
    f = rl.constant_field(grid, 1.0)
    M = rl.maximal_rho_theta(f, 0.0, rho, radii=(0.75,), stride=2)
    idx = grid.axis_indices(np.arange(grid.num_points))
    on = np.all(idx % 2 == 0, axis=1)
    assert np.allclose(M.values[on], 1.0)
    assert np.all(np.isnan(M.values[~on]))


def test_maximal_bounds_a1_candidate(grid, rho):
    # A_1-type candidate: exists (theta, C) on small ladders with M w <= C w
    w = rl.Weight(
        rl.ScalarField(grid, (1.0 + np.linalg.norm(grid.coords, axis=1)) ** -1.0), "decay"
    )
    found = None
    for theta in (0.5, 1.0, 2.0, 4.0):
        M = rl.maximal_rho_theta(w.field, theta, rho, radii=(0.75, 1.5, 3.0))
        need = float(np.max(M.values / w.field.values))
        for C in (1.0, 2.0, 4.0, 8.0, 16.0):
            if need <= C:
                found = (theta, C)
                break
        if found:
            break
    assert found is not None


def test_weighted_lp_norm_box(grid):
    c, p = 1.5, 2.0
    f = rl.constant_field(grid, c)
    w = rl.constant_field(grid, 1.0)
    exact = c * (grid.num_points * grid.cell_volume) ** (1.0 / p)
    assert rl.weighted_lp_norm(f, w, p) == pytest.approx(exact, rel=1e-12)


def test_weak_l1_two_level_exact():
    # values {3, 1} on masses {0.1, 0.9}: sup is max(0.3, 1.0) = 1.0 exactly
    g = rl.Grid(1, 0.5, 2)
    assert g.cell_volume == 1.0
    f = rl.ScalarField(g, np.array([3.0, 1.0]))
    w = rl.ScalarField(g, np.array([0.1, 0.9]))
    assert rl.weak_l1_quasinorm(f, w) == 1.0


def test_weak_at_most_strong(grid):
    rng = np.random.default_rng(0)
    for _ in range(25):
        f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        w = rl.ScalarField(grid, rng.uniform(0.1, 2.0, grid.num_points))
        assert rl.weak_l1_quasinorm(f, w) <= rl.weighted_lp_norm(f, w, 1.0) * (1 + 1e-12)


def test_reverse_holder_unit_weight(grid, family, rho):
    rep = rl.reverse_holder_weight_fit(rl.constant_weight(grid, 1.0), family, rho)
    assert rep.passed
    assert rep.constants["C"] == 1.0
    assert rep.constants["eta"] == 0.0
    assert rep.constants["measured"] == pytest.approx(1.0, abs=1e-12)


def test_reverse_holder_power_weight(grid, family, rho):
    rep = rl.reverse_holder_weight_fit(rl.power_weight(grid, 1.0), family, rho)
    assert rep.passed


def test_measure_comparison_unit_weight_exact(grid, family, rho):
    # w = 1: w(E)/w(B) = |E|/|B|, so delta = 1, eta = 0, C = 1 exactly
    fit = rl.measure_comparison_check(
        rl.constant_weight(grid, 1.0), family, rho, delta_ladder=(1.0,)
    )
    assert fit.passed
    assert fit.delta == 1.0
    assert fit.eta == 0.0
    assert fit.constant == 1.0


def test_measure_comparison_power_weight(grid, family, rho):
    fit = rl.measure_comparison_check(rl.power_weight(grid, 1.0), family, rho, seed=1)
    assert fit.passed
    assert fit.delta in DELTA_LADDER


def test_measure_comparison_consistency_with_rh_fit(grid, family, rho):
    # delta = eps/(1+eps) from the fitted reverse-Hoelder eps also passes
    w = rl.power_weight(grid, 1.0)
    rh = rl.reverse_holder_weight_fit(w, family, rho)
    eps = rh.constants["epsilon"]
    fit = rl.measure_comparison_check(w, family, rho, delta_ladder=(eps / (1 + eps),))
    assert fit.passed


def test_doubling_unit_weight(grid, family, rho):
    rep = rl.doubling_check(rl.constant_weight(grid, 1.0), 2.0, 0.0, rho, family)
    assert rep.passed
    # volume ratio of at least 2^d forces C at least 8
    assert rep.constants["C"] >= 8.0
    assert rep.constants["measured"] >= 2**3 * 0.8


def test_doubling_volume_ratio_resolved():
    # w(2B)/w(B) approaches 2^d for a well-resolved ball
    g = rl.Grid(3, 4.0, 33)
    one = rl.constant_field(g, 1.0)
    ball = rl.make_ball(g, np.zeros(3), 1.0)
    ratio = rl.measure(one, rl.dilate(ball, 2.0)) / rl.measure(one, ball)
    assert ratio == pytest.approx(2**3, rel=0.10)


def test_doubling_large_theta_needs_no_constant(grid, family, rho):
    rep = rl.doubling_check(rl.constant_weight(grid, 1.0), 2.0, 5.0, rho, family)
    assert rep.passed
    assert rep.constants["C"] == 1.0


def test_doubling_power_weight_origin_ratio():
    # w = |x| at origin balls: ratio near 2^(d+1) once resolved
    g = rl.Grid(3, 4.0, 33)
    w = rl.power_weight(g, 1.0)
    ball = rl.make_ball(g, np.zeros(3), 1.0)
    ratio = rl.measure(w.field, rl.dilate(ball, 2.0)) / rl.measure(w.field, ball)
    assert ratio == pytest.approx(2**4, rel=0.3)
