"""Luxemburg norms against closed forms, Young function structure, and the
generalized Hoelder inequality."""

import numpy as np
import pytest

import rholab as rl
from rholab.orlicz import EXP, IDENTITY, PHI, phi_m, young_properties_ok


@pytest.fixture(scope="module")
def grid():
    return rl.Grid(3, 4.0, 9)


@pytest.fixture(scope="module")
def ball(grid):
    return rl.make_ball(grid, np.zeros(3), 2.0)


def test_luxemburg_constant_identity(grid, ball):
    c = 3.7
    f = rl.constant_field(grid, c)
    assert rl.luxemburg_norm(f, ball, IDENTITY) == pytest.approx(c, rel=1e-12)


def test_luxemburg_constant_phi(grid, ball):
    # Phi(1) = 1 and Phi strictly increasing force the norm of a constant to c
    c = 2.25
    f = rl.constant_field(grid, c)
    assert rl.luxemburg_norm(f, ball, PHI) == pytest.approx(c, rel=1e-6)


def test_luxemburg_zero_convention(grid, ball):
    f = rl.constant_field(grid, 0.0)
    for A in (IDENTITY, PHI, EXP):
        assert rl.luxemburg_norm(f, ball, A) == 0.0


def test_luxemburg_exp_norm_of_one(grid, ball):
    # exp(1/lambda) - 1 <= 1 iff lambda >= 1/ln 2
    f = rl.constant_field(grid, 1.0)
    assert rl.luxemburg_norm(f, ball, EXP) == pytest.approx(1.0 / np.log(2.0), rel=1e-6)


def test_luxemburg_scaling(grid, ball):
    rng = np.random.default_rng(0)
    f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
    cf = rl.ScalarField(grid, 5.5 * f.values)
    for A in (IDENTITY, PHI, phi_m(2), EXP):
        a = rl.luxemburg_norm(f, ball, A)
        b = rl.luxemburg_norm(cf, ball, A)
        assert b == pytest.approx(5.5 * a, rel=1e-6)


def test_luxemburg_bisection_contract(grid, ball):
    rng = np.random.default_rng(1)
    for A in (PHI, phi_m(2), EXP):
        for _ in range(5):
            f = rl.ScalarField(grid, rng.standard_normal(grid.num_points) * 3.0)
            lam = rl.luxemburg_norm(f, ball, A)
            avg = float(np.mean(A(np.abs(f.values[ball.member_indices]) / lam)))
            assert 1.0 - 1e-5 <= avg <= 1.0 + 1e-12


def test_weighted_luxemburg_constant(grid, ball):
    rng = np.random.default_rng(2)
    w = rl.ScalarField(grid, rng.uniform(0.5, 2.0, grid.num_points))
    c = 1.6
    f = rl.constant_field(grid, c)
    assert rl.weighted_luxemburg_norm(f, ball, PHI, w) == pytest.approx(c, rel=1e-6)


def test_small_ordering_weighted(grid, ball):
    # ||f||_{L(w),B} <= ||f||_{LlogL(w),B} for random (f, w)
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        w = rl.ScalarField(grid, rng.uniform(0.2, 3.0, grid.num_points))
        lo = rl.weighted_luxemburg_norm(f, ball, IDENTITY, w)
        hi = rl.weighted_luxemburg_norm(f, ball, PHI, w)
        assert lo <= hi * (1 + 1e-12)


def test_young_function_properties():
    for A in (IDENTITY, PHI, phi_m(2), phi_m(3), EXP):
        assert young_properties_ok(A)


def test_young_validation():
    with pytest.raises(ValueError):
        rl.YoungFunction("bogus")
    with pytest.raises(ValueError):
        rl.YoungFunction("llog", 0)


def test_young_complementarity_pointwise():
    # st <= Phi(s) + (exp(t) - 1) on a sampled lattice
    s = np.geomspace(1e-3, 50.0, 80)
    t = np.geomspace(1e-3, 20.0, 80)
    S, T = np.meshgrid(s, t)
    lhs = S * T
    rhs = PHI(S) + EXP(T)
    assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


def test_holder_reduction_to_constant_g(grid, ball):
    rng = np.random.default_rng(4)
    f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
    g = rl.constant_field(grid, 1.0)
    rep = rl.holder_orlicz_check(f, g, ball)
    assert rep.passed
    # oracle: avg|f| <= ||f||_LlogL and ||1||_expL = 1/ln2 > 1/2
    avg = np.abs(f.values[ball.member_indices]).mean()
    assert avg <= 2 * rep.constants["llog_norm"] * rep.constants["exp_norm"]


def test_holder_zero_function(grid, ball):
    z = rl.constant_field(grid, 0.0)
    f = rl.constant_field(grid, 1.0)
    assert rl.holder_orlicz_check(z, f, ball).passed


def test_holder_random_trials(grid, ball):
    rng = np.random.default_rng(5)
    for _ in range(100):
        f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        g = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        assert rl.holder_orlicz_check(f, g, ball).passed


def test_holder_weighted_fits_small_ladder(grid, ball):
    rng = np.random.default_rng(6)
    w = rl.ScalarField(grid, rng.uniform(0.2, 2.0, grid.num_points))
    for _ in range(20):
        f = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        g = rl.ScalarField(grid, rng.standard_normal(grid.num_points))
        rep = rl.holder_orlicz_check(f, g, ball, w=w)
        assert rep.passed
        assert rep.constants["C"] <= 16.0
