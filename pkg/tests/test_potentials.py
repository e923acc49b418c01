"""Critical radius computations against closed forms, comparability fits, and
reverse-Hoelder diagnostics."""

import numpy as np
import pytest

import rholab as rl
from rholab.potentials import RhoExceedsDomainError

RHO_CONST = np.sqrt(3.0 / (4.0 * np.pi))  # closed form for V = 1, d = 3


def test_rho_constant_closed_form_n17():
    g = rl.Grid(3, 4.0, 17)
    V = rl.constant_potential(g, 1.0)
    assert rl.compute_rho(V, np.zeros(3)) == pytest.approx(RHO_CONST, rel=0.05)


def test_rho_constant_scaling_law():
    # rho(cV) = rho(V)/sqrt(c) for constant V, within the combined quadrature tolerance
    g = rl.Grid(3, 4.0, 17)
    r1 = rl.compute_rho(rl.constant_potential(g, 1.0), np.zeros(3))
    r4 = rl.compute_rho(rl.constant_potential(g, 4.0), np.zeros(3))
    assert abs(r4 - r1 / 2.0) <= 0.10 * (r1 / 2.0)


def test_rho_translation_invariance_for_constant():
    g = rl.Grid(3, 4.0, 17)
    V = rl.constant_potential(g, 1.0)
    vals = [rl.compute_rho(V, p) for p in ([0, 0, 0], [1, 0.5, -1], [-2, 2, 0])]
    assert max(vals) - min(vals) <= 1e-6 * vals[0]


def test_rho_power_potential_monotone_along_ray():
    # the defining integral grows with the center's distance, so rho decreases
    g = rl.Grid(3, 4.0, 17)
    V = rl.power_potential(g, 2.0)
    ray = [rl.compute_rho(V, [x, 0.0, 0.0]) for x in (0.0, 0.5, 1.0, 2.0, 3.0)]
    assert all(a >= b - 1e-12 for a, b in zip(ray, ray[1:]))


def test_rho_nonmonotone_fallback_matches():
    g = rl.Grid(3, 4.0, 17)
    V = rl.constant_potential(g, 1.0)
    a = rl.compute_rho(V, np.zeros(3), monotone=True)
    b = rl.compute_rho(V, np.zeros(3), monotone=False)
    assert a == pytest.approx(b, rel=1e-5)


def test_rho_exceeds_domain():
    g = rl.Grid(3, 4.0, 9)
    V = rl.constant_potential(g, 1e-6)
    with pytest.raises(RhoExceedsDomainError):
        rl.compute_rho(V, np.zeros(3))


def test_rho_tol_validation():
    g = rl.Grid(3, 4.0, 9)
    with pytest.raises(ValueError):
        rl.compute_rho(rl.constant_potential(g, 1.0), np.zeros(3), tol=0.0)


def test_rho_field_constant(small_potential, small_rho):
    assert small_rho.ok
    spread = small_rho.values.max() - small_rho.values.min()
    assert spread <= 1e-6
    assert small_rho.values[0] == pytest.approx(RHO_CONST, rel=0.05)


def test_rho_field_resolution_consistency():
    vals = []
    for n in (9, 17):
        g = rl.Grid(3, 4.0, n)
        vals.append(rl.compute_rho(rl.constant_potential(g, 1.0), np.zeros(3)))
    assert vals[0] == pytest.approx(vals[1], rel=0.08)


def test_rho_field_error_mask_rejects():
    g = rl.Grid(3, 4.0, 5)
    field = rl.rho_field(rl.constant_potential(g, 1e-6))
    assert not field.ok
    with pytest.raises(ValueError):
        field.require_ok()


def test_potential_validation():
    g = rl.Grid(3, 4.0, 5)
    with pytest.raises(ValueError):
        rl.Potential(rl.constant_field(g, -1.0), "bad")
    with pytest.raises(ValueError):
        rl.Potential(rl.constant_field(g, 0.0), "zero")
    with pytest.raises(ValueError):
        rl.power_potential(g, -1.0)


def test_bump_potential_positive():
    g = rl.Grid(3, 4.0, 9)
    V = rl.bump_potential(g, [[0, 0, 0], [1, 1, 1]], [1.0, 2.0], [1.0, 0.5])
    assert np.all(V.field.values >= 0)
    assert V.field.values.max() > 1.0


def test_comparability_constant_potential(small_rho):
    rep = rl.check_rho_comparability(small_rho)
    assert rep.passed
    # constant rho: the sandwich holds at the ladder floor
    assert rep.constants["C"] == 1.0


def test_comparability_power_potential():
    g = rl.Grid(3, 4.0, 9)
    rho = rl.rho_field(rl.power_potential(g, 2.0))
    rep = rl.check_rho_comparability(rho, seed=5)
    assert rep.passed
    assert rep.constants["C"] in (1.0, 2.0, 4.0, 8.0, 16.0)
    assert rep.constants["N0"] in (1, 2, 3, 4)


def test_comparability_single_point_pair(small_rho):
    # x = y collapses both bounds to 1/C <= 1 <= C
    v = small_rho.values[0]
    assert 1.0 / 1.0 <= v / v <= 1.0


def test_reverse_holder_constant(small_potential, small_family):
    rep = rl.reverse_holder_report(small_potential, 3.0, small_family)
    assert rep.constant == pytest.approx(1.0, abs=1e-12)


def test_reverse_holder_scale_invariance(small_grid, small_family):
    V1 = rl.power_potential(small_grid, 2.0)
    V2 = rl.Potential(rl.ScalarField(small_grid, 2.0 * V1.field.values), "2x")
    r1 = rl.reverse_holder_report(V1, 3.0, small_family)
    r2 = rl.reverse_holder_report(V2, 3.0, small_family)
    assert r1.constant == pytest.approx(r2.constant, rel=1e-12)


def test_reverse_holder_power_law_recorded(small_grid, small_family):
    rep = rl.reverse_holder_report(rl.power_potential(small_grid, 2.0), 3.0, small_family)
    assert np.isfinite(rep.constant)
    assert rep.constant >= 1.0


def test_reverse_holder_ratio_at_least_one(small_grid, small_family):
    # power-mean inequality: ratio >= 1 on every ball
    V = rl.bump_potential(small_grid, [[0.5, 0, 0]], [3.0], [1.5])
    Vq = rl.ScalarField(small_grid, V.field.values**2)
    for ball in small_family:
        mean = V.field.values[ball.member_indices].mean()
        if mean == 0:
            continue
        ratio = (Vq.values[ball.member_indices].mean()) ** 0.5 / mean
        assert ratio >= 1.0 - 1e-12


def test_reverse_holder_validation(small_potential, small_family):
    with pytest.raises(ValueError):
        rl.reverse_holder_report(small_potential, 1.0, small_family)
