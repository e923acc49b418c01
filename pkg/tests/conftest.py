"""Shared fixtures.  Operator builds are the expensive part, so the default
acceptance grid (d=3, n=17, L=4) and its two eigendecompositions are
session-scoped and disk-cached under .cache/."""

from __future__ import annotations

import os

import numpy as np
import pytest

import rholab as rl

CACHE_DIR = os.path.join(os.path.dirname(__file__), "..", ".cache")


@pytest.fixture(scope="session")
def small_grid():
    return rl.Grid(3, 4.0, 7)


@pytest.fixture(scope="session")
def small_family(small_grid):
    return rl.generate_ball_family(small_grid, rl.FamilyPolicy(2, (1.0, 2.0)))


@pytest.fixture(scope="session")
def small_potential(small_grid):
    return rl.constant_potential(small_grid, 1.0)


@pytest.fixture(scope="session")
def small_rho(small_potential):
    return rl.rho_field(small_potential)


@pytest.fixture(scope="session")
def small_operator(small_grid, small_potential):
    return rl.build_operator(small_grid, small_potential)


@pytest.fixture(scope="session")
def grid17():
    return rl.Grid(3, 4.0, 17)


@pytest.fixture(scope="session")
def family17(grid17):
    return rl.generate_ball_family(grid17, rl.FamilyPolicy(4, (0.5, 1.0, 2.0)))


@pytest.fixture(scope="session")
def potentials17(grid17):
    return {
        "constant": rl.constant_potential(grid17, 1.0),
        "power2": rl.power_potential(grid17, 2.0),
    }


@pytest.fixture(scope="session")
def rho17(potentials17):
    return {name: rl.rho_field(V) for name, V in potentials17.items()}


@pytest.fixture(scope="session")
def operators17(grid17, potentials17):
    return {
        name: rl.build_operator(grid17, V, cache_dir=CACHE_DIR)
        for name, V in potentials17.items()
    }


@pytest.fixture(scope="session")
def weights17(grid17):
    return {
        "constant": rl.constant_weight(grid17, 1.0),
        "power1": rl.power_weight(grid17, 1.0),
    }


@pytest.fixture(scope="session")
def symbols17(grid17):
    return {
        "constant": rl.constant_symbol(grid17, 2.0),
        "log": rl.log_symbol(grid17),
    }


def rng(seed=0):
    return np.random.default_rng(seed)
