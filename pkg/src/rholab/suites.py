"""Theorem-level verification suites: operator-norm estimation on weighted
Lebesgue and Morrey spaces, growth-exponent fitting for the localized factor,
and the endpoint weak-type / L log L commutator checks.

Every suite follows the same protocol: generate a deterministic family of test
functions, normalize each in the input norm, push it through the transform,
and fit the minimal lexicographic (vartheta, C) on the shared ladders so the
target inequality holds for every sampled (function, ball[, level]) instance.
The fitted pair witnesses the existential constants; the raw measured constant
is reported alongside for regression comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bmo import Symbol
from .grid import Ball, BallFamily, ScalarField
from .morrey import MorreyParams, lloglog_morrey_norm, morrey_norm
from .operators import (
    SpectralOperator,
    apply_transform,
    commutator_apply,
    kernel_columns,
    transform_magnitude,
)
from .orlicz import phi_m
from .potentials import CriticalRadiusField
from .reporting import BoundednessReport, CONSTANT_LADDER, fit_growth_bound
from .weights import Weight, _weak_value, weak_l1_quasinorm, weighted_lp_norm

GENERATOR_KINDS = ("gaussian", "ball", "shell", "kernel_column", "oscillatory")


@dataclass
class TestFunctionSuite:
    """Deterministic test-function family; every member has nonzero norm."""

    functions: list  # (name, ScalarField) pairs
    seed: int

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)


def make_test_suite(
    op: SpectralOperator,
    family: BallFamily,
    seed: int = 0,
    count: int = 50,
    kinds=GENERATOR_KINDS,
) -> TestFunctionSuite:
    grid = op.grid
    rng = np.random.default_rng(seed)
    balls = list(family)
    functions = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        if kind == "gaussian":
            vals = rng.standard_normal(grid.num_points)
        elif kind == "ball":
            ball = balls[int(rng.integers(0, len(balls)))]
            vals = np.zeros(grid.num_points)
            vals[ball.member_indices] = 1.0
        elif kind == "shell":
            ball = balls[int(rng.integers(0, len(balls)))]
            d = np.linalg.norm(grid.coords - ball.center, axis=1)
            lo, hi = 2 * ball.radius, 4 * ball.radius
            vals = ((d >= lo) & (d < hi)).astype(float)
            if not vals.any():
                vals = (d >= lo).astype(float)
        elif kind == "kernel_column":
            col = int(rng.integers(0, grid.num_points))
            comp = kernel_columns(op, "R", col)
            vals = comp[int(rng.integers(0, op.dim))]
        elif kind == "oscillatory":
            freq = rng.integers(1, 4, size=grid.dim)
            center = rng.uniform(-grid.half_width / 2, grid.half_width / 2, size=grid.dim)
            width = grid.half_width / 2
            phase = np.cos(np.pi * (grid.coords * freq).sum(axis=1) / grid.half_width)
            envelope = np.exp(-((grid.coords - center) ** 2).sum(axis=1) / width**2)
            vals = phase * envelope
        if not np.any(vals != 0):
            vals = np.ones(grid.num_points)
        functions.append((f"{kind}_{i}", ScalarField(grid, vals)))
    return TestFunctionSuite(functions=functions, seed=seed)


def _fit_report(theorem, rows, labels, details) -> BoundednessReport:
    vt, C, measured, idx = fit_growth_bound([(v, b, s) for v, b, s, _ in rows])
    witness = {}
    if idx is not None:
        witness = dict(labels[idx])
        witness["value"] = rows[idx][0]
    ratios = {}
    for (v, b, s, name) in rows:
        key = name["function"]
        ratios[key] = max(ratios.get(key, 0.0), v / s)
    return BoundednessReport(
        theorem=theorem,
        passed=vt is not None,
        fitted_vartheta=vt,
        fitted_constant=C,
        measured_constant=measured,
        ratios=ratios,
        witness=witness,
        details=details,
    )


def lebesgue_boundedness_suite(
    op: SpectralOperator,
    w: Weight,
    p: float,
    suite: TestFunctionSuite,
    which: str = "R",
) -> BoundednessReport:
    """Strong (p > 1) or weak (p = 1) operator-norm scan on the weighted
    Lebesgue space: the measured constant is the max ratio over the suite."""
    ratios = {}
    skipped = 0
    for name, f in suite:
        denom = weighted_lp_norm(f, w.field, p)
        if denom == 0.0:
            skipped += 1
            continue
        out = transform_magnitude(apply_transform(op, f, which))
        out_field = ScalarField(op.grid, out)
        if p == 1.0:
            num = weak_l1_quasinorm(out_field, w.field)
        else:
            num = weighted_lp_norm(out_field, w.field, p)
        ratios[name] = num / denom
    measured = max(ratios.values())
    fitted = next((C for C in CONSTANT_LADDER if measured <= C * (1 + 1e-12)), None)
    worst = max(ratios, key=ratios.get)
    return BoundednessReport(
        theorem=f"lebesgue_{'weak' if p == 1.0 else 'strong'}({which})",
        passed=fitted is not None,
        fitted_vartheta=None,
        fitted_constant=fitted,
        measured_constant=measured,
        ratios=ratios,
        witness={"function": worst},
        details={"p": p, "weight": w.descriptor, "skipped": skipped},
    )


def _per_ball_strong(out_mag, w, family, p, kappa):
    cell = family.grid.cell_volume
    rows = []
    for ball in family:
        wv = w.field.values[ball.member_indices]
        fv = out_mag[ball.member_indices]
        wB = float(wv.sum() * cell)
        val = (float(np.dot(fv**p, wv) * cell) / wB**kappa) ** (1.0 / p)
        rows.append((ball, val))
    return rows


def morrey_boundedness_suite(
    op: SpectralOperator,
    w: Weight,
    params: MorreyParams,
    rho: CriticalRadiusField,
    family: BallFamily,
    suite: TestFunctionSuite,
    which: str = "R",
) -> BoundednessReport:
    """Per-ball strong Morrey bound for T on inputs normalized to unit Morrey norm:
    fits (vartheta, C) with (w(B)^-kappa int_B |Tf|^p w)^(1/p) <= C (1+r/rho(x0))^vartheta."""
    if params.p <= 1:
        raise ValueError("strong Morrey suite needs p > 1")
    rows, labels = [], []
    kernel_names = []
    skipped = 0
    for name, f in suite:
        norm = morrey_norm(f, w, params, rho, family).value
        if norm == 0.0:
            skipped += 1  # f lives entirely outside the finite family
            continue
        g = ScalarField(op.grid, f.values / norm)
        out = transform_magnitude(apply_transform(op, g, which))
        if name.startswith("kernel_column"):
            kernel_names.append(name)
        for ball, val in _per_ball_strong(out, w, family, params.p, params.kappa):
            base = 1.0 + ball.radius / rho.at_point(ball.center)
            rows.append((val, base, 1.0, {"function": name}))
            labels.append({"function": name, "ball_radius": ball.radius})
    report = _fit_report(
        f"morrey_strong({which})",
        rows,
        labels,
        {
            "p": params.p,
            "kappa": params.kappa,
            "input_theta": params.theta,
            "weight": w.descriptor,
            "skipped": skipped,
        },
    )
    if kernel_names:
        worst = report.witness.get("function")
        report.details["kernel_column_attains_max"] = worst in kernel_names
    return report


def weak_morrey_boundedness_suite(
    op: SpectralOperator,
    w: Weight,
    kappa: float,
    rho: CriticalRadiusField,
    family: BallFamily,
    suite: TestFunctionSuite,
    which: str = "R",
    input_theta: float = 0.0,
) -> BoundednessReport:
    """Endpoint p = 1 bound: per-ball w(B)^-kappa sup_lambda lambda w({|Tf| > lambda} in B)
    for inputs normalized in the strong p = 1 Morrey norm."""
    params = MorreyParams(p=1.0, kappa=kappa, theta=input_theta, flavor="strong")
    cell = op.grid.cell_volume
    rows, labels = [], []
    for name, f in suite:
        norm = morrey_norm(f, w, params, rho, family).value
        g = ScalarField(op.grid, f.values / norm)
        out = transform_magnitude(apply_transform(op, g, which))
        for ball in family:
            wv = w.field.values[ball.member_indices]
            wB = float(wv.sum() * cell)
            weak = _weak_value(out[ball.member_indices], wv * cell)
            base = 1.0 + ball.radius / rho.at_point(ball.center)
            rows.append((weak / wB**kappa, base, 1.0, {"function": name}))
            labels.append({"function": name, "ball_radius": ball.radius})
    return _fit_report(
        f"morrey_weak({which})",
        rows,
        labels,
        {"kappa": kappa, "input_theta": input_theta, "weight": w.descriptor},
    )


def commutator_boundedness_suite(
    op: SpectralOperator,
    b: Symbol,
    w: Weight,
    params: MorreyParams,
    rho: CriticalRadiusField,
    family: BallFamily,
    suite: TestFunctionSuite,
    m: int = 1,
    which: str = "R",
) -> BoundednessReport:
    """Strong Morrey bound for the order-m commutator [b, T]_m."""
    if params.p <= 1:
        raise ValueError("commutator strong suite needs p > 1")
    rows, labels = [], []
    for name, f in suite:
        norm = morrey_norm(f, w, params, rho, family).value
        g = ScalarField(op.grid, f.values / norm)
        out = transform_magnitude(commutator_apply(op, b, g, m, which))
        for ball, val in _per_ball_strong(out, w, family, params.p, params.kappa):
            base = 1.0 + ball.radius / rho.at_point(ball.center)
            rows.append((val, base, 1.0, {"function": name}))
            labels.append({"function": name, "ball_radius": ball.radius})
    return _fit_report(
        f"commutator_strong(m={m},{which})",
        rows,
        labels,
        {
            "p": params.p,
            "kappa": params.kappa,
            "input_theta": params.theta,
            "m": m,
            "symbol": b.descriptor,
            "weight": w.descriptor,
        },
    )


def endpoint_lloglog_suite(
    op: SpectralOperator,
    b: Symbol,
    w: Weight,
    kappa: float,
    theta: float,
    rho: CriticalRadiusField,
    family: BallFamily,
    suite: TestFunctionSuite,
    m: int = 1,
    which: str = "R",
    lambda_points: int = 10,
) -> BoundednessReport:
    """Endpoint L log L bound for [b, T]_m: fits (vartheta, C) with
    w(B)^-kappa w({x in B : |[b,T]_m f| > lambda})
        <= C (1+r/rho(x0))^vartheta ||Phi_m(|f|/lambda)||_{LlogL-Morrey(kappa,theta)}
    over sampled (f, B, lambda); the lambda grid spans [0.01, 100] times the
    median magnitude of each output."""
    A = phi_m(m)
    llogl_params = MorreyParams(p=1.0, kappa=kappa, theta=theta, flavor="llogl")
    cell = op.grid.cell_volume
    rows, labels = [], []
    for name, f in suite:
        out = transform_magnitude(commutator_apply(op, b, f, m, which))
        positive = out[out > 0]
        if len(positive) == 0:
            rows.append((0.0, 1.0, 1.0, {"function": name}))
            labels.append({"function": name, "lambda": None})
            continue
        med = float(np.median(positive))
        lam_grid = np.geomspace(0.01 * med, 100.0 * med, lambda_points)
        for lam in lam_grid:
            phi_field = ScalarField(op.grid, A(np.abs(f.values) / lam))
            rhs_unit = lloglog_morrey_norm(phi_field, w, llogl_params, rho, family).value
            for ball in family:
                wv = w.field.values[ball.member_indices]
                wB = float(wv.sum() * cell)
                mass = float(wv[out[ball.member_indices] > lam].sum() * cell)
                base = 1.0 + ball.radius / rho.at_point(ball.center)
                rows.append((mass / wB**kappa, base, rhs_unit, {"function": name}))
                labels.append({"function": name, "lambda": float(lam), "ball_radius": ball.radius})
    return _fit_report(
        f"endpoint_llogl(m={m},{which})",
        rows,
        labels,
        {
            "kappa": kappa,
            "input_theta": theta,
            "m": m,
            "symbol": b.descriptor,
            "weight": w.descriptor,
            "lambda_points": lambda_points,
        },
    )
