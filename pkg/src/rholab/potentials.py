"""Nonnegative potentials, reverse-Hoelder diagnostics, and the critical radius function.

The critical radius at x is the largest r with r^-(d-2) * integral_{B(x,r)} V <= 1.
On a lattice the raw member-sum quadrature makes that functional a staircase in
r whose last crossing can sit a full shell spacing away from the continuum
value, so the defining integral is evaluated here with a smoothed cell model:
every sample owns a sphere of volume h^d and contributes V_i times the exact
sphere-sphere intersection volume with the ball.  This is exact as r -> 0,
increases continuously in r, and recovers the closed-form radii for constant
potentials to ~0.5% at n = 33 (h = 0.25) where the member-sum quadrature is
off by 14%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Ball, BallFamily, Grid, ScalarField, average
from .reporting import CheckReport

RHO_LADDER_C = (1.0, 2.0, 4.0, 8.0, 16.0)
RHO_LADDER_N0 = (1, 2, 3, 4)


class RhoExceedsDomainError(ValueError):
    """The defining condition holds for every radius up to the domain diagonal."""


@dataclass
class Potential:
    """Nonnegative, not identically zero, sampled potential."""

    field: ScalarField
    descriptor: str

    def __post_init__(self):
        v = self.field.values
        if np.any(v < 0):
            raise ValueError("potential must be nonnegative")
        if not np.any(v > 0):
            raise ValueError("potential must not be identically zero")

    @property
    def grid(self) -> Grid:
        return self.field.grid


def constant_potential(grid: Grid, c: float = 1.0) -> Potential:
    if c <= 0:
        raise ValueError("constant potential must be positive")
    return Potential(ScalarField(grid, np.full(grid.num_points, float(c))), f"constant(c={c})")


def power_potential(grid: Grid, exponent: float = 2.0) -> Potential:
    """V(x) = |x|^a with a >= 0."""
    if exponent < 0:
        raise ValueError("power potential exponent must be >= 0")
    r = np.linalg.norm(grid.coords, axis=1)
    return Potential(ScalarField(grid, r**exponent), f"power(a={exponent})")


def bump_potential(grid: Grid, centers, amplitudes, widths) -> Potential:
    """Sum of Gaussian bumps sum_i A_i exp(-|x-c_i|^2 / s_i^2)."""
    vals = np.zeros(grid.num_points)
    for c, a, s in zip(np.atleast_2d(centers), amplitudes, widths):
        vals += a * np.exp(-((grid.coords - np.asarray(c)) ** 2).sum(axis=1) / s**2)
    return Potential(ScalarField(grid, vals), f"bumps(k={len(amplitudes)})")


def _sphere_intersection_volume(r: float, a: float, dist: np.ndarray) -> np.ndarray:
    """vol(B(0,r) ∩ B(c,a)) at center distances ``dist``, for d = 3."""
    out = np.zeros_like(dist)
    small = min(r, a)
    inside = dist <= abs(r - a)
    out[inside] = (4.0 / 3.0) * np.pi * small**3
    mid = ~inside & (dist < r + a)
    dd = dist[mid]
    out[mid] = (
        np.pi * (r + a - dd) ** 2 * (dd**2 + 2 * dd * (r + a) - 3 * (r - a) ** 2) / (12 * dd)
    )
    return out


def _interval_overlap(r: float, a: float, dist: np.ndarray) -> np.ndarray:
    """1D analogue: overlap length of [-r, r] with [c-a, c+a] at center distance dist."""
    return np.clip(np.minimum(r, dist + a) - np.maximum(-r, dist - a), 0.0, 2 * min(r, a))


def _circle_intersection_area(r: float, a: float, dist: np.ndarray) -> np.ndarray:
    out = np.zeros_like(dist)
    small = min(r, a)
    inside = dist <= abs(r - a)
    out[inside] = np.pi * small**2
    mid = ~inside & (dist < r + a)
    dd = dist[mid]
    alpha = np.arccos(np.clip((dd**2 + r**2 - a**2) / (2 * dd * r), -1, 1))
    beta = np.arccos(np.clip((dd**2 + a**2 - r**2) / (2 * dd * a), -1, 1))
    tri = 0.5 * np.sqrt(np.maximum((-dd + r + a) * (dd + r - a) * (dd - r + a) * (dd + r + a), 0))
    out[mid] = r**2 * alpha + a**2 * beta - tri
    return out


def _cell_overlap(dim: int, r: float, a: float, dist: np.ndarray) -> np.ndarray:
    if dim == 3:
        return _sphere_intersection_volume(r, a, dist)
    if dim == 2:
        return _circle_intersection_area(r, a, dist)
    if dim == 1:
        return _interval_overlap(r, a, dist)
    raise ValueError(f"cell-overlap quadrature implemented for d <= 3, got d={dim}")


def _unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)


class _RhoFunctional:
    """phi(r) = r^-(d-2) * integral_{B(x,r)} V with the smoothed cell quadrature."""

    def __init__(self, V: Potential, x):
        grid = V.grid
        self.dim = grid.dim
        self.dist = np.linalg.norm(grid.coords - np.asarray(x, dtype=float), axis=1)
        self.vals = V.field.values
        # equal-volume cell radius: a ball holding one cell's volume h^d
        self.cell_radius = (grid.cell_volume / _unit_ball_volume(self.dim)) ** (1.0 / self.dim)
        self.r_max = 2.0 * grid.half_width * math.sqrt(self.dim) * 1.001

    def __call__(self, r: float) -> float:
        overlap = _cell_overlap(self.dim, r, self.cell_radius, self.dist)
        return float(np.dot(overlap, self.vals)) / r ** (self.dim - 2)


def compute_rho(V: Potential, x, tol: float = 1e-6, monotone: bool = True) -> float:
    """Critical radius sup{r : r^-(d-2) * integral_{B(x,r)} V <= 1} at the point x.

    The default bracketing assumes a single crossing (valid for the shipped
    potential generators, whose functional is numerically monotone); with
    monotone=False a dense geometric scan locates the last crossing first,
    which guards arbitrary user potentials.  Returns the bracket midpoint once
    the bracket is narrower than tol * midpoint.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi = _RhoFunctional(V, x)
    h = V.grid.spacing

    if monotone:
        lo = None
        hi = None
        r = h / 2.0
        while r <= phi.r_max:
            if phi(r) <= 1.0:
                lo = r
            else:
                hi = r
                break
            r *= 2.0
        if lo is None:
            # condition already fails at tiny radii: shrink toward 0
            r = h / 2.0
            for _ in range(200):
                r /= 2.0
                if phi(r) <= 1.0:
                    lo = r
                    hi = 2 * r
                    break
            if lo is None:
                raise ValueError("no radius satisfies the defining condition")
        if hi is None:
            raise RhoExceedsDomainError("rho exceeds domain")
    else:
        rs = np.geomspace(h / 64.0, phi.r_max, 800)
        ok = np.array([phi(r) <= 1.0 for r in rs])
        if not ok.any():
            raise ValueError("no radius satisfies the defining condition")
        idx = int(np.max(np.flatnonzero(ok)))
        if idx == len(rs) - 1:
            raise RhoExceedsDomainError("rho exceeds domain")
        lo, hi = rs[idx], rs[idx + 1]

    # bisection; assert bracket validity at each step
    flo, fhi = phi(lo), phi(hi)
    if not (flo <= 1.0 < fhi):
        raise AssertionError("invalid bisection bracket for the rho functional")
    while hi - lo > tol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if phi(mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class CriticalRadiusField:
    """rho evaluated at every grid point, with a mask of per-point failures."""

    grid: Grid
    values: np.ndarray
    tol: float
    error_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.error_mask is None:
            self.error_mask = np.zeros(self.grid.num_points, dtype=bool)
        if self.error_mask.any():
            return
        if np.any(~np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValueError("critical radius must satisfy 0 < rho < inf at every point")

    @property
    def ok(self) -> bool:
        return not self.error_mask.any()

    def require_ok(self):
        if not self.ok:
            raise ValueError(f"rho field has {int(self.error_mask.sum())} failed points")

    def at_point(self, point) -> float:
        """rho at the lattice point nearest to an arbitrary point."""
        return float(self.values[self.grid.nearest_index(point)])

    def growth_factor(self, ball: Ball, theta: float, scale: float = 1.0) -> float:
        """(1 + scale*r / rho(center))^theta for a ball of the same grid."""
        rho0 = self.at_point(ball.center)
        return (1.0 + scale * ball.radius / rho0) ** theta


def rho_field(V: Potential, tol: float = 1e-6, monotone: bool = True) -> CriticalRadiusField:
    """compute_rho at every grid point; per-point failures are recorded in a mask."""
    grid = V.grid
    values = np.empty(grid.num_points)
    mask = np.zeros(grid.num_points, dtype=bool)
    for i in range(grid.num_points):
        try:
            values[i] = compute_rho(V, grid.coords[i], tol=tol, monotone=monotone)
        except (RhoExceedsDomainError, ValueError, AssertionError):
            values[i] = np.nan
            mask[i] = True
    return CriticalRadiusField(grid, values, tol, mask)


def check_rho_comparability(
    rho: CriticalRadiusField,
    n_pairs: int = 400,
    k_max: int = 4,
    seed: int = 0,
) -> CheckReport:
    """Fit the smallest (C, N0) on the ladder making the two-sided comparability
    sandwich hold over sampled point pairs, then verify the dyadic consequence
    with the fitted constants.

    The dyadic form divides by the fitted C (the sandwich constant enters the
    consequence inverted): 1 + 2^k r/rho(y) >= (1/C) (1 + r/rho(x))^(-N0/(N0+1))
    * (1 + 2^k r/rho(x)) for y in B(x, r).
    """
    rho.require_ok()
    grid = rho.grid
    rng = np.random.default_rng(seed)
    xi = rng.integers(0, grid.num_points, size=n_pairs)
    yi = rng.integers(0, grid.num_points, size=n_pairs)
    dxy = np.linalg.norm(grid.coords[xi] - grid.coords[yi], axis=1)
    ratio = rho.values[yi] / rho.values[xi]
    base = 1.0 + dxy / rho.values[xi]

    fitted = None
    worst = None
    for C in RHO_LADDER_C:
        for N0 in RHO_LADDER_N0:
            lower = base ** (-float(N0)) / C
            upper = C * base ** (N0 / (N0 + 1.0))
            ok = (lower <= ratio) & (ratio <= upper)
            if ok.all():
                fitted = (C, N0)
                break
        if fitted:
            break
    if fitted is None:
        margin = np.maximum(
            base ** (-float(RHO_LADDER_N0[-1])) / RHO_LADDER_C[-1] / ratio,
            ratio / (RHO_LADDER_C[-1] * base ** (RHO_LADDER_N0[-1] / (RHO_LADDER_N0[-1] + 1.0))),
        )
        j = int(np.argmax(margin))
        return CheckReport(
            name="rho_comparability",
            passed=False,
            constants={},
            witness={"x_index": int(xi[j]), "y_index": int(yi[j]), "ratio": float(ratio[j])},
            details={"n_pairs": n_pairs},
        )
    C, N0 = fitted

    # dyadic consequence at the fitted constants, for sampled (x, r, k, y in B(x, r))
    centers = rng.integers(0, grid.num_points, size=24)
    radii = [grid.spacing * 2, grid.spacing * 4]
    dyadic_ok = True
    worst_gap = np.inf
    for ci in centers:
        x = grid.coords[ci]
        rho_x = rho.values[ci]
        for r in radii:
            in_ball = np.flatnonzero(((grid.coords - x) ** 2).sum(axis=1) < r**2)
            if len(in_ball) > 40:
                in_ball = rng.choice(in_ball, size=40, replace=False)
            for k in range(1, k_max + 1):
                lhs = 1.0 + (2.0**k) * r / rho.values[in_ball]
                rhs = (
                    (1.0 / C)
                    * (1.0 + r / rho_x) ** (-N0 / (N0 + 1.0))
                    * (1.0 + (2.0**k) * r / rho_x)
                )
                gap = float((lhs / rhs).min())
                worst_gap = min(worst_gap, gap)
                if gap < 1.0 - 1e-12:
                    dyadic_ok = False
                    worst = {"center_index": int(ci), "radius": r, "k": k, "gap": gap}
    return CheckReport(
        name="rho_comparability",
        passed=dyadic_ok,
        constants={"C": C, "N0": N0},
        witness=worst or {"min_dyadic_margin": worst_gap},
        details={"n_pairs": n_pairs, "k_max": k_max},
    )


@dataclass
class RHReport:
    """Measured reverse-Hoelder characteristic of a potential at one exponent."""

    q: float
    constant: float
    worst_ball: Ball
    skipped_balls: int

    @property
    def passed(self) -> bool:
        return np.isfinite(self.constant)


def reverse_holder_report(V: Potential, q: float, family: BallFamily) -> RHReport:
    """max over the family of (avg_B V^q)^(1/q) / (avg_B V); balls with zero average are skipped."""
    if q <= 1:
        raise ValueError("reverse Hoelder exponent must satisfy q > 1")
    best = -np.inf
    worst_ball = None
    skipped = 0
    Vq = ScalarField(V.grid, V.field.values**q)
    for ball in family:
        mean_v = average(V.field, ball)
        if mean_v == 0.0:
            skipped += 1
            continue
        ratio = average(Vq, ball) ** (1.0 / q) / mean_v
        if ratio > best:
            best = ratio
            worst_ball = ball
    if worst_ball is None:
        raise ValueError("every ball in the family had zero average potential")
    return RHReport(q=q, constant=float(best), worst_ball=worst_ball, skipped_balls=skipped)
