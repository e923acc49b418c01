"""Critical-radius-localized Muckenhoupt classes, the localized maximal operator,
weighted Lebesgue norms, and the structural weight lemmas (reverse Hoelder,
measure comparison, doubling) as minimal-ladder fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Ball, BallFamily, Grid, ScalarField, dilate, integrate
from .potentials import CriticalRadiusField
from .reporting import (
    CheckReport,
    CONSTANT_LADDER,
    EPSILON_LADDER,
    ETA_LADDER,
    SMALL_CONSTANT_LADDER,
)


@dataclass
class Weight:
    """Strictly positive weight samples (so w^(-p'/p) is finite grid-wide)."""

    field: ScalarField
    descriptor: str

    def __post_init__(self):
        if np.any(self.field.values <= 0):
            raise ValueError("weight samples must be strictly positive")

    @property
    def grid(self) -> Grid:
        return self.field.grid


def constant_weight(grid: Grid, c: float = 1.0) -> Weight:
    if c <= 0:
        raise ValueError("constant weight must be positive")
    return Weight(ScalarField(grid, np.full(grid.num_points, float(c))), f"constant(c={c})")


def power_weight(grid: Grid, alpha: float) -> Weight:
    """w(x) = |x + h/3 * (1,..,1)|^alpha; the offset keeps every sample off the
    singularity without materially moving the measured characteristics."""
    shift = grid.spacing / 3.0
    r = np.linalg.norm(grid.coords + shift, axis=1)
    return Weight(ScalarField(grid, r**alpha), f"power(alpha={alpha})")


def rho_modulated_weight(rho: CriticalRadiusField, gamma: float) -> Weight:
    """w(x) = (1 + |x|/rho(x))^gamma, a candidate living outside the classical class."""
    rho.require_ok()
    r = np.linalg.norm(rho.grid.coords, axis=1)
    vals = (1.0 + r / rho.values) ** gamma
    return Weight(ScalarField(rho.grid, vals), f"rho_modulated(gamma={gamma})")


@dataclass
class ApCharacteristic:
    """Measured localized Muckenhoupt characteristic over a ball family."""

    p: float
    theta: float
    value: float
    argmax_ball: Ball
    skipped_balls: int = 0


def _ball_product(wv: np.ndarray, p: float) -> float:
    """(avg w)^(1/p) (avg w^(-p'/p))^(1/p') for p > 1; avg w / min w at p = 1."""
    if p == 1.0:
        return float(wv.mean() / wv.min())
    pprime = p / (p - 1.0)
    return float(wv.mean() ** (1.0 / p) * (wv ** (-pprime / p)).mean() ** (1.0 / pprime))


def ap_characteristic(
    w: Weight,
    p: float,
    theta: float,
    rho: CriticalRadiusField,
    family: BallFamily,
) -> ApCharacteristic:
    """Max over the family of the localized A_p product damped by (1+r/rho(x0))^-theta."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if theta < 0:
        raise ValueError("theta must be >= 0")
    best = -np.inf
    arg = None
    skipped = 0
    for ball in family:
        if ball.member_count == 0:
            skipped += 1
            continue
        wv = w.field.values[ball.member_indices]
        val = _ball_product(wv, p) * rho.growth_factor(ball, -theta)
        if val > best:
            best = val
            arg = ball
    if arg is None:
        raise ValueError("ball family is empty")
    return ApCharacteristic(p=p, theta=theta, value=float(best), argmax_ball=arg, skipped_balls=skipped)


def _ball_offsets(grid: Grid, radius: float) -> np.ndarray:
    """Lattice offset vectors (in index units) with |offset| < radius."""
    reach = int(np.floor(radius / grid.spacing + 1))
    rng = np.arange(-reach, reach + 1)
    mesh = np.meshgrid(*([rng] * grid.dim), indexing="ij")
    offs = np.stack(mesh, axis=-1).reshape(-1, grid.dim)
    d2 = (offs.astype(float) ** 2).sum(axis=1) * grid.spacing**2
    return offs[d2 < radius**2]


def _shifted_sums(grid: Grid, values: np.ndarray, radius: float):
    """Ball sums and member counts at every grid point via offset accumulation.

    Balls are truncated at the box; counts reflect the surviving members.
    """
    n = grid.points_per_axis
    shape = (n,) * grid.dim
    cube = values.reshape(shape, order="F")
    acc = np.zeros(shape)
    cnt = np.zeros(shape)
    ones = np.ones(shape)
    for off in _ball_offsets(grid, radius):
        src = []
        dst = []
        for o in off:
            o = int(o)
            if o >= 0:
                src.append(slice(o, n))
                dst.append(slice(0, n - o))
            else:
                src.append(slice(0, n + o))
                dst.append(slice(-o, n))
        acc[tuple(dst)] += cube[tuple(src)]
        cnt[tuple(dst)] += ones[tuple(src)]
    return acc.reshape(-1, order="F"), cnt.reshape(-1, order="F")


def maximal_rho_theta(
    f: ScalarField,
    theta: float,
    rho: CriticalRadiusField,
    radii,
    stride: int = 1,
) -> ScalarField:
    """Localized maximal function: at each evaluation point the max over the
    radius ladder of (1+r/rho(x))^-theta times the ball average of |f|.

    Evaluation points are the full grid (stride 1) or a sublattice; skipped
    points carry NaN.
    """
    grid = f.grid
    rho.require_ok()
    out = np.full(grid.num_points, -np.inf)
    for r in radii:
        sums, counts = _shifted_sums(grid, np.abs(f.values), float(r))
        avg = sums / np.maximum(counts, 1)
        damp = (1.0 + float(r) / rho.values) ** (-theta)
        out = np.maximum(out, damp * avg)
    if stride > 1:
        idx = grid.axis_indices(np.arange(grid.num_points))
        keep = np.all(idx % stride == 0, axis=1)
        out = np.where(keep, out, np.nan)
    return ScalarField(grid, out)


def weighted_lp_norm(f: ScalarField, w: ScalarField, p: float) -> float:
    """(sum |f|^p w * cell_volume)^(1/p) over the whole grid."""
    if p < 1:
        raise ValueError("p must be >= 1")
    w.require_weight()
    return float(np.dot(np.abs(f.values) ** p, w.values) * f.grid.cell_volume) ** (1.0 / p)


def weak_l1_quasinorm(f: ScalarField, w: ScalarField) -> float:
    """sup_lambda lambda * w({|f| > lambda}), computed exactly on the finite
    measure space by sorting |f| and maximizing value * cumulative mass."""
    w.require_weight()
    return _weak_value(np.abs(f.values), w.values * f.grid.cell_volume)


def _weak_value(absvals: np.ndarray, masses: np.ndarray) -> float:
    order = np.argsort(absvals)[::-1]
    v = absvals[order]
    cum = np.cumsum(masses[order])
    return float(np.max(v * cum)) if len(v) else 0.0


def reverse_holder_weight_fit(
    w: Weight,
    family: BallFamily,
    rho: CriticalRadiusField,
) -> CheckReport:
    """Smallest (epsilon, eta, C) on the ladders with
    (avg_B w^(1+eps))^(1/(1+eps)) <= C (avg_B w)(1+r/rho(x0))^eta on every ball."""
    balls = list(family)
    means = np.array([w.field.values[b.member_indices].mean() for b in balls])
    for eps in EPSILON_LADDER:
        lhs = np.array(
            [
                (w.field.values[b.member_indices] ** (1.0 + eps)).mean() ** (1.0 / (1.0 + eps))
                for b in balls
            ]
        )
        for eta in ETA_LADDER:
            growth = np.array([rho.growth_factor(b, eta) for b in balls])
            need = lhs / (means * growth)
            worst = float(need.max())
            for C in SMALL_CONSTANT_LADDER:
                if worst <= C * (1 + 1e-12):
                    return CheckReport(
                        name="reverse_holder_weight",
                        passed=True,
                        constants={"epsilon": eps, "eta": eta, "C": C, "measured": worst},
                        details={"weight": w.descriptor, "balls": len(balls)},
                    )
    j = int(need.argmax())
    return CheckReport(
        name="reverse_holder_weight",
        passed=False,
        constants={"measured": worst},
        witness={"ball": balls[j]},
        details={"weight": w.descriptor, "balls": len(balls)},
    )


@dataclass
class MeasureComparisonFit:
    delta: float
    eta: float
    constant: float
    passed: bool
    witness: dict
    samples: int

    def report(self) -> CheckReport:
        return CheckReport(
            name="measure_comparison",
            passed=self.passed,
            constants={"delta": self.delta, "eta": self.eta, "C": self.constant},
            witness=self.witness,
            details={"samples": self.samples},
        )


def _subset_masks(ball: Ball, grid: Grid, rng, kinds=("random", "half", "shell")) -> list:
    """Subsets E of a ball: random member masks, half-balls, and shells."""
    members = ball.member_indices
    out = []
    if "random" in kinds:
        for frac in (0.1, 0.5):
            k = max(1, int(frac * len(members)))
            out.append(rng.choice(members, size=k, replace=False))
    if "half" in kinds:
        axis = rng.integers(0, grid.dim)
        half = members[grid.coords[members, axis] >= ball.center[axis]]
        if len(half):
            out.append(half)
    if "shell" in kinds:
        d = np.linalg.norm(grid.coords[members] - ball.center, axis=1)
        shell = members[d >= ball.radius / 2.0]
        if len(shell):
            out.append(shell)
    out.append(members)  # E = B equality case
    return out


DELTA_LADDER = tuple(e / (1.0 + e) for e in EPSILON_LADDER)  # induced from the epsilon ladder


def measure_comparison_check(
    w: Weight,
    family: BallFamily,
    rho: CriticalRadiusField,
    seed: int = 0,
    delta_ladder=DELTA_LADDER,
) -> MeasureComparisonFit:
    """Fit (delta, eta, C) with w(E)/w(B) <= C (|E|/|B|)^delta (1+r/rho(x0))^eta
    over generated subsets E of every family ball."""
    rng = np.random.default_rng(seed)
    grid = family.grid
    rows = []  # (w_ratio, size_ratio, growth at eta=1 base)
    for ball in family:
        wv = w.field.values
        wB = wv[ball.member_indices].sum()
        base = 1.0 + ball.radius / rho.at_point(ball.center)
        for E in _subset_masks(ball, grid, rng):
            rows.append((wv[E].sum() / wB, len(E) / ball.member_count, base, ball))
    for delta in delta_ladder:
        for eta in ETA_LADDER:
            need = np.array([wr / (sr**delta * b**eta) for wr, sr, b, _ in rows])
            worst = float(need.max())
            for C in SMALL_CONSTANT_LADDER:
                if worst <= C * (1 + 1e-12):
                    return MeasureComparisonFit(
                        delta=delta,
                        eta=eta,
                        constant=C,
                        passed=True,
                        witness={"measured": worst},
                        samples=len(rows),
                    )
    j = int(need.argmax())
    return MeasureComparisonFit(
        delta=delta_ladder[0],
        eta=ETA_LADDER[-1],
        constant=SMALL_CONSTANT_LADDER[-1],
        passed=False,
        witness={"ball": rows[j][3], "w_ratio": rows[j][0], "size_ratio": rows[j][1]},
        samples=len(rows),
    )


def doubling_check(
    w: Weight,
    p: float,
    theta_prime: float,
    rho: CriticalRadiusField,
    family: BallFamily,
) -> CheckReport:
    """w(2B) <= C (1 + 2r/rho(x0))^(p*theta') w(B) over the family, with minimal
    ladder C; only balls whose double stays in the box participate."""
    exponent = p * theta_prime if p > 1 else theta_prime
    rows = []
    for ball in family:
        if not ball.double_inside_box():
            continue
        big = dilate(ball, 2.0)
        wB = integrate(w.field, ball)
        w2B = integrate(w.field, big)
        growth = (1.0 + 2.0 * ball.radius / rho.at_point(ball.center)) ** exponent
        rows.append((w2B / (wB * growth), ball))
    if not rows:
        raise ValueError("no family ball keeps its double inside the box")
    worst = max(r for r, _ in rows)
    ball = next(b for r, b in rows if r == worst)
    fitted = next((C for C in CONSTANT_LADDER if worst <= C * (1 + 1e-12)), None)
    return CheckReport(
        name="doubling",
        passed=fitted is not None,
        constants={"C": fitted, "measured": worst, "p": p, "theta_prime": theta_prime},
        witness={"ball": ball} if fitted is None else {},
        details={"balls": len(rows), "weight": w.descriptor},
    )
