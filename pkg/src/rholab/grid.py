"""Truncated uniform lattices, balls, and quadrature over the induced finite measure space.

The grid is the common discrete universe for every other module: a uniform
lattice on the box [-L, L]^d with n points per axis.  A point's flat index
encodes its per-axis indices as ``index = sum_k i_k * n**k`` (axis 0 varies
fastest), which is also the on-disk ordering of serialized fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class GridMismatchError(ValueError):
    """Raised when two objects built on different grids are combined."""


class NotAWeightError(ValueError):
    """Raised when a field with negative samples is used as a weight."""


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [-half_width, half_width]^dim with points_per_axis points per axis."""

    dim: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if self.half_width <= 0:
            raise ValueError(f"half_width must be > 0, got {self.half_width}")
        if self.points_per_axis < 2:
            raise ValueError(f"points_per_axis must be >= 2, got {self.points_per_axis}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points_per_axis - 1)

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def num_points(self) -> int:
        return self.points_per_axis**self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points_per_axis)

    @cached_property
    def coords(self) -> np.ndarray:
        """(num_points, dim) array of point coordinates in flat-index order."""
        idx = np.arange(self.num_points)
        out = np.empty((self.num_points, self.dim))
        for k in range(self.dim):
            out[:, k] = self.axis[(idx // self.points_per_axis**k) % self.points_per_axis]
        return out

    def axis_indices(self, flat: np.ndarray) -> np.ndarray:
        """Per-axis lattice indices for flat point indices; shape (..., dim)."""
        flat = np.asarray(flat)
        n = self.points_per_axis
        return np.stack([(flat // n**k) % n for k in range(self.dim)], axis=-1)

    def flat_index(self, axis_idx) -> int:
        n = self.points_per_axis
        return int(sum(int(i) * n**k for k, i in enumerate(axis_idx)))

    def nearest_index(self, point) -> int:
        """Flat index of the lattice point nearest to an arbitrary point."""
        point = np.asarray(point, dtype=float)
        i = np.rint((point + self.half_width) / self.spacing).astype(int)
        i = np.clip(i, 0, self.points_per_axis - 1)
        return self.flat_index(i)

    def descriptor(self) -> str:
        """Plain key-value text form (d, L, n), newline separated."""
        return f"d={self.dim}\nL={self.half_width!r}\nn={self.points_per_axis}\n"


def grid_from_descriptor(text: str) -> Grid:
    kv = {}
    for line in text.strip().splitlines():
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    return Grid(dim=int(kv["d"]), half_width=float(kv["L"]), points_per_axis=int(kv["n"]))


@dataclass
class ScalarField:
    """Samples of a function on a Grid, stored in flat-index order."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.num_points,):
            raise ValueError(
                f"field length {self.values.shape} does not match grid size {self.grid.num_points}"
            )

    def require_weight(self):
        if np.any(self.values < 0):
            raise NotAWeightError("not a weight: negative samples present")

    def save(self, stream_or_path):
        """Raw float64 binary in flat-index order, preceded by the grid descriptor."""
        if isinstance(stream_or_path, (str, bytes)) or hasattr(stream_or_path, "__fspath__"):
            with open(stream_or_path, "wb") as fh:
                self.save(fh)
            return
        header = self.grid.descriptor().encode() + b"--\n"
        stream_or_path.write(header)
        stream_or_path.write(self.values.astype("<f8").tobytes())


def load_field(stream_or_path) -> ScalarField:
    if isinstance(stream_or_path, (str, bytes)) or hasattr(stream_or_path, "__fspath__"):
        with open(stream_or_path, "rb") as fh:
            return load_field(fh)
    raw = stream_or_path.read()
    head, _, body = raw.partition(b"--\n")
    grid = grid_from_descriptor(head.decode())
    values = np.frombuffer(body, dtype="<f8").copy()
    return ScalarField(grid, values)


def constant_field(grid: Grid, c: float) -> ScalarField:
    return ScalarField(grid, np.full(grid.num_points, float(c)))


@dataclass(eq=False)
class Ball:
    """Open ball: grid points with |x - center| < radius (strict, so ties are excluded)."""

    grid: Grid
    center: np.ndarray
    radius: float
    member_indices: np.ndarray = field(default=None)  # computed when omitted
    boundary: bool = False  # True when the doubled ball leaves the box

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"ball radius must be > 0, got {self.radius}")
        self.center = np.asarray(self.center, dtype=float)
        if self.member_indices is None:
            d2 = ((self.grid.coords - self.center) ** 2).sum(axis=1)
            self.member_indices = np.flatnonzero(d2 < self.radius**2)
        self.member_indices = np.asarray(self.member_indices, dtype=np.intp)

    @property
    def member_count(self) -> int:
        return len(self.member_indices)

    @property
    def discrete_volume(self) -> float:
        return self.member_count * self.grid.cell_volume

    def double_inside_box(self) -> bool:
        """Whether the 2-dilate stays inside [-L, L]^d."""
        L = self.grid.half_width
        return bool(np.all(np.abs(self.center) + 2 * self.radius <= L + 1e-12))


def make_ball(grid: Grid, center, radius: float) -> Ball:
    return Ball(grid, np.asarray(center, dtype=float), float(radius))


def integrate(f: ScalarField, ball: Ball) -> float:
    """Quadrature of f over the ball: cell_volume * sum of member samples."""
    if f.grid != ball.grid:
        raise GridMismatchError("grid mismatch between field and ball")
    return float(f.values[ball.member_indices].sum()) * f.grid.cell_volume


def average(f: ScalarField, ball: Ball) -> float:
    """Plain ball average; 0 on a memberless ball is not allowed (balls keep their center)."""
    if f.grid != ball.grid:
        raise GridMismatchError("grid mismatch between field and ball")
    if ball.member_count == 0:
        raise ValueError("ball has no grid members")
    return float(f.values[ball.member_indices].mean())


def measure(w: ScalarField, ball: Ball) -> float:
    """Weighted measure w(B) = integral of w over B; w must be nonnegative."""
    w.require_weight()
    return integrate(w, ball)


def dilate(ball: Ball, t: float) -> Ball:
    """t-dilate: same center, radius t*r, membership recomputed on the same grid."""
    if t <= 0:
        raise ValueError(f"dilation factor must be > 0, got {t}")
    return Ball(ball.grid, ball.center, t * ball.radius, boundary=ball.boundary)


@dataclass(frozen=True)
class FamilyPolicy:
    """Deterministic ball-family generator: lattice-center stride and a radius ladder."""

    center_stride: int
    radii: tuple
    include_boundary: bool = False

    def __post_init__(self):
        if self.center_stride < 1:
            raise ValueError("center stride must be >= 1")
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.radii) == 0:
            raise ValueError("radius ladder must not be empty")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radius ladder must be strictly increasing")


@dataclass
class BallFamily:
    """Finite surrogate for the supremum over all balls."""

    grid: Grid
    policy: FamilyPolicy
    balls: list

    def __len__(self):
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)


def geometric_ladder(r_min: float, count: int, factor: float = 2.0) -> tuple:
    return tuple(r_min * factor**k for k in range(count))


def generate_ball_family(grid: Grid, policy: FamilyPolicy) -> BallFamily:
    """All balls with centers on the stride sublattice and radii on the ladder.

    Balls whose 2-dilate leaves the box are dropped unless the policy includes
    boundary balls, in which case they are kept and flagged.
    """
    n = grid.points_per_axis
    # center the stride sublattice so stride = n yields the middle point alone
    offset = ((n - 1) % policy.center_stride) // 2
    axis_positions = grid.axis[offset :: policy.center_stride]
    mesh = np.meshgrid(*([axis_positions] * grid.dim), indexing="ij")
    centers = np.stack(mesh, axis=-1).reshape(-1, grid.dim)
    balls = []
    for center in centers:
        for r in policy.radii:
            ball = Ball(grid, center, r)
            if ball.double_inside_box():
                balls.append(ball)
            elif policy.include_boundary:
                ball.boundary = True
                balls.append(ball)
    return BallFamily(grid, policy, balls)
