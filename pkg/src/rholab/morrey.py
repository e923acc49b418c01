"""The three weighted Morrey-type norms over a declared ball family: strong,
weak (p = 1), and L log L flavors.  Each result carries its per-ball breakdown
and the argmax ball so boundedness experiments can show where the supremum
lives; the finite family is a lower surrogate of the all-balls supremum and is
part of the result's provenance."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .grid import Ball, BallFamily, ScalarField
from .orlicz import PHI, weighted_luxemburg_norm
from .potentials import CriticalRadiusField
from .weights import Weight, _weak_value


@dataclass(frozen=True)
class MorreyParams:
    p: float = 1.0
    kappa: float = 0.0
    theta: float = 0.0
    flavor: str = "strong"

    def __post_init__(self):
        if not (0.0 <= self.kappa < 1.0):
            raise ValueError("kappa must lie in [0, 1)")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.flavor not in ("strong", "weak", "llogl"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor in ("weak", "llogl") and self.p != 1.0:
            raise ValueError(f"flavor {self.flavor!r} requires p = 1")
        if self.p < 1:
            raise ValueError("p must be >= 1")


@dataclass
class BallEntry:
    ball: Ball
    local_value: float
    damping: float

    @property
    def entry(self) -> float:
        return self.local_value * self.damping


@dataclass
class MorreyNormResult:
    params: MorreyParams
    value: float
    argmax_ball: Ball
    per_ball: list = field(default_factory=list)


def _finish(params, entries) -> MorreyNormResult:
    if not entries:
        raise ValueError("ball family is empty")
    values = [e.entry for e in entries]
    j = int(np.argmax(values))
    return MorreyNormResult(params=params, value=float(values[j]), argmax_ball=entries[j].ball, per_ball=entries)


def morrey_norm(
    f: ScalarField,
    w: Weight,
    params: MorreyParams,
    rho: CriticalRadiusField,
    family: BallFamily,
) -> MorreyNormResult:
    """Strong flavor: max over balls of (1+r/rho)^-theta (w(B)^-kappa int_B |f|^p w)^(1/p)."""
    if params.flavor != "strong":
        raise ValueError("morrey_norm computes the strong flavor")
    cell = f.grid.cell_volume
    entries = []
    for ball in family:
        wv = w.field.values[ball.member_indices]
        fv = np.abs(f.values[ball.member_indices])
        wB = float(wv.sum() * cell)
        local = (float(np.dot(fv**params.p, wv) * cell) / wB**params.kappa) ** (1.0 / params.p)
        entries.append(BallEntry(ball, local, rho.growth_factor(ball, -params.theta)))
    return _finish(params, entries)


def weak_morrey_norm(
    f: ScalarField,
    w: Weight,
    params: MorreyParams,
    rho: CriticalRadiusField,
    family: BallFamily,
) -> MorreyNormResult:
    """Weak flavor (p = 1): the per-ball exact sup_lambda lambda * w({|f| > lambda} ∩ B),
    scaled by w(B)^-kappa and the growth damping."""
    if params.flavor != "weak":
        raise ValueError("weak_morrey_norm computes the weak flavor")
    cell = f.grid.cell_volume
    entries = []
    for ball in family:
        wv = w.field.values[ball.member_indices]
        fv = np.abs(f.values[ball.member_indices])
        wB = float(wv.sum() * cell)
        local = _weak_value(fv, wv * cell) / wB**params.kappa
        entries.append(BallEntry(ball, local, rho.growth_factor(ball, -params.theta)))
    return _finish(params, entries)


def lloglog_morrey_norm(
    f: ScalarField,
    w: Weight,
    params: MorreyParams,
    rho: CriticalRadiusField,
    family: BallFamily,
) -> MorreyNormResult:
    """L log L flavor: max over balls of (1+r/rho)^-theta w(B)^(1-kappa) ||f||_{LlogL(w),B}."""
    if params.flavor != "llogl":
        raise ValueError("lloglog_morrey_norm computes the llogl flavor")
    cell = f.grid.cell_volume
    entries = []
    for ball in family:
        wv = w.field.values[ball.member_indices]
        wB = float(wv.sum() * cell)
        lux = weighted_luxemburg_norm(f, ball, PHI, w.field)
        entries.append(
            BallEntry(ball, wB ** (1.0 - params.kappa) * lux, rho.growth_factor(ball, -params.theta))
        )
    return _finish(params, entries)


def compute_norm(f, w, params, rho, family) -> MorreyNormResult:
    fns = {"strong": morrey_norm, "weak": weak_morrey_norm, "llogl": lloglog_morrey_norm}
    return fns[params.flavor](f, w, params, rho, family)


def export_breakdown_csv(result: MorreyNormResult, path):
    """Per-ball breakdown: center, radius, local value, damping factor, entry."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["center", "radius", "local_value", "damping", "entry"])
        for e in result.per_ball:
            writer.writerow(
                [
                    " ".join(f"{c:.9g}" for c in e.ball.center),
                    f"{e.ball.radius:.9g}",
                    f"{e.local_value:.12g}",
                    f"{e.damping:.12g}",
                    f"{e.entry:.12g}",
                ]
            )
