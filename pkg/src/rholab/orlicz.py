"""Young functions, Luxemburg norms over balls, and the generalized Hoelder inequality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Ball, GridMismatchError, ScalarField
from .reporting import CheckReport, SMALL_CONSTANT_LADDER

LUXEMBURG_TOL = 1e-8
LAMBDA_MAX = 2.0**60


class LuxemburgBracketError(ValueError):
    """No feasible lambda below the hard cap 2^60."""


@dataclass(frozen=True)
class YoungFunction:
    """Named Young function: 'identity', 'llog' (t(1+log+ t)^m), or 'exp' (e^t - 1)."""

    name: str
    m: int = 1

    def __post_init__(self):
        if self.name not in ("identity", "llog", "exp"):
            raise ValueError(f"unknown Young function {self.name!r}")
        if self.name == "llog" and self.m < 1:
            raise ValueError("llog order m must be >= 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "identity":
            return t
        if self.name == "llog":
            return t * (1.0 + np.log(np.maximum(t, 1.0))) ** self.m
        return np.expm1(t)

    @property
    def label(self) -> str:
        if self.name == "llog":
            return f"t(1+log+t)^{self.m}" if self.m > 1 else "t(1+log+t)"
        return {"identity": "t", "exp": "exp(t)-1"}[self.name]


IDENTITY = YoungFunction("identity")
PHI = YoungFunction("llog", 1)
EXP = YoungFunction("exp")


def phi_m(m: int) -> YoungFunction:
    return YoungFunction("llog", m)


def young_properties_ok(A: YoungFunction, samples=None) -> bool:
    """A(0) = 0, strictly increasing, and midpoint-convex on a sampled ladder."""
    if samples is None:
        samples = np.geomspace(1e-3, 30.0, 60)
    if float(A(0.0)) != 0.0:
        return False
    vals = A(samples)
    if np.any(np.diff(vals) <= 0):
        return False
    mid = A((samples[:-1] + samples[1:]) / 2.0)
    return bool(np.all(mid <= (vals[:-1] + vals[1:]) / 2.0 + 1e-12))


def _ball_values(f: ScalarField, ball: Ball) -> np.ndarray:
    if f.grid != ball.grid:
        raise GridMismatchError("grid mismatch between field and ball")
    return np.abs(f.values[ball.member_indices])


def _luxemburg(absvals: np.ndarray, masses: np.ndarray, A: YoungFunction) -> float:
    """Smallest lambda with sum(masses * A(absvals/lambda)) <= 1; masses sum to 1."""
    if not np.any(absvals > 0):
        return 0.0
    if A.name == "identity":
        # closed form: the (weighted) average itself
        return float(np.dot(masses, absvals))

    def G(lam):
        return float(np.dot(masses, A(absvals / lam)))

    hi = float(absvals.max())
    if hi == 0.0:
        return 0.0
    while G(hi) > 1.0:
        hi *= 2.0
        if hi > LAMBDA_MAX:
            raise LuxemburgBracketError("no feasible lambda below 2^60")
    lo = hi
    while G(lo) <= 1.0:
        lo /= 2.0
        if lo < 1e-300:
            # G <= 1 for arbitrarily small lambda can only happen for f = 0
            return 0.0
    while hi - lo > LUXEMBURG_TOL * hi:
        mid = 0.5 * (lo + hi)
        if G(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    # return the feasible end: average A(|f|/lambda) lands in [1 - tol_inner, 1]
    return hi


def luxemburg_norm(f: ScalarField, ball: Ball, A: YoungFunction) -> float:
    """Luxemburg norm of f over the ball with the plain ball average."""
    vals = _ball_values(f, ball)
    masses = np.full(len(vals), 1.0 / len(vals))
    return _luxemburg(vals, masses, A)


def weighted_luxemburg_norm(f: ScalarField, ball: Ball, A: YoungFunction, w: ScalarField) -> float:
    """Luxemburg norm with the w-average (1/w(B)) * integral_B A(|f|/lambda) w."""
    vals = _ball_values(f, ball)
    wv = w.values[ball.member_indices]
    w.require_weight()
    total = wv.sum()
    if total <= 0:
        raise ValueError("weight vanishes on the ball")
    return _luxemburg(vals, wv / total, A)


def holder_orlicz_check(
    f: ScalarField,
    g: ScalarField,
    ball: Ball,
    w: ScalarField | None = None,
) -> CheckReport:
    """avg_B |fg| <= 2 ||f||_{LlogL,B} ||g||_{expL,B}, and the weighted form with
    the minimal ladder constant when a weight is supplied."""
    fv = _ball_values(f, ball)
    gv = _ball_values(g, ball)
    if w is None:
        lhs = float((fv * gv).mean())
        nf = luxemburg_norm(f, ball, PHI)
        ng = luxemburg_norm(g, ball, EXP)
        rhs = 2.0 * nf * ng
        passed = lhs <= rhs * (1 + 1e-12) or lhs == 0.0
        return CheckReport(
            name="holder_orlicz",
            passed=passed,
            constants={"C": 2.0, "lhs": lhs, "llog_norm": nf, "exp_norm": ng},
            witness={} if passed else {"lhs": lhs, "rhs": rhs},
            details={"weighted": False},
        )
    wv = w.values[ball.member_indices]
    total = wv.sum()
    lhs = float(np.dot(fv * gv, wv)) / total
    nf = weighted_luxemburg_norm(f, ball, PHI, w)
    ng = weighted_luxemburg_norm(g, ball, EXP, w)
    fitted = None
    for C in SMALL_CONSTANT_LADDER:
        if lhs <= C * nf * ng * (1 + 1e-12) or lhs == 0.0:
            fitted = C
            break
    return CheckReport(
        name="holder_orlicz",
        passed=fitted is not None,
        constants={"C": fitted, "lhs": lhs, "llog_norm": nf, "exp_norm": ng},
        witness={} if fitted else {"lhs": lhs, "rhs_unit": nf * ng},
        details={"weighted": True},
    )
