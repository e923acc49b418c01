"""Structured records for verified inequalities and their JSON-lines emission.

Every check in the package produces a CheckReport (or the suite-level
BoundednessReport): the measured constants, a pass flag, and the worst-case
witness.  Reports serialize deterministically; the only timestamp lives in the
header record so that identical runs produce identical payload lines.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field

import numpy as np

# Shared fitting lattices.  Existence-style constants from the source
# inequalities are always reported as the minimal witnesses on these ladders.
VARTHETA_LADDER = tuple(0.5 * k for k in range(17))  # 0, 0.5, ..., 8
CONSTANT_LADDER = tuple(float(2**k) for k in range(21))  # 1 .. 2^20
SMALL_CONSTANT_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0)
ETA_LADDER = (0.0, 1.0, 2.0, 4.0)
EPSILON_LADDER = (0.125, 0.25, 0.5, 1.0)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return _jsonable(summarize_object(x))
    return x


def summarize_object(obj):
    """Compact dict form for witnesses that reference heavyweight objects (balls)."""
    from .grid import Ball

    if isinstance(obj, Ball):
        return {
            "center": obj.center.tolist(),
            "radius": obj.radius,
            "members": int(obj.member_count),
            "boundary": bool(obj.boundary),
        }
    return dataclasses.asdict(obj)


@dataclass
class CheckReport:
    """One verified inequality: fitted constants, pass/fail, and worst witness."""

    name: str
    passed: bool
    constants: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {
            "record": "check",
            "name": self.name,
            "passed": bool(self.passed),
            "constants": _jsonable(self.constants),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }


@dataclass
class BoundednessReport:
    """Suite-level operator bound: per-function ratio table plus fitted (C, vartheta)."""

    theorem: str
    passed: bool
    fitted_vartheta: float | None
    fitted_constant: float | None
    measured_constant: float
    ratios: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {
            "record": "boundedness",
            "theorem": self.theorem,
            "passed": bool(self.passed),
            "fitted_vartheta": _jsonable(self.fitted_vartheta),
            "fitted_constant": _jsonable(self.fitted_constant),
            "measured_constant": _jsonable(self.measured_constant),
            "ratios": _jsonable(self.ratios),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }


def fit_growth_bound(
    rows,
    vartheta_ladder=VARTHETA_LADDER,
    constant_ladder=CONSTANT_LADDER,
):
    """Minimal lexicographic (vartheta, C) with value <= C * factor_base**vartheta * scale
    for every row (value, factor_base, scale).

    Returns (vartheta, C, measured, witness_index) or (None, None, measured, idx)
    on ladder exhaustion; measured is the raw max of value / (factor_base**vartheta
    * scale) at the fitted (or last) vartheta.
    """
    rows = [(float(v), float(b), float(s)) for (v, b, s) in rows]
    if not rows:
        return vartheta_ladder[0], constant_ladder[0], 0.0, None
    values = np.array([r[0] for r in rows])
    bases = np.array([r[1] for r in rows])
    scales = np.array([r[2] for r in rows])
    if np.any(scales <= 0):
        raise ValueError("growth-bound scales must be positive")
    for vt in vartheta_ladder:
        ratio = values / (bases**vt * scales)
        measured = float(ratio.max())
        idx = int(ratio.argmax())
        for C in constant_ladder:
            if measured <= C:
                return vt, C, measured, idx
    ratio = values / (bases ** vartheta_ladder[-1] * scales)
    return None, None, float(ratio.max()), int(ratio.argmax())


def emit_report(reports, path) -> str:
    """Write reports as JSON lines (header record first) and return a summary table."""
    records = [r.record() for r in reports]
    header = {
        "record": "header",
        "count": len(records),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    try:
        with open(path, "w") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return summarize_records(records)


def summarize_records(records) -> str:
    n_pass = sum(1 for r in records if r.get("passed"))
    lines = [f"{'name':<44} {'pass':<5} constants"]
    for rec in records:
        name = rec.get("name") or rec.get("theorem") or "?"
        status = "PASS" if rec.get("passed") else "FAIL"
        if rec["record"] == "boundedness":
            consts = f"vartheta={rec['fitted_vartheta']} C={rec['fitted_constant']} measured={rec['measured_constant']:.4g}"
        else:
            consts = " ".join(f"{k}={v}" for k, v in sorted(rec.get("constants", {}).items()))
        lines.append(f"{name:<44} {status:<5} {consts}")
    lines.append(f"total: {n_pass}/{len(records)} passed")
    return "\n".join(lines)


def load_records(path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
