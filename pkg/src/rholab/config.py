"""Plain TOML-style configuration: [section] headers with key = value lines.

Supported values: quoted strings, integers, floats, true/false, and flat
arrays like [0.5, 1.0, 2.0].  This covers the experiment descriptions
(potential, weight, symbol, params, family policy, ladders) without pulling a
full TOML dependency into a 3.10 runtime.
"""

from __future__ import annotations

import re

from .bmo import Symbol, constant_symbol, log_symbol
from .grid import FamilyPolicy, Grid, generate_ball_family
from .potentials import Potential, bump_potential, constant_potential, power_potential
from .weights import Weight, constant_weight, power_weight, rho_modulated_weight

_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_.-]+)\]$")


class ConfigError(ValueError):
    pass


def _parse_scalar(text: str):
    text = text.strip()
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse value {text!r}")


def _parse_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part) for part in inner.split(",")]
    return _parse_scalar(text)


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out)


def parse_config(text: str) -> dict:
    sections: dict = {}
    current = None
    for raw in text.splitlines():
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            current = sections.setdefault(m.group(1), {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw!r}")
        if current is None:
            raise ConfigError("key outside of any [section]")
        key, _, val = line.partition("=")
        current[key.strip()] = _parse_value(val)
    return sections


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config(fh.read())


DEFAULT_CONFIG = {
    "grid": {"d": 3, "n": 17, "L": 4.0},
    "potential": {"kind": "constant", "c": 1.0},
    "weight": {"kind": "constant", "c": 1.0},
    "symbol": {"kind": "log1p_abs"},
    "family": {},  # stride and radii derive from the grid unless given
    "params": {"p": 2.0, "kappa": 0.3, "theta": 1.0, "m": 1},
    "rho": {"tol": 1e-6},
    "suite": {"count": 10, "transforms": ["R", "Rstar"]},
}


def merged_config(overrides: dict | None = None) -> dict:
    cfg = {k: dict(v) for k, v in DEFAULT_CONFIG.items()}
    for section, body in (overrides or {}).items():
        cfg.setdefault(section, {}).update(body)
    return cfg


def build_grid(cfg: dict) -> Grid:
    g = cfg["grid"]
    return Grid(dim=int(g["d"]), half_width=float(g["L"]), points_per_axis=int(g["n"]))


def build_potential(grid: Grid, cfg: dict) -> Potential:
    p = cfg["potential"]
    kind = p.get("kind", "constant")
    if kind == "constant":
        return constant_potential(grid, float(p.get("c", 1.0)))
    if kind == "power":
        return power_potential(grid, float(p.get("exponent", 2.0)))
    if kind == "bumps":
        return bump_potential(grid, p["centers"], p["amplitudes"], p["widths"])
    raise ConfigError(f"unknown potential kind {kind!r}")


def build_weight(grid: Grid, cfg: dict, rho=None) -> Weight:
    w = cfg["weight"]
    kind = w.get("kind", "constant")
    if kind == "constant":
        return constant_weight(grid, float(w.get("c", 1.0)))
    if kind == "power":
        return power_weight(grid, float(w.get("alpha", 1.0)))
    if kind == "rho_modulated":
        if rho is None:
            raise ConfigError("rho_modulated weight needs the critical radius field")
        return rho_modulated_weight(rho, float(w.get("gamma", 1.0)))
    raise ConfigError(f"unknown weight kind {kind!r}")


def build_symbol(grid: Grid, cfg: dict) -> Symbol:
    s = cfg["symbol"]
    kind = s.get("kind", "log1p_abs")
    if kind == "constant":
        return constant_symbol(grid, float(s.get("c", 1.0)))
    if kind == "log1p_abs":
        return log_symbol(grid)
    raise ConfigError(f"unknown symbol kind {kind!r}")


def build_family(grid: Grid, cfg: dict):
    fam = cfg.get("family", {})
    L = grid.half_width
    stride = int(fam.get("stride", max(1, (grid.points_per_axis - 1) // 4)))
    radii = tuple(float(r) for r in fam.get("radii", (L / 8, L / 4, L / 2)))
    policy = FamilyPolicy(
        center_stride=stride,
        radii=radii,
        include_boundary=bool(fam.get("include_boundary", False)),
    )
    family = generate_ball_family(grid, policy)
    if len(family) == 0:
        raise ConfigError("family policy produced no balls inside the box")
    return family
