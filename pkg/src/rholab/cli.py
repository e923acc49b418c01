"""Command-line driver: build the configured instance, run the requested
checks or suites, and emit JSON-lines reports with a printed summary."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bmo, config, morrey, operators, orlicz, potentials, suites, weights
from .grid import ScalarField
from .reporting import CheckReport, emit_report, load_records, summarize_records


def _add_common(parser):
    parser.add_argument("--config", help="TOML-style config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="reports.jsonl", help="JSON-lines output path")
    parser.add_argument("--grid", help="override grid as d,n,L")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rholab",
        description="numerical laboratory for Schrodinger-Riesz transforms, "
        "localized weights, and weighted Morrey norms",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("rho", "critical radius field and its comparability fit"),
        ("weights", "localized Muckenhoupt characteristics and weight lemmas"),
        ("bmo", "localized oscillation characteristic and oscillation lemmas"),
        ("orlicz", "Luxemburg norms and generalized Hoelder checks"),
        ("riesz", "operator build, spectral bound, adjoint and kernel decay"),
        ("morrey", "the three weighted Morrey norms of a probe function"),
        ("verify", "run a named verification suite"),
        ("report", "summarize an existing JSON-lines report"),
    ):
        p = sub.add_parser(name, help=desc)
        if name == "report":
            p.add_argument("path")
            continue
        _add_common(p)
        if name == "verify":
            p.add_argument(
                "--suite",
                default="all",
                choices=["lebesgue", "morrey", "weak", "commutator", "endpoint", "lemmas", "all"],
            )
        if name == "morrey":
            p.add_argument("--csv", help="write the per-ball breakdown to this CSV path")
    return parser


class Instance:
    """Lazily-built experiment objects shared by the subcommands."""

    def __init__(self, args):
        overrides = config.load_config(args.config) if args.config else {}
        self.cfg = config.merged_config(overrides)
        if args.grid:
            d, n, L = args.grid.split(",")
            self.cfg["grid"] = {"d": int(d), "n": int(n), "L": float(L)}
        self.seed = args.seed
        self.grid = config.build_grid(self.cfg)
        self._cache = {}

    def potential(self):
        return self._memo("potential", lambda: config.build_potential(self.grid, self.cfg))

    def rho(self):
        return self._memo(
            "rho",
            lambda: potentials.rho_field(
                self.potential(), tol=float(self.cfg["rho"].get("tol", 1e-6))
            ),
        )

    def weight(self):
        kind = self.cfg["weight"].get("kind")
        rho = self.rho() if kind == "rho_modulated" else None
        return self._memo("weight", lambda: config.build_weight(self.grid, self.cfg, rho))

    def symbol(self):
        return self._memo("symbol", lambda: config.build_symbol(self.grid, self.cfg))

    def family(self):
        return self._memo("family", lambda: config.build_family(self.grid, self.cfg))

    def operator(self):
        return self._memo("operator", lambda: operators.build_operator(self.grid, self.potential()))

    def suite(self):
        count = int(self.cfg["suite"].get("count", 10))
        return self._memo(
            "suite", lambda: suites.make_test_suite(self.operator(), self.family(), self.seed, count)
        )

    def params(self):
        p = self.cfg["params"]
        return float(p.get("p", 2.0)), float(p.get("kappa", 0.3)), float(p.get("theta", 1.0)), int(p.get("m", 1))

    def transforms(self):
        return [str(t) for t in self.cfg["suite"].get("transforms", ["R", "Rstar"])]

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]


def _cmd_rho(inst: Instance) -> list:
    rho = inst.rho()
    report = potentials.check_rho_comparability(rho, seed=inst.seed)
    stats = CheckReport(
        name="rho_field",
        passed=rho.ok,
        constants={
            "min": float(np.nanmin(rho.values)),
            "max": float(np.nanmax(rho.values)),
            "mean": float(np.nanmean(rho.values)),
        },
        details={"potential": inst.potential().descriptor, "tol": rho.tol},
    )
    rh = potentials.reverse_holder_report(inst.potential(), q=float(inst.grid.dim), family=inst.family())
    rh_report = CheckReport(
        name="reverse_holder_potential",
        passed=rh.passed,
        constants={"q": rh.q, "constant": rh.constant},
        details={"skipped_balls": rh.skipped_balls},
    )
    return [stats, report, rh_report]


def _cmd_weights(inst: Instance) -> list:
    p, kappa, theta, _ = inst.params()
    rho, w, fam = inst.rho(), inst.weight(), inst.family()
    ap = weights.ap_characteristic(w, p, theta, rho, fam)
    ap_report = CheckReport(
        name="ap_characteristic",
        passed=np.isfinite(ap.value),
        constants={"p": p, "theta": theta, "value": ap.value},
        details={"weight": w.descriptor},
    )
    return [
        ap_report,
        weights.reverse_holder_weight_fit(w, fam, rho),
        weights.measure_comparison_check(w, fam, rho, seed=inst.seed).report(),
        weights.doubling_check(w, p, theta, rho, fam),
    ]


def _cmd_bmo(inst: Instance) -> list:
    _, _, theta, _ = inst.params()
    rho, b, fam, w = inst.rho(), inst.symbol(), inst.family(), inst.weight()
    comp = potentials.check_rho_comparability(rho, seed=inst.seed)
    N0 = int(comp.constants.get("N0", 1))
    char = bmo.bmo_characteristic(b, theta, rho, fam)
    char_report = CheckReport(
        name="bmo_characteristic",
        passed=True,
        constants={"theta": theta, "value": char.value},
        details={"symbol": b.descriptor},
    )
    tail = bmo.john_nirenberg_tail(b, theta, rho, char.argmax_ball, N0, char.value, w=w.field)
    return [
        char_report,
        tail,
        bmo.oscillation_weighted_lp_check(b, w.field, inst.params()[0], rho, fam),
        bmo.exp_integrability_check(b, w.field, theta, rho, fam, N0, char.value),
        bmo.dyadic_mean_drift_check(b, theta, rho, fam),
    ]


def _cmd_orlicz(inst: Instance) -> list:
    rng = np.random.default_rng(inst.seed)
    fam = inst.family()
    w = inst.weight()
    reports = []
    balls = list(fam)
    n_trials = int(inst.cfg["suite"].get("count", 10))
    failures = 0
    for i in range(n_trials):
        ball = balls[int(rng.integers(0, len(balls)))]
        f = ScalarField(inst.grid, rng.standard_normal(inst.grid.num_points))
        g = ScalarField(inst.grid, rng.standard_normal(inst.grid.num_points))
        rep = orlicz.holder_orlicz_check(f, g, ball, w=w.field if i % 2 else None)
        failures += not rep.passed
    reports.append(
        CheckReport(
            name="holder_orlicz_trials",
            passed=failures == 0,
            constants={"trials": n_trials, "failures": failures},
        )
    )
    return reports


def _cmd_riesz(inst: Instance) -> list:
    op = inst.operator()
    rng = np.random.default_rng(inst.seed)
    worst = 0.0
    adj_err = 0.0
    for _ in range(20):
        f = ScalarField(inst.grid, rng.standard_normal(inst.grid.num_points))
        g = rng.standard_normal((op.dim, inst.grid.num_points))
        Rf = operators.apply_riesz(op, f)
        worst = max(worst, float(np.linalg.norm(Rf) / np.linalg.norm(f.values)))
        lhs = float((Rf * g).sum())
        rhs = float(np.dot(f.values, operators.apply_riesz_adjoint(op, g).values))
        adj_err = max(adj_err, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    spectral = CheckReport(
        name="riesz_spectral_bound",
        passed=worst <= 1.0 + 1e-8,
        constants={"max_ratio": worst, "lambda_min": float(op.eigenvalues[0])},
    )
    adjoint = CheckReport(
        name="riesz_adjoint_identity", passed=adj_err <= 1e-8, constants={"max_rel_err": adj_err}
    )
    decay = operators.kernel_decay_check(op, inst.rho(), N_list=(0, 1, 2))
    return [spectral, adjoint, decay]


def _cmd_morrey(inst: Instance, csv_path=None) -> list:
    p, kappa, theta, _ = inst.params()
    rho, w, fam = inst.rho(), inst.weight(), inst.family()
    name, probe = next(iter(inst.suite()))
    reports = []
    for params in (
        morrey.MorreyParams(p=p, kappa=kappa, theta=theta, flavor="strong"),
        morrey.MorreyParams(p=1.0, kappa=kappa, theta=theta, flavor="weak"),
        morrey.MorreyParams(p=1.0, kappa=kappa, theta=theta, flavor="llogl"),
    ):
        result = morrey.compute_norm(probe, w, params, rho, fam)
        reports.append(
            CheckReport(
                name=f"morrey_norm_{params.flavor}",
                passed=np.isfinite(result.value),
                constants={"value": result.value, "p": params.p, "kappa": kappa, "theta": theta},
                witness={"argmax_ball": result.argmax_ball},
                details={"probe": name},
            )
        )
        if params.flavor == "strong" and csv_path:
            morrey.export_breakdown_csv(result, csv_path)
    return reports


def _cmd_verify(inst: Instance, suite_name: str) -> list:
    p, kappa, theta, m = inst.params()
    reports = []
    if suite_name in ("lemmas", "all"):
        reports += _cmd_rho(inst)
        reports += _cmd_weights(inst)
        reports += _cmd_bmo(inst)
    needs_op = suite_name in ("lebesgue", "morrey", "weak", "commutator", "endpoint", "all")
    if not needs_op:
        return reports
    op = inst.operator()
    rho, w, b, fam = inst.rho(), inst.weight(), inst.symbol(), inst.family()
    suite = inst.suite()
    sparams = morrey.MorreyParams(p=p, kappa=kappa, theta=theta, flavor="strong")
    for which in inst.transforms():
        if suite_name in ("lebesgue", "all"):
            reports.append(suites.lebesgue_boundedness_suite(op, w, p, suite, which))
            reports.append(suites.lebesgue_boundedness_suite(op, w, 1.0, suite, which))
        if suite_name in ("morrey", "all"):
            reports.append(suites.morrey_boundedness_suite(op, w, sparams, rho, fam, suite, which))
        if suite_name in ("weak", "all"):
            reports.append(
                suites.weak_morrey_boundedness_suite(
                    op, w, kappa, rho, fam, suite, which, input_theta=theta
                )
            )
        if suite_name in ("commutator", "all"):
            reports.append(
                suites.commutator_boundedness_suite(op, b, w, sparams, rho, fam, suite, m, which)
            )
        if suite_name in ("endpoint", "all"):
            reports.append(
                suites.endpoint_lloglog_suite(op, b, w, kappa, theta, rho, fam, suite, m, which)
            )
    return reports


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        print(summarize_records(load_records(args.path)))
        return 0
    inst = Instance(args)
    if args.command == "rho":
        reports = _cmd_rho(inst)
    elif args.command == "weights":
        reports = _cmd_weights(inst)
    elif args.command == "bmo":
        reports = _cmd_bmo(inst)
    elif args.command == "orlicz":
        reports = _cmd_orlicz(inst)
    elif args.command == "riesz":
        reports = _cmd_riesz(inst)
    elif args.command == "morrey":
        reports = _cmd_morrey(inst, getattr(args, "csv", None))
    elif args.command == "verify":
        reports = _cmd_verify(inst, args.suite)
    summary = emit_report(reports, args.out)
    print(summary)
    return 0 if all(r.record().get("passed") for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
