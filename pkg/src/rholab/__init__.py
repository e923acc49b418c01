"""Desk-scale numerical laboratory: discrete Schrodinger-Riesz transforms,
critical-radius-localized weight and oscillation classes, Orlicz ball norms,
weighted Morrey norms, and suites that measure the constants in the associated
boundedness inequalities."""

from .grid import (
    Ball,
    BallFamily,
    FamilyPolicy,
    Grid,
    GridMismatchError,
    ScalarField,
    constant_field,
    dilate,
    generate_ball_family,
    geometric_ladder,
    integrate,
    make_ball,
    measure,
)
from .potentials import (
    CriticalRadiusField,
    Potential,
    RhoExceedsDomainError,
    bump_potential,
    check_rho_comparability,
    compute_rho,
    constant_potential,
    power_potential,
    reverse_holder_report,
    rho_field,
)
from .weights import (
    ApCharacteristic,
    Weight,
    ap_characteristic,
    constant_weight,
    doubling_check,
    maximal_rho_theta,
    measure_comparison_check,
    power_weight,
    reverse_holder_weight_fit,
    rho_modulated_weight,
    weak_l1_quasinorm,
    weighted_lp_norm,
)
from .orlicz import (
    EXP,
    IDENTITY,
    PHI,
    YoungFunction,
    holder_orlicz_check,
    luxemburg_norm,
    phi_m,
    weighted_luxemburg_norm,
)
from .bmo import (
    BmoCharacteristic,
    Symbol,
    bmo_characteristic,
    constant_symbol,
    dyadic_mean_drift_check,
    exp_integrability_check,
    john_nirenberg_tail,
    log_symbol,
    oscillation_weighted_lp_check,
)
from .operators import (
    SpectralOperator,
    apply_riesz,
    apply_riesz_adjoint,
    apply_transform,
    build_operator,
    commutator_apply,
    commutator_apply_kernel,
    kernel_decay_check,
    nested_commutator_apply,
    tail_bound_check,
    transform_magnitude,
)
from .morrey import (
    MorreyNormResult,
    MorreyParams,
    compute_norm,
    export_breakdown_csv,
    lloglog_morrey_norm,
    morrey_norm,
    weak_morrey_norm,
)
from .reporting import BoundednessReport, CheckReport, emit_report, fit_growth_bound
from .suites import (
    TestFunctionSuite,
    commutator_boundedness_suite,
    endpoint_lloglog_suite,
    lebesgue_boundedness_suite,
    make_test_suite,
    morrey_boundedness_suite,
    weak_morrey_boundedness_suite,
)

__version__ = "0.1.0"
