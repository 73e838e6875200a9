"""Exact boundary dynamics for free groups acting on the 2n-valent tree.

The package computes, in exact rational arithmetic wherever the mathematics
is exact: cylinder measures and pushforwards on the boundary, expectation /
deviation / covariance statistics over the group, summability diagnostics,
finite operator truncations with their identity checks, and a certified
cyclic cocycle evaluator.  A batch CLI (``treeboundary``) exposes the whole
pipeline as JSON + CSV reports.
"""

from .words import (
    BudgetError,
    DEFAULT_BUDGET,
    FreeGroup,
    IDENTITY,
    Word,
    gromov_product,
    mul,
    reduce_letters,
    word_from_str,
    word_to_str,
)
from .boundary import (
    BoundaryPoint,
    Cylinder,
    CylinderMeasure,
    VisualStructure,
    boundary_action,
    comparability_constants,
    cylinder_measure,
    depth_mass,
    preimage_cylinder,
    pushforward,
    pushforward_mass,
    visual_distance,
    weak_distance_to_delta,
)
from .functions import (
    GaussianRational,
    LocallyConstantFunction,
    QQ_I,
    QQ_ONE,
    QQ_ZERO,
    random_unit_function,
    translate,
)
from .deviation import (
    DeviationProfile,
    ProfileRow,
    covariance,
    deviation,
    deviation_sq,
    deviation_sq_pairsum,
    expectation,
    fit_length_decay_constant,
    sigma_envelope,
    sphere_envelope_constant,
)
from .summability import (
    SortedDecayCheck,
    SummabilityReport,
    decay_exponent_fit,
    dplus_surrogate_check,
    hausdorff_dimension,
    lp_report,
    summability_threshold,
)
from .svd import operator_norm, schatten_norm, singular_values
from .operators import (
    OPERATOR_BUDGET,
    PiIdentityReport,
    TruncatedOperator,
    Truncation,
    TruncationBasis,
    build,
    commutator_singular_values,
    conditional_lower_bound_check,
    fiber_diagonal,
    fiber_unit,
    homotopy_projection,
    homotopy_projection_check,
    projection_P,
    rep_crossed,
    rep_function,
    rep_group,
    verify_compression_identity,
    verify_pi_identity,
)
from .chern import (
    CertifiedValue,
    CocycleInput,
    TraceOracleReport,
    cocycle_value,
    shifted_functions,
    sphere_term_bound,
    trace_oracle,
    trace_oracle_dense,
    trace_oracle_report,
)
from .verify import CheckResult, VerifyContext, check_names, run_all

__all__ = [
    "BoundaryPoint",
    "BudgetError",
    "CertifiedValue",
    "CheckResult",
    "CocycleInput",
    "Cylinder",
    "CylinderMeasure",
    "DEFAULT_BUDGET",
    "DeviationProfile",
    "FreeGroup",
    "GaussianRational",
    "IDENTITY",
    "LocallyConstantFunction",
    "OPERATOR_BUDGET",
    "PiIdentityReport",
    "ProfileRow",
    "QQ_I",
    "QQ_ONE",
    "QQ_ZERO",
    "SortedDecayCheck",
    "SummabilityReport",
    "TraceOracleReport",
    "TruncatedOperator",
    "Truncation",
    "TruncationBasis",
    "VerifyContext",
    "VisualStructure",
    "Word",
    "boundary_action",
    "build",
    "check_names",
    "cocycle_value",
    "commutator_singular_values",
    "comparability_constants",
    "conditional_lower_bound_check",
    "covariance",
    "cylinder_measure",
    "decay_exponent_fit",
    "depth_mass",
    "deviation",
    "deviation_sq",
    "deviation_sq_pairsum",
    "dplus_surrogate_check",
    "expectation",
    "fiber_diagonal",
    "fiber_unit",
    "fit_length_decay_constant",
    "gromov_product",
    "hausdorff_dimension",
    "homotopy_projection",
    "homotopy_projection_check",
    "lp_report",
    "mul",
    "operator_norm",
    "preimage_cylinder",
    "projection_P",
    "pushforward",
    "pushforward_mass",
    "random_unit_function",
    "reduce_letters",
    "rep_crossed",
    "rep_function",
    "rep_group",
    "run_all",
    "schatten_norm",
    "shifted_functions",
    "sigma_envelope",
    "singular_values",
    "sphere_envelope_constant",
    "sphere_term_bound",
    "summability_threshold",
    "trace_oracle",
    "trace_oracle_dense",
    "trace_oracle_report",
    "translate",
    "verify_compression_identity",
    "verify_pi_identity",
    "visual_distance",
    "weak_distance_to_delta",
    "word_from_str",
    "word_to_str",
]

__version__ = "0.1.0"
