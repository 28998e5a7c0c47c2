"""Solver and verification toolkit for fractional functional differential
equations with causal (Volterra) operators.

The problem class is converted to its equivalent weakly singular integral
equation and solved by fixed-point iteration in a Mittag-Leffler-weighted
norm; the package also ships executable versions of the contraction,
comparison, data-dependence and solution-set bounds that justify the
iteration.
"""

from .backend import backend_name
from .errors import (
    ArgumentRangeError,
    ConfigError,
    DomainError,
    HypothesisError,
    ResolutionError,
    SingularityError,
)
from .fracops import (
    FracOrder,
    composition_defect,
    frac_integral,
    frac_integral_at_left,
    frac_integral_grid,
    hilfer_derivative,
    inversion_defect,
    kernel,
    psi_images,
    raw_values,
    resolvent,
)
from .mesh import GradedMesh, GridFunction, default_grading, grid_sub
from .operators import (
    CausalityReport,
    PantographKernel,
    RHSFunction,
    VolterraOperator,
    causality_check,
    check_condition_D,
    delay_operator,
    pantograph_apply,
    pantograph_operator,
    shifted_operator,
    zero_operator,
)
from .psi import BUILTIN_PSI, PsiMap, get_psi, validate_psi
from .solver import (
    ProblemSpec,
    SolverReport,
    c_constant,
    contraction_factor,
    default_start,
    picard_solve,
    picard_step,
    picard_step_floating,
)
from .spaces import (
    BieleckiWeight,
    bielecki_metric,
    bielecki_norm,
    special_case_weight,
)
from .special import ML_Z_MAX, MLParams, gamma, ml1, ml2
from .verify import (
    PerturbationSpec,
    check_caplygin,
    check_comparison,
    data_dependence_bound,
    differential_residual,
    hausdorff_bound,
    inversion_identity_check,
    ml_integral_identity_check,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentRangeError",
    "BUILTIN_PSI",
    "BieleckiWeight",
    "CausalityReport",
    "ConfigError",
    "DomainError",
    "FracOrder",
    "GradedMesh",
    "GridFunction",
    "HypothesisError",
    "ML_Z_MAX",
    "MLParams",
    "PantographKernel",
    "PerturbationSpec",
    "ProblemSpec",
    "PsiMap",
    "RHSFunction",
    "ResolutionError",
    "SingularityError",
    "SolverReport",
    "VolterraOperator",
    "backend_name",
    "bielecki_metric",
    "bielecki_norm",
    "c_constant",
    "causality_check",
    "check_caplygin",
    "check_comparison",
    "check_condition_D",
    "composition_defect",
    "contraction_factor",
    "data_dependence_bound",
    "default_grading",
    "default_start",
    "delay_operator",
    "differential_residual",
    "frac_integral",
    "frac_integral_at_left",
    "frac_integral_grid",
    "gamma",
    "get_psi",
    "grid_sub",
    "hausdorff_bound",
    "hilfer_derivative",
    "inversion_defect",
    "inversion_identity_check",
    "kernel",
    "ml1",
    "ml2",
    "ml_integral_identity_check",
    "pantograph_apply",
    "pantograph_operator",
    "picard_solve",
    "picard_step",
    "picard_step_floating",
    "psi_images",
    "raw_values",
    "resolvent",
    "shifted_operator",
    "special_case_weight",
    "validate_psi",
    "zero_operator",
]
