"""Dual families for perturbed frames, Riesz bases and quasi-bases.

Submodules
----------
linalg        weighted coordinate spaces, operators, Neumann inversion
sequences     finite families, frame bounds, excess, reconstruction residuals
perturbation  perturbation conditions, certificates and dual construction
gallery       concrete scenarios (Hermite grid, oscillator, rank-one, ...)
distribution  monomial / delta-derivative pairings and multiplier deformations
scenario      declarative scenario runner behind the command line tool
"""

from .errors import (
    ContractionFailure,
    EpsilonOutOfRange,
    ExtensionMismatch,
    HypothesisViolated,
    IntegrationDivergence,
    KernelMismatch,
    NonConvergence,
    PositivityViolation,
    QuadratureUnderresolved,
    QuasiFramesError,
    ReciprocalUnderflow,
    SchemaError,
    SingularOperator,
    StencilOverflow,
    TaylorTooShort,
    UsageError,
)
from .estimators import PerturbationDual
from .linalg import (
    ComplexVector,
    HilbertGrid,
    LinearMap,
    direct_inverse,
    inner,
    neumann_inverse,
    neumann_term_bound,
    norm,
    operator_norm,
    rank_one_projector,
)
from .perturbation import (
    ConditionId,
    DualSystem,
    PerturbationCertificate,
    assemble_q,
    build_duals_strong,
    build_duals_subspace,
    build_duals_weak,
    check_C25,
    check_C28,
    check_C210,
    check_L12,
    check_L13,
    predicted_bounds,
)
from .sequences import (
    FrameBounds,
    SubspaceBasis,
    VectorFamily,
    bessel_bound,
    excess,
    frame_bounds,
    is_riesz,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexVector",
    "ConditionId",
    "ContractionFailure",
    "DualSystem",
    "EpsilonOutOfRange",
    "ExtensionMismatch",
    "FrameBounds",
    "HilbertGrid",
    "HypothesisViolated",
    "IntegrationDivergence",
    "KernelMismatch",
    "LinearMap",
    "NonConvergence",
    "PerturbationCertificate",
    "PerturbationDual",
    "PositivityViolation",
    "QuadratureUnderresolved",
    "QuasiFramesError",
    "ReciprocalUnderflow",
    "SchemaError",
    "SingularOperator",
    "StencilOverflow",
    "SubspaceBasis",
    "TaylorTooShort",
    "UsageError",
    "VectorFamily",
    "assemble_q",
    "bessel_bound",
    "build_duals_strong",
    "build_duals_subspace",
    "build_duals_weak",
    "check_C25",
    "check_C28",
    "check_C210",
    "check_L12",
    "check_L13",
    "direct_inverse",
    "excess",
    "frame_bounds",
    "inner",
    "is_riesz",
    "neumann_inverse",
    "neumann_term_bound",
    "norm",
    "operator_norm",
    "predicted_bounds",
    "rank_one_projector",
]
