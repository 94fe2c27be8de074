"""Structured eigenpair and eigenvalue backward errors for even pencils ``M + zN``."""

from .backward_errors import (
    backward_error,
    eigenvalue_minimizer,
    eta_block,
    eta_block_eigenvalue,
    eta_block_real,
    eta_even,
    eta_symmetry,
    eta_symmetry_eigenvalue,
    eta_unstructured,
    feasible_point_search,
    finiteness_check,
    reconstruct_minimizer,
    scope_vectors,
    symmetry_objective,
)
from .errors import (
    DegenerateInput,
    EmptyKernel,
    GenerationFailed,
    Infeasible,
    InvalidPencil,
    InvalidQuery,
    InvalidScope,
    NoSolution,
    RankDeficient,
    StructPencilError,
)
from .mappings import (
    MapSolution,
    pseudoinverse,
    real_two_sided_minimal_map,
    skew_hermitian_minimal_map,
    two_sided_minimal_map,
)
from .model import (
    BackwardErrorReport,
    Blocks,
    EigenPairQuery,
    Field,
    Perturbation,
    PerturbationScope,
    ReportKind,
    Structure,
    StructuredPencil,
    assemble_M,
    assemble_N,
    evaluate,
    residual,
)
from .oracle import (
    OracleConfig,
    admissible_query,
    certify_eigenvalue,
    least_norm_feasible,
    planted_instance,
    random_structured_pencil,
)

__version__ = "0.1.0"
