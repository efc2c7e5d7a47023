"""Solvers and parameter theory for absolute value equations.

The target problem is Ax - |x| - b = 0 with nu = ||A^{-1}||_2 < 1, which has
a unique solution for every b.  The package provides the SOR-like stationary
iteration with a theoretically optimal relaxation parameter, the generalized
Newton baseline, the closed-form convergent omega-interval, and grid scans
that verify the analysis numerically.  Hot kernels run through a compiled
extension when available, with a numpy fallback selected at import.
"""
from ._backend import COMPILED, backend_name
from .appendix import ScanReport, check_root_monotonicity, delta_values, scan_g1_derivative
from .errors import (
    AvesorError,
    DomainError,
    InvalidDimensionError,
    MatrixMarketFormatError,
    NoConvergentOmegaError,
    NonDifferentiablePointError,
    NotPositiveDefiniteError,
    NumericalBreakdownError,
    SingularMatrixError,
)
from .linalg import (
    Factorization,
    Matrix,
    block_tridiag,
    factorization_count,
    factorize,
    norm2,
    sign_diag_apply,
    solve,
    tridiag,
)
from .params import (
    TAU,
    ParamBundle,
    Region,
    convergent_region,
    eta,
    f_eval,
    g_derivative,
    g_eval,
    omega_aopt,
    omega_guo,
    omega_opt,
    param_bundle,
    tnorm,
)
from .problems import (
    AveProblem,
    alternating_solution,
    build_b,
    gen_ex41,
    gen_ex42,
    load_matrix_market,
    load_vector,
    save_matrix_market,
)
from .solvers import (
    SolveReport,
    SolverSettings,
    generalized_newton,
    residual,
    sor_like,
    sweep_optimal,
)
from .spectral import SpectralResult, nu_estimate

__version__ = "0.1.0"

__all__ = [
    "AveProblem",
    "AvesorError",
    "COMPILED",
    "DomainError",
    "Factorization",
    "InvalidDimensionError",
    "Matrix",
    "MatrixMarketFormatError",
    "NoConvergentOmegaError",
    "NonDifferentiablePointError",
    "NotPositiveDefiniteError",
    "NumericalBreakdownError",
    "ParamBundle",
    "Region",
    "ScanReport",
    "SingularMatrixError",
    "SolveReport",
    "SolverSettings",
    "SpectralResult",
    "TAU",
    "alternating_solution",
    "backend_name",
    "block_tridiag",
    "build_b",
    "check_root_monotonicity",
    "convergent_region",
    "delta_values",
    "eta",
    "f_eval",
    "factorization_count",
    "factorize",
    "g_derivative",
    "g_eval",
    "gen_ex41",
    "gen_ex42",
    "generalized_newton",
    "load_matrix_market",
    "load_vector",
    "norm2",
    "nu_estimate",
    "omega_aopt",
    "omega_guo",
    "omega_opt",
    "param_bundle",
    "residual",
    "save_matrix_market",
    "scan_g1_derivative",
    "sign_diag_apply",
    "solve",
    "sor_like",
    "sweep_optimal",
    "tnorm",
    "tridiag",
]
