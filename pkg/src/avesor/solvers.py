"""SOR-like iteration, generalized Newton baseline, and the omega sweep.

The SOR-like method factors A once and iterates

    x_{k+1} = (1 - omega) x_k + omega A^{-1} (y_k + b)
    y_{k+1} = (1 - omega) y_k + omega |x_{k+1}|,

stopping when the residual ||A x_k - |x_k| - b||_2 drops to the tolerance.
The generalized Newton method solves [A - diag(sgn x_k)] x_{k+1} = b with a
fresh factorization each step.  Iterations are counted as completed
(x, y) updates; the initial residual is recorded as entry 0 of the history.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import (
    DomainError,
    NoConvergentOmegaError,
    NumericalBreakdownError,
    SingularMatrixError,
)
from .linalg import Matrix, as_vector, factorize

__all__ = [
    "SolverSettings",
    "SolveReport",
    "residual",
    "sor_like",
    "generalized_newton",
    "sweep_optimal",
]


@dataclass
class SolverSettings:
    """Iteration controls shared by both solvers.

    ``omega`` is the relaxation parameter (ignored by Newton); ``x0`` and
    ``y0`` default to zero vectors.  The default tolerance 1e-8 on the
    residual and the cap of 100 steps match the standard benchmark protocol.
    """

    omega: float | None = None
    tol: float = 1e-8
    max_iter: int = 100
    x0: np.ndarray | None = None
    y0: np.ndarray | None = None

    def validate(self, n, need_omega=True):
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if need_omega:
            if self.omega is None:
                raise DomainError("omega is required for the SOR-like iteration")
            if not 0.0 < self.omega < 2.0:
                raise DomainError(f"omega must lie in (0, 2), got {self.omega!r}")
        x0 = np.zeros(n) if self.x0 is None else as_vector(self.x0, n, "x0").copy()
        y0 = np.zeros(n) if self.y0 is None else as_vector(self.y0, n, "y0").copy()
        return x0, y0


@dataclass
class SolveReport:
    """Iteration trace: per-step residuals, convergence flag, final iterate.

    ``residual_history`` has ``iterations + 1`` entries (the initial residual
    is entry 0).  ``error_norm_history`` carries the omega-weighted error
    seminorm sqrt(||x*-x||^2 + ||y*-y||^2/omega^2) when the true solution is
    known, and only for the SOR-like method.
    """

    method: str
    converged: bool
    iterations: int
    residual_history: np.ndarray
    solution: np.ndarray
    error_norm_history: np.ndarray | None = None


def residual(A, b, x):
    """Residual norm ||A x - |x| - b||_2."""
    if not isinstance(A, Matrix):
        A = Matrix(A)
    b = as_vector(b, A.n, "b")
    x = as_vector(x, A.n, "x")
    return float(np.linalg.norm(A @ x - np.abs(x) - b))


def _run_sor(A, F, b, omega, tol, max_iter, x0, y0, xstar):
    """One SOR-like run against an existing factorization of A."""
    if F.variant in ("tridiag-spd", "tridiag-lu"):
        sub, diag, sup = A.tridiag_bands()
        tag = "spd" if F.variant == "tridiag-spd" else "lu"
        x, y, res_hist, err_hist, k, converged, breakdown = kernels.sor_like_tridiag(
            sub, diag, sup, (tag, *F.data), b, omega, x0, y0, tol, max_iter, xstar
        )
        if breakdown >= 0:
            raise NumericalBreakdownError(f"non-finite iterate at step {breakdown}")
        return SolveReport("sor-like", converged, k, np.asarray(res_hist), x, err_hist)

    x, y = x0, y0
    res_hist = [residual(A, b, x)]
    if xstar is not None:
        ystar = np.abs(xstar)
        winv2 = omega ** -2
        err_hist = [float(np.sqrt(np.sum((xstar - x) ** 2) + winv2 * np.sum((ystar - y) ** 2)))]
    else:
        err_hist = None
    k = 0
    while res_hist[-1] > tol and k < max_iter:
        x = (1.0 - omega) * x + omega * F.solve(y + b)
        y = (1.0 - omega) * y + omega * np.abs(x)
        k += 1
        r = float(np.linalg.norm((A @ x) - np.abs(x) - b))
        if not np.isfinite(r):
            raise NumericalBreakdownError(f"non-finite iterate at step {k}")
        res_hist.append(r)
        if err_hist is not None:
            err_hist.append(
                float(np.sqrt(np.sum((xstar - x) ** 2) + winv2 * np.sum((ystar - y) ** 2)))
            )
    return SolveReport(
        "sor-like",
        res_hist[-1] <= tol,
        k,
        np.array(res_hist),
        x,
        np.array(err_hist) if err_hist is not None else None,
    )


def sor_like(problem, settings):
    """Run the SOR-like iteration on an AVE problem.

    Factors the matrix exactly once.  When the problem carries its true
    solution, the omega-weighted error seminorm is recorded per step.
    """
    A, b = problem.A, problem.b
    x0, y0 = settings.validate(A.n, need_omega=True)
    F = factorize(A)
    return _run_sor(A, F, b, settings.omega, settings.tol, settings.max_iter, x0, y0, problem.x_star)


def generalized_newton(problem, settings):
    """Generalized Newton iteration: solve [A - diag(sgn x_k)] x_{k+1} = b.

    The shifted matrix changes with the sign pattern of the iterate, so each
    step refactors it.  ``settings.omega`` is ignored.
    """
    A, b = problem.A, problem.b
    x0, _ = settings.validate(A.n, need_omega=False)
    x = x0
    res_hist = [residual(A, b, x)]
    k = 0
    while res_hist[-1] > settings.tol and k < settings.max_iter:
        shifted = A.add_diagonal(-np.sign(x))
        try:
            F = factorize(shifted)
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"shifted matrix singular at step {k + 1}: {exc}") from exc
        x = F.solve(b)
        k += 1
        r = float(np.linalg.norm((A @ x) - np.abs(x) - b))
        if not np.isfinite(r):
            raise NumericalBreakdownError(f"non-finite iterate at step {k}")
        res_hist.append(r)
    return SolveReport("newton", res_hist[-1] <= settings.tol, k, np.array(res_hist), x, None)


def sweep_optimal(problem, omega_grid, settings):
    """Exhaustive omega sweep: run the SOR-like iteration for every grid value.

    Returns the smallest grid omega attaining the minimal iteration count
    among converged runs, together with its report.  The matrix is factored
    once for the whole sweep.  Grid points that diverge or break down are
    skipped; if none converges, ``NoConvergentOmegaError`` is raised.
    """
    grid = np.atleast_1d(np.asarray(omega_grid, dtype=np.float64))
    if grid.size == 0:
        raise DomainError("omega grid must be nonempty")
    if grid.min() <= 0.0 or grid.max() >= 2.0:
        raise DomainError("omega grid values must lie in (0, 2)")
    grid = np.sort(grid)
    A, b = problem.A, problem.b
    x0, y0 = settings.validate(A.n, need_omega=False)
    F = factorize(A)
    best_omega = None
    best_report = None
    for omega in grid:
        try:
            report = _run_sor(A, F, b, float(omega), settings.tol, settings.max_iter,
                              x0.copy(), y0.copy(), problem.x_star)
        except NumericalBreakdownError:
            continue
        if report.converged and (best_report is None or report.iterations < best_report.iterations):
            best_omega = float(omega)
            best_report = report
    if best_report is None:
        raise NoConvergentOmegaError("no omega in the grid produced a converged run")
    return best_omega, best_report
