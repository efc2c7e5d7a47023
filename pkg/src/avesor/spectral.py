"""Estimate nu = ||A^{-1}||_2 by inverse power iteration.

Every parameter formula in :mod:`avesor.params` is driven by this quantity.
For an SPD matrix the iteration runs on A itself (nu = 1/lambda_min); for a
general matrix it runs on A^T A through a single factorization of A, so that
nu = 1/sigma_min.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalBreakdownError
from .linalg import Matrix, as_vector, factorize

__all__ = ["SpectralResult", "nu_estimate"]


@dataclass(frozen=True)
class SpectralResult:
    """Outcome of the inverse power iteration.

    ``nu`` is the estimate of ||A^{-1}||_2.  For SPD input
    ``lambda_min_estimate`` is the smallest eigenvalue of A and equals
    1/nu; for general input it is the smallest eigenvalue of A^T A, i.e.
    sigma_min(A)^2.
    """

    nu: float
    lambda_min_estimate: float
    iterations: int
    converged: bool


def nu_estimate(A, tol=1e-8, max_iter=2000, x0=None):
    """Inverse power iteration for ||A^{-1}||_2.

    The iterate is normalized each step and the Rayleigh quotient
    mu_k = x^T A^{-1} x (or x^T (A^T A)^{-1} x for general A) is tracked.
    Iteration stops when the relative change |mu_{k+1} - mu_k| drops below
    ``tol`` times |mu_{k+1}|, or immediately when the eigenpair residual
    ||y - mu x|| <= tol * |mu| (exact eigenvectors converge in one step).

    Defaults: tol=1e-8, max_iter=2000, x0 = vector of ones.
    """
    if not isinstance(A, Matrix):
        raise TypeError("nu_estimate expects a Matrix")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    F = factorize(A)  # raises SingularMatrixError for singular input
    n = A.n
    if x0 is None:
        x = np.ones(n)
    else:
        x = as_vector(x0, n, "x0").copy()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise DomainError("x0 must be nonzero")
    x /= nrm

    spd = A.spd_hint
    mu_prev = None
    mu = 0.0
    for k in range(1, max_iter + 1):
        if spd:
            y = F.solve(x)
        else:
            y = F.solve(F.solve(x, transpose=True))
        if not np.all(np.isfinite(y)):
            raise NumericalBreakdownError(f"non-finite iterate at step {k}")
        mu = float(x @ y)
        if mu <= 0:
            raise NumericalBreakdownError(
                f"non-positive Rayleigh quotient {mu!r} at step {k}; "
                "matrix is not positive definite along the iteration"
            )
        if np.linalg.norm(y - mu * x) <= tol * abs(mu):
            return _result(mu, k, True, spd)
        if mu_prev is not None and abs(mu - mu_prev) <= tol * abs(mu):
            return _result(mu, k, True, spd)
        mu_prev = mu
        x = y / np.linalg.norm(y)
    return _result(mu, max_iter, False, spd)


def _result(mu, iterations, converged, spd):
    # SPD: mu -> 1/lambda_min(A).  General: mu -> 1/sigma_min(A)^2.
    if spd:
        return SpectralResult(nu=mu, lambda_min_estimate=1.0 / mu,
                              iterations=iterations, converged=converged)
    return SpectralResult(nu=float(np.sqrt(mu)), lambda_min_estimate=1.0 / mu,
                          iterations=iterations, converged=converged)
