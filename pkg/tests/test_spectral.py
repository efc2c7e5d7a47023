import numpy as np
import pytest

from avesor import (
    DomainError,
    Matrix,
    SingularMatrixError,
    block_tridiag,
    nu_estimate,
    tridiag,
)


def test_tridiag_1000_matches_table_value():
    res = nu_estimate(tridiag(1000, -1.0, 8.0, -1.0))
    assert res.converged
    assert abs(res.nu - 0.1667) < 5e-5


def test_block_tridiag_m8_matches_table_value():
    S = tridiag(8, -1.0, 8.0, -1.0)
    res = nu_estimate(block_tridiag(8, S))
    assert res.converged
    assert abs(res.nu - 0.2358) < 5e-5


def test_identity_converges_in_one_iteration():
    # order 16 keeps the normalization exact in floating point
    res = nu_estimate(Matrix.identity(16))
    assert res.nu == 1.0
    assert res.iterations == 1
    assert res.converged


@pytest.mark.parametrize("n", [10, 25, 50, 100])
def test_agrees_with_analytic_smallest_eigenvalue(n):
    # eigenvalues of the symmetric tridiagonal Toeplitz matrix are known
    analytic = 1.0 / (8.0 - 2.0 * np.cos(np.pi / (n + 1)))
    res = nu_estimate(tridiag(n, -1.0, 8.0, -1.0))
    assert abs(res.nu - analytic) <= 1e-6


def test_invariant_nu_is_reciprocal_of_lambda_min():
    res = nu_estimate(tridiag(50, -1.0, 8.0, -1.0))
    assert abs(res.nu - 1.0 / res.lambda_min_estimate) <= 1e-12 * res.nu


def test_result_invariant_to_scaling_of_x0():
    A = tridiag(80, -1.0, 8.0, -1.0)
    a = nu_estimate(A, x0=np.ones(80))
    for scale in (7.25, -3.0, 1e-9):
        b = nu_estimate(A, x0=scale * np.ones(80))
        assert abs(a.nu - b.nu) <= 1e-8 * a.nu


def test_general_path_matches_svd():
    rng = np.random.default_rng(11)
    arr = rng.normal(size=(25, 25)) + np.diag(np.linspace(6.0, 30.0, 25))
    A = Matrix(arr)
    assert not A.spd_hint
    res = nu_estimate(A, tol=1e-12, max_iter=5000)
    sigma_min = np.linalg.svd(arr, compute_uv=False)[-1]
    assert abs(res.nu - 1.0 / sigma_min) <= 1e-6 / sigma_min
    assert abs(res.lambda_min_estimate - sigma_min**2) <= 1e-6 * sigma_min**2


def test_singular_matrix_raises():
    with pytest.raises(SingularMatrixError):
        nu_estimate(Matrix(np.zeros((4, 4))))


def test_argument_validation():
    A = Matrix.identity(3)
    with pytest.raises(DomainError):
        nu_estimate(A, tol=0.0)
    with pytest.raises(DomainError):
        nu_estimate(A, max_iter=0)
    with pytest.raises(DomainError):
        nu_estimate(A, x0=np.zeros(3))


def test_max_iter_exhaustion_reports_not_converged():
    res = nu_estimate(tridiag(200, -1.0, 8.0, -1.0), max_iter=1)
    assert not res.converged
    assert res.iterations == 1
