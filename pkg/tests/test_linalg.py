import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avesor import (
    Factorization,
    InvalidDimensionError,
    Matrix,
    NotPositiveDefiniteError,
    SingularMatrixError,
    block_tridiag,
    factorization_count,
    factorize,
    norm2,
    sign_diag_apply,
    solve,
    tridiag,
)


class TestTridiag:
    def test_order_three(self):
        A = tridiag(3, -1.0, 8.0, -1.0)
        expected = np.array([[8.0, -1.0, 0.0], [-1.0, 8.0, -1.0], [0.0, -1.0, 8.0]])
        np.testing.assert_array_equal(A.toarray(), expected)
        assert A.spd_hint

    def test_order_one_has_no_offdiagonals(self):
        A = tridiag(1, -1.0, 8.0, -1.0)
        np.testing.assert_array_equal(A.toarray(), [[8.0]])

    def test_zero_offdiagonals_give_identity(self):
        A = tridiag(2, 0.0, 1.0, 0.0)
        np.testing.assert_array_equal(A.toarray(), np.eye(2))
        assert A.spd_hint

    def test_zero_order_rejected(self):
        with pytest.raises(InvalidDimensionError):
            tridiag(0, -1.0, 8.0, -1.0)

    def test_no_spd_hint_for_asymmetric_or_weak_diagonal(self):
        assert not tridiag(3, -1.0, 8.0, -2.0).spd_hint
        assert not tridiag(3, -1.0, 2.0, -1.0).spd_hint

    def test_large_order_stored_sparse(self):
        A = tridiag(100, -1.0, 8.0, -1.0)
        assert A.is_sparse
        assert A.is_tridiagonal
        sub, diag, sup = A.tridiag_bands()
        assert sub.shape == (99,) and np.all(sub == -1.0)
        assert np.all(diag == 8.0) and np.all(sup == -1.0)


class TestBlockTridiag:
    def test_explicit_assembly_two_blocks(self):
        S = tridiag(2, -1.0, 8.0, -1.0)
        A = block_tridiag(2, S)
        expected = np.kron(np.eye(2), S.toarray()) + np.kron(
            np.array([[0.0, 1.0], [1.0, 0.0]]), -np.eye(2)
        )
        np.testing.assert_array_equal(A.toarray(), expected)
        assert A.spd_hint

    def test_single_block(self):
        A = block_tridiag(1, tridiag(1, -1.0, 8.0, -1.0))
        np.testing.assert_array_equal(A.toarray(), [[8.0]])

    def test_off_diagonal_block_entries(self):
        A = block_tridiag(2, Matrix(2.0 * np.eye(2)))
        assert A.toarray()[0, 2] == -1.0
        assert A.toarray()[0, 1] == 0.0

    def test_block_size_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            block_tridiag(3, tridiag(2, -1.0, 8.0, -1.0))

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_against_dense_loop_assembly(self, m):
        S = tridiag(m, -1.0, 8.0, -1.0).toarray()
        expected = np.zeros((m * m, m * m))
        for i in range(m):
            expected[i * m : (i + 1) * m, i * m : (i + 1) * m] = S
            if i + 1 < m:
                expected[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = -np.eye(m)
                expected[(i + 1) * m : (i + 2) * m, i * m : (i + 1) * m] = -np.eye(m)
        A = block_tridiag(m, tridiag(m, -1.0, 8.0, -1.0))
        np.testing.assert_array_equal(A.toarray(), expected)


class TestFactorizeSolve:
    def test_identity(self):
        F = factorize(Matrix.identity(3))
        np.testing.assert_allclose(solve(F, [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_tridiag_roundtrip(self):
        A = tridiag(3, -1.0, 8.0, -1.0)
        r = A @ np.ones(3)
        y = solve(factorize(A), r)
        np.testing.assert_allclose(y, np.ones(3), atol=1e-12)

    def test_zero_matrix_singular(self):
        with pytest.raises(SingularMatrixError):
            factorize(Matrix(np.zeros((3, 3))))

    def test_singular_sparse(self):
        import scipy.sparse as sp

        bad = sp.csr_array(np.diag([1.0] * 99 + [0.0]))
        with pytest.raises(SingularMatrixError):
            factorize(Matrix(bad))

    def test_cholesky_breakdown(self):
        bad = Matrix(np.array([[1.0, 2.0], [2.0, 1.0]]), spd_hint=True)
        with pytest.raises(NotPositiveDefiniteError):
            factorize(bad)

    def test_tridiag_spd_breakdown(self):
        bad = Matrix(tridiag(80, -1.0, 1.0, -1.0).tocsr(), spd_hint=True)
        with pytest.raises(NotPositiveDefiniteError):
            factorize(bad)

    def test_solve_length_mismatch(self):
        F = factorize(Matrix.identity(3))
        with pytest.raises(InvalidDimensionError):
            solve(F, [1.0, 2.0])

    def test_diagonal_solve(self):
        F = factorize(Matrix(np.diag([2.0, 4.0])))
        np.testing.assert_allclose(solve(F, [2.0, 4.0]), [1.0, 1.0])

    def test_two_by_two_hand_solve(self):
        F = factorize(tridiag(2, -1.0, 8.0, -1.0))
        np.testing.assert_allclose(solve(F, [7.0, 7.0]), [1.0, 1.0], atol=1e-14)

    @pytest.mark.parametrize(
        "build",
        [
            lambda: tridiag(200, -1.0, 8.0, -1.0),  # tridiag-spd
            lambda: block_tridiag(10, tridiag(10, -1.0, 8.0, -1.0)),  # banded-spd
            lambda: Matrix(np.random.default_rng(0).normal(size=(30, 30)) + 30 * np.eye(30)),
            lambda: tridiag(150, -1.0, 8.0, -2.0),  # tridiag-lu
        ],
    )
    def test_factorization_invariant(self, build):
        A = build()
        rng = np.random.default_rng(7)
        r = rng.normal(size=A.n)
        F = factorize(A)
        y = F.solve(r)
        assert np.linalg.norm(A @ y - r) <= 1e-10 * (1.0 + np.linalg.norm(r))

    def test_transpose_solve(self):
        rng = np.random.default_rng(3)
        arr = rng.normal(size=(20, 20)) + 20 * np.eye(20)
        A = Matrix(arr)
        r = rng.normal(size=20)
        y = factorize(A).solve(r, transpose=True)
        np.testing.assert_allclose(arr.T @ y, r, atol=1e-10)

    def test_transpose_solve_tridiag_lu(self):
        A = tridiag(120, -1.0, 8.0, -3.0)
        rng = np.random.default_rng(4)
        r = rng.normal(size=120)
        y = factorize(A).solve(r, transpose=True)
        np.testing.assert_allclose(A.toarray().T @ y, r, atol=1e-10)

    def test_sparse_lu_wide_pattern(self):
        import scipy.sparse as sp

        rng = np.random.default_rng(5)
        n = 300
        base = sp.random_array((n, n), density=0.01, rng=rng, format="csr")
        A = Matrix(base + 50 * sp.eye_array(n, format="csr"))
        F = factorize(A)
        assert F.variant == "sparse-lu"
        r = rng.normal(size=n)
        y = F.solve(r)
        assert np.linalg.norm(A @ y - r) <= 1e-10 * (1.0 + np.linalg.norm(r))

    def test_counter_increments(self):
        before = factorization_count()
        factorize(Matrix.identity(5))
        assert factorization_count() == before + 1


@settings(deadline=None, max_examples=25)
@given(
    n=st.integers(min_value=2, max_value=50),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
def test_random_spd_tridiag_solve_accuracy(n, seed):
    rng = np.random.default_rng(seed)
    off = rng.uniform(-1.0, 1.0)
    diag = abs(off) * 2 + rng.uniform(0.5, 4.0)
    A = tridiag(n, off, diag, off)
    assert A.spd_hint
    r = rng.normal(size=n)
    y = solve(factorize(A), r)
    assert np.linalg.norm(A @ y - r) <= 1e-10 * max(np.linalg.norm(r), 1e-30)


class TestSignDiag:
    def test_examples(self):
        np.testing.assert_array_equal(
            sign_diag_apply([-3.0, 0.0, 2.0], [1.0, 1.0, 1.0]), [-1.0, 0.0, 1.0]
        )
        np.testing.assert_array_equal(
            sign_diag_apply([-3.0, 0.0, 2.0], [-3.0, 0.0, 2.0]), [3.0, 0.0, 2.0]
        )
        np.testing.assert_array_equal(sign_diag_apply([5.0], [-2.0]), [-2.0])

    def test_length_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            sign_diag_apply([1.0, 2.0], [1.0])

    @settings(deadline=None, max_examples=50)
    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=30
        )
    )
    def test_applied_to_itself_is_abs(self, xs):
        x = np.array(xs)
        np.testing.assert_array_equal(sign_diag_apply(x, x), np.abs(x))


class TestNorm2:
    def test_examples(self):
        assert norm2([3.0, 4.0]) == 5.0
        assert norm2(np.zeros(7)) == 0.0
        assert norm2(np.ones(4)) == 2.0


class TestMatrixValidation:
    def test_rectangular_rejected(self):
        with pytest.raises(InvalidDimensionError):
            Matrix(np.zeros((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Matrix(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_csr_canonicalized(self):
        import scipy.sparse as sp

        coo = sp.coo_array(
            (np.array([1.0, 2.0, 3.0]), (np.array([0, 0, 1]), np.array([1, 1, 0]))),
            shape=(2, 2),
        )
        A = Matrix(coo)
        np.testing.assert_array_equal(A.toarray(), [[0.0, 3.0], [3.0, 0.0]])

    def test_factorization_repr_kinds(self):
        assert factorize(tridiag(3, -1.0, 8.0, -1.0)).kind == "cholesky"
        assert factorize(tridiag(100, -1.0, 8.0, -1.0)).kind == "cholesky"
        assert factorize(tridiag(100, -1.0, 8.0, -2.0)).kind == "lu-with-partial-pivoting"
        F = factorize(Matrix(np.array([[2.0, 1.0], [0.0, 1.0]])))
        assert isinstance(F, Factorization)
        assert F.kind == "lu-with-partial-pivoting"
