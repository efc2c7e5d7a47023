"""Core dense/sparse linear algebra for the absolute value equation solvers.

Matrices are square, real, immutable after construction and stored either
dense (row-major) or in compressed sparse row form; orders below
``DENSE_CUTOFF`` stay dense.  ``factorize`` computes a reusable
factorization once, so that many right-hand sides can be solved against the
same matrix cheaply.  An SPD hint on the matrix selects a Cholesky-type
path, everything else goes through LU with partial pivoting.
"""
from __future__ import annotations

import warnings
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack

from .errors import (
    InvalidDimensionError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

__all__ = [
    "DENSE_CUTOFF",
    "Matrix",
    "Factorization",
    "tridiag",
    "block_tridiag",
    "factorize",
    "solve",
    "sign_diag_apply",
    "norm2",
    "as_vector",
    "factorization_count",
]

# Orders below this are stored dense; at or above, compressed sparse row.
DENSE_CUTOFF = 64

# Banded Cholesky storage is (bandwidth+1) * n doubles; beyond this budget a
# sparse SPD matrix falls back to a general sparse LU.
_BANDED_STORAGE_LIMIT = 5_000_000

_factorizations_performed = 0


def factorization_count():
    """Number of factorizations performed since import (test instrumentation)."""
    return _factorizations_performed


def _note_factorization():
    global _factorizations_performed
    _factorizations_performed += 1


def as_vector(v, n=None, name="vector"):
    """Coerce ``v`` to a finite 1-D float64 array, checking its length."""
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidDimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InvalidDimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


class Matrix:
    """Square real matrix, dense or CSR, with an optional SPD hint.

    Instances are immutable after construction and safe to share across
    threads.  Sparse storage is kept canonical: indices sorted, duplicates
    summed, explicit zeros dropped.
    """

    def __init__(self, data, spd_hint=False):
        if sp.issparse(data):
            m = sp.csr_array(data).astype(np.float64)
            m.sum_duplicates()
            m.sort_indices()
            m.eliminate_zeros()
            if m.shape[0] != m.shape[1]:
                raise InvalidDimensionError(f"matrix must be square, got shape {m.shape}")
            if not np.all(np.isfinite(m.data)):
                raise ValueError("matrix contains non-finite entries")
            self._csr = m
            self._dense = None
            self.n = m.shape[0]
        else:
            arr = np.array(data, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise InvalidDimensionError(f"matrix must be square, got shape {arr.shape}")
            if arr.shape[0] == 0:
                raise InvalidDimensionError("matrix order must be at least 1")
            if not np.all(np.isfinite(arr)):
                raise ValueError("matrix contains non-finite entries")
            arr.setflags(write=False)
            self._dense = arr
            self._csr = None
            self.n = arr.shape[0]
        self.spd_hint = bool(spd_hint)

    @classmethod
    def identity(cls, n):
        if n < 1:
            raise InvalidDimensionError("matrix order must be at least 1")
        if n < DENSE_CUTOFF:
            return cls(np.eye(n), spd_hint=True)
        return cls(sp.eye_array(n, format="csr"), spd_hint=True)

    @property
    def is_sparse(self):
        return self._csr is not None

    def toarray(self):
        """Dense copy of the matrix."""
        if self._dense is not None:
            return np.array(self._dense)
        return self._csr.toarray()

    def tocsr(self):
        if self._csr is not None:
            return self._csr
        return sp.csr_array(self._dense)

    def __matmul__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.n:
            raise InvalidDimensionError(f"operand has length {x.shape[0]}, expected {self.n}")
        if self._dense is not None:
            return self._dense @ x
        return self._csr @ x

    def diagonal(self, k=0):
        """The k-th diagonal as a 1-D array (k>0 above the main diagonal)."""
        if self._dense is not None:
            return np.diagonal(self._dense, offset=k).copy()
        return self._csr.diagonal(k=k)

    @cached_property
    def bandwidths(self):
        """(lower, upper) bandwidths of the stored nonzero pattern."""
        if self._csr is not None:
            coo = self._csr.tocoo()
            if coo.nnz == 0:
                return 0, 0
            d = coo.col - coo.row
            return int(max(0, -d.min())), int(max(0, d.max()))
        rows, cols = np.nonzero(self._dense)
        if rows.size == 0:
            return 0, 0
        d = cols - rows
        return int(max(0, -d.min())), int(max(0, d.max()))

    @property
    def is_tridiagonal(self):
        lo, up = self.bandwidths
        return lo <= 1 and up <= 1

    def tridiag_bands(self):
        """(sub, diag, sup) arrays for a tridiagonal matrix."""
        if not self.is_tridiagonal:
            raise InvalidDimensionError("matrix is not tridiagonal")
        return (
            np.ascontiguousarray(self.diagonal(-1)),
            np.ascontiguousarray(self.diagonal(0)),
            np.ascontiguousarray(self.diagonal(1)),
        )

    def add_diagonal(self, d):
        """New matrix ``A + diag(d)``; the SPD hint is not carried over."""
        d = as_vector(d, self.n, "diagonal shift")
        if self._dense is not None:
            out = np.array(self._dense)
            out[np.diag_indices(self.n)] += d
            return Matrix(out)
        return Matrix(self._csr + sp.diags_array(d, format="csr"))

    def is_symmetric(self, tol=0.0):
        if self._dense is not None:
            return bool(np.all(np.abs(self._dense - self._dense.T) <= tol))
        diff = (self._csr - self._csr.T).tocoo()
        return diff.nnz == 0 or bool(np.all(np.abs(diff.data) <= tol))

    def __repr__(self):
        storage = "csr" if self.is_sparse else "dense"
        return f"Matrix(n={self.n}, storage={storage}, spd_hint={self.spd_hint})"


def tridiag(n, sub, diag, sup):
    """Tridiagonal matrix with constant sub/main/super diagonal entries.

    The SPD hint is set for the symmetric, strictly diagonally dominant case
    (``sub == sup`` and ``diag > |sub| + |sup|``).
    """
    if n is None or int(n) < 1:
        raise InvalidDimensionError("matrix order must be at least 1")
    n = int(n)
    spd = (sub == sup) and (diag > abs(sub) + abs(sup))
    if n < DENSE_CUTOFF:
        arr = np.zeros((n, n))
        np.fill_diagonal(arr, diag)
        idx = np.arange(n - 1)
        arr[idx + 1, idx] = sub
        arr[idx, idx + 1] = sup
        return Matrix(arr, spd_hint=spd)
    m = sp.diags_array(
        [np.full(n - 1, float(sub)), np.full(n, float(diag)), np.full(n - 1, float(sup))],
        offsets=(-1, 0, 1),
        format="csr",
    )
    return Matrix(m, spd_hint=spd)


def block_tridiag(m, block):
    """Block tridiagonal matrix with ``block`` on the diagonal and -I off it.

    The result has order m^2 (m blocks of order m).  The SPD hint is set when
    the assembled matrix is symmetric and strictly diagonally dominant with a
    positive diagonal.
    """
    if m is None or int(m) < 1:
        raise InvalidDimensionError("block count must be at least 1")
    m = int(m)
    if not isinstance(block, Matrix):
        block = Matrix(block)
    if block.n != m:
        raise InvalidDimensionError(f"diagonal block must be {m}x{m}, got order {block.n}")
    if m == 1:
        return Matrix(block.toarray(), spd_hint=block.spd_hint)
    eye = sp.eye_array(m, format="csr")
    adj = sp.diags_array([np.ones(m - 1), np.ones(m - 1)], offsets=(-1, 1), format="csr")
    assembled = sp.kron(eye, block.tocsr(), format="csr") + sp.kron(adj, -eye, format="csr")
    spd = _symmetric_diagonally_dominant(assembled)
    if m * m < DENSE_CUTOFF:
        return Matrix(assembled.toarray(), spd_hint=spd)
    return Matrix(assembled, spd_hint=spd)


def _symmetric_diagonally_dominant(csr):
    """Cheap SPD check: symmetric, positive diagonal, strictly dominant rows."""
    csr = sp.csr_array(csr)
    diff = (csr - csr.T).tocoo()
    if diff.nnz and np.any(diff.data):
        return False
    d = csr.diagonal()
    if np.any(d <= 0):
        return False
    offsum = np.abs(csr).sum(axis=1) - np.abs(d)
    return bool(np.all(d > offsum))


class Factorization:
    """Reusable matrix factorization supporting repeated (transpose) solves.

    ``kind`` is "cholesky" or "lu-with-partial-pivoting"; ``variant`` names
    the internal storage form and is used to route tridiagonal systems to the
    fused iteration kernels.
    """

    __slots__ = ("kind", "variant", "n", "data")

    def __init__(self, kind, variant, n, data):
        self.kind = kind
        self.variant = variant
        self.n = n
        self.data = data

    def solve(self, r, transpose=False):
        """Solve A y = r (or A^T y = r) against the factored matrix."""
        r = as_vector(r, self.n, "right-hand side")
        v = self.variant
        if v == "tridiag-spd":
            d, e = self.data
            x, info = lapack.dpttrs(d, e, r)
            _check_lapack_info("dpttrs", info)
            return np.asarray(x, dtype=np.float64).reshape(self.n)
        if v == "tridiag-lu":
            dl, d, du, du2, ipiv = self.data
            x, info = lapack.dgttrs(dl, d, du, du2, ipiv, r, trans="T" if transpose else "N")
            _check_lapack_info("dgttrs", info)
            return np.asarray(x, dtype=np.float64).reshape(self.n)
        if v == "banded-spd":
            return sla.cho_solve_banded((self.data[0], False), r)
        if v == "dense-chol":
            return sla.cho_solve(self.data, r)
        if v == "dense-lu":
            return sla.lu_solve(self.data, r, trans=1 if transpose else 0)
        if v == "sparse-lu":
            return self.data[0].solve(r, trans="T" if transpose else "N")
        raise RuntimeError(f"unknown factorization variant {v!r}")

    def __repr__(self):
        return f"Factorization(kind={self.kind!r}, variant={self.variant!r}, n={self.n})"


def _check_lapack_info(routine, info):
    if info != 0:
        raise RuntimeError(f"{routine} failed with info={info}")


def factorize(A):
    """Factor ``A`` once for repeated solves.

    SPD-hinted matrices take a Cholesky-type route (LDL^T for tridiagonal,
    banded or dense Cholesky otherwise); everything else uses LU with
    partial pivoting.  Raises ``NotPositiveDefiniteError`` on Cholesky
    breakdown and ``SingularMatrixError`` on a singular pivot.
    """
    if not isinstance(A, Matrix):
        raise TypeError("factorize expects a Matrix")
    _note_factorization()
    n = A.n
    if A.spd_hint:
        if A.is_tridiagonal and n >= 2:
            sub, d, _ = A.tridiag_bands()
            df, ef, info = lapack.dpttrf(d, sub)
            if info > 0:
                raise NotPositiveDefiniteError(
                    f"LDL^T factorization broke down at pivot {info}; matrix is not positive definite"
                )
            _check_lapack_info("dpttrf", min(info, 0))
            return Factorization("cholesky", "tridiag-spd", n, (df, ef))
        if not A.is_sparse:
            try:
                c, low = sla.cho_factor(A.toarray(), lower=False)
            except sla.LinAlgError as exc:
                raise NotPositiveDefiniteError(str(exc)) from exc
            return Factorization("cholesky", "dense-chol", n, (c, low))
        lo, up = A.bandwidths
        bw = max(lo, up)
        if (bw + 1) * n <= _BANDED_STORAGE_LIMIT:
            ab = _upper_banded_storage(A, bw)
            try:
                cb = sla.cholesky_banded(ab, lower=False)
            except sla.LinAlgError as exc:
                raise NotPositiveDefiniteError(str(exc)) from exc
            return Factorization("cholesky", "banded-spd", n, (cb,))
        # No sparse Cholesky available; fall back to sparse LU for wide bands.
        return _sparse_lu(A)
    if A.is_tridiagonal and n >= 3:  # the n=2 LAPACK wrapper rejects empty du2
        sub, d, sup = A.tridiag_bands()
        dl, dd, du, du2, ipiv, info = lapack.dgttrf(sub, d, sup)
        if info > 0:
            raise SingularMatrixError(f"zero pivot at position {info}")
        _check_lapack_info("dgttrf", min(info, 0))
        return Factorization("lu-with-partial-pivoting", "tridiag-lu", n, (dl, dd, du, du2, ipiv))
    if A.is_sparse:
        return _sparse_lu(A)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu, piv = sla.lu_factor(A.toarray())
        except sla.LinAlgWarning as exc:
            raise SingularMatrixError(str(exc)) from exc
    if np.any(np.diagonal(lu) == 0.0) or not np.all(np.isfinite(lu)):
        raise SingularMatrixError("LU factorization produced a zero pivot")
    return Factorization("lu-with-partial-pivoting", "dense-lu", A.n, (lu, piv))


def _sparse_lu(A):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp.SparseEfficiencyWarning)
        try:
            lu = spla.splu(sp.csc_matrix(A.tocsr()))
        except RuntimeError as exc:
            raise SingularMatrixError(str(exc)) from exc
    return Factorization("lu-with-partial-pivoting", "sparse-lu", A.n, (lu,))


def _upper_banded_storage(A, bw):
    """Upper banded storage ab[bw + i - j, j] = A[i, j] for j-bw <= i <= j."""
    coo = A.tocsr().tocoo()
    keep = coo.col >= coo.row
    rows = coo.row[keep]
    cols = coo.col[keep]
    vals = coo.data[keep]
    ab = np.zeros((bw + 1, A.n))
    ab[bw + rows - cols, cols] = vals
    return ab


def solve(F, r):
    """Solve against a factorization: y with A y = r."""
    if not isinstance(F, Factorization):
        raise TypeError("solve expects a Factorization")
    return F.solve(r)


def sign_diag_apply(x, v):
    """Apply diag(sgn(x)) to v, with sgn(0) = 0 exactly."""
    x = as_vector(x, name="x")
    v = as_vector(v, name="v")
    if x.shape[0] != v.shape[0]:
        raise InvalidDimensionError(f"length mismatch: {x.shape[0]} vs {v.shape[0]}")
    return np.sign(x) * v


def norm2(v):
    """Euclidean norm."""
    return float(np.linalg.norm(np.asarray(v, dtype=np.float64)))
