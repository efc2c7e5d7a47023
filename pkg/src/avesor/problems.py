"""Benchmark problem generators and MatrixMarket / vector file ingestion.

Generated problems use the alternating true solution x* = (-1, 1, -1, ...),
so b = A x* - |x*| makes x* the exact solution of A x - |x| - b = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DomainError, InvalidDimensionError, MatrixMarketFormatError
from .linalg import DENSE_CUTOFF, Matrix, as_vector, block_tridiag, tridiag
from .solvers import residual

__all__ = [
    "AveProblem",
    "alternating_solution",
    "build_b",
    "gen_ex41",
    "gen_ex42",
    "load_matrix_market",
    "save_matrix_market",
    "load_vector",
]


@dataclass
class AveProblem:
    """One absolute value equation instance: A x - |x| - b = 0.

    ``x_star`` is the known true solution when the problem was generated;
    ``nu`` caches ||A^{-1}||_2 when it is known up front.
    """

    A: Matrix
    b: np.ndarray
    x_star: np.ndarray | None = None
    nu: float | None = None
    label: str = ""

    def __post_init__(self):
        self.b = as_vector(self.b, self.A.n, "b")
        if self.x_star is not None:
            self.x_star = as_vector(self.x_star, self.A.n, "x_star")
            r = residual(self.A, self.b, self.x_star)
            if r > 1e-10:
                raise DomainError(f"claimed solution has residual {r:.3e} > 1e-10")
        if self.nu is not None and not 0.0 < self.nu < 1.0:
            raise DomainError(f"cached nu must lie in (0, 1), got {self.nu!r}")

    @property
    def n(self):
        return self.A.n


def alternating_solution(n):
    """The vector (-1, 1, -1, 1, ...) of length n."""
    x = np.ones(n)
    x[::2] = -1.0
    return x


def build_b(A, x_star):
    """Right-hand side b = A x* - |x*| making x* the exact solution."""
    if not isinstance(A, Matrix):
        A = Matrix(A)
    x_star = as_vector(x_star, A.n, "x_star")
    return A @ x_star - np.abs(x_star)


def gen_ex41(n):
    """Tridiagonal test problem: A = tridiag(-1, 8, -1) of order n."""
    if n < 2:
        raise InvalidDimensionError("problem order must be at least 2")
    A = tridiag(n, -1.0, 8.0, -1.0)
    xs = alternating_solution(n)
    return AveProblem(A, build_b(A, xs), x_star=xs, label=f"ex41:{n}")


def gen_ex42(m):
    """Block tridiagonal test problem of order m^2.

    The diagonal blocks are tridiag(-1, 8, -1) of order m and the
    off-diagonal blocks are -I.
    """
    if m < 2:
        raise InvalidDimensionError("block count must be at least 2")
    S = tridiag(m, -1.0, 8.0, -1.0)
    A = block_tridiag(m, S)
    xs = alternating_solution(m * m)
    return AveProblem(A, build_b(A, xs), x_star=xs, label=f"ex42:{m}")


def _tokenize(path):
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        for line_no, raw in enumerate(fh, start=1):
            yield line_no, raw.rstrip("\n")


def load_matrix_market(path):
    """Read a real square matrix from a MatrixMarket file.

    Supports coordinate and array formats with real or integer fields and
    general or symmetric storage (symmetric storage is expanded to full).
    The SPD hint is set when the header declares symmetry and either a
    strict diagonal-dominance scan or a Cholesky probe succeeds.
    """
    lines = _tokenize(path)
    try:
        line_no, header = next(lines)
    except StopIteration:
        raise MatrixMarketFormatError("empty file") from None
    parts = header.split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket" or parts[1].lower() != "matrix":
        raise MatrixMarketFormatError("malformed MatrixMarket header", line_no)
    layout, fieldkind, symmetry = (p.lower() for p in parts[2:5])
    if layout not in ("coordinate", "array"):
        raise MatrixMarketFormatError(f"unsupported layout {layout!r}", line_no)
    if fieldkind in ("complex", "pattern"):
        raise MatrixMarketFormatError(f"unsupported field {fieldkind!r}", line_no)
    if fieldkind not in ("real", "integer"):
        raise MatrixMarketFormatError(f"unknown field {fieldkind!r}", line_no)
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketFormatError(f"unsupported symmetry {symmetry!r}", line_no)

    size_tokens = None
    for line_no, line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        size_tokens = (line_no, stripped.split())
        break
    if size_tokens is None:
        raise MatrixMarketFormatError("missing size line")
    line_no, tokens = size_tokens

    if layout == "coordinate":
        if len(tokens) != 3:
            raise MatrixMarketFormatError("coordinate size line must be 'rows cols nnz'", line_no)
        try:
            rows, cols, nnz = (int(t) for t in tokens)
        except ValueError:
            raise MatrixMarketFormatError("non-integer size entry", line_no) from None
        if rows != cols:
            raise InvalidDimensionError(f"matrix must be square, got {rows}x{cols}")
        ii, jj, vv = [], [], []
        count = 0
        for line_no, line in lines:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            parts = stripped.split()
            if len(parts) != 3:
                raise MatrixMarketFormatError("entry line must be 'i j value'", line_no)
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise MatrixMarketFormatError("could not parse entry", line_no) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketFormatError(f"index ({i}, {j}) out of range", line_no)
            ii.append(i - 1)
            jj.append(j - 1)
            vv.append(v)
            count += 1
        if count != nnz:
            raise MatrixMarketFormatError(f"expected {nnz} entries, found {count}")
        ii = np.array(ii, dtype=np.int64)
        jj = np.array(jj, dtype=np.int64)
        vv = np.array(vv, dtype=np.float64)
        if symmetry == "symmetric":
            # one triangle per entry: (i, j) and (j, i) would collide on expansion
            key = np.stack([np.minimum(ii, jj), np.maximum(ii, jj)])
        else:
            key = np.stack([ii, jj])
        if ii.size and np.unique(key, axis=1).shape[1] != ii.size:
            raise MatrixMarketFormatError("duplicate entries in coordinate data")
        if symmetry == "symmetric":
            off = ii != jj
            ii, jj, vv = (
                np.concatenate([ii, jj[off]]),
                np.concatenate([jj, ii[off]]),
                np.concatenate([vv, vv[off]]),
            )
        csr = sp.coo_array((vv, (ii, jj)), shape=(rows, cols)).tocsr()
    else:
        if len(tokens) != 2:
            raise MatrixMarketFormatError("array size line must be 'rows cols'", line_no)
        try:
            rows, cols = (int(t) for t in tokens)
        except ValueError:
            raise MatrixMarketFormatError("non-integer size entry", line_no) from None
        if rows != cols:
            raise InvalidDimensionError(f"matrix must be square, got {rows}x{cols}")
        values = []
        for line_no, line in lines:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            try:
                values.append(float(stripped.split()[0]))
            except ValueError:
                raise MatrixMarketFormatError("could not parse array value", line_no) from None
        if symmetry == "symmetric":
            expected = rows * (rows + 1) // 2
            if len(values) != expected:
                raise MatrixMarketFormatError(
                    f"expected {expected} packed values, found {len(values)}"
                )
            dense = np.zeros((rows, cols))
            pos = 0
            for j in range(cols):
                counted = rows - j
                dense[j:, j] = values[pos : pos + counted]
                pos += counted
            dense = dense + np.tril(dense, -1).T
        else:
            if len(values) != rows * cols:
                raise MatrixMarketFormatError(
                    f"expected {rows * cols} values, found {len(values)}"
                )
            dense = np.array(values).reshape((rows, cols), order="F")
        csr = sp.csr_array(dense)

    spd = symmetry == "symmetric" and _probe_spd(csr)
    if rows < DENSE_CUTOFF:
        return Matrix(csr.toarray(), spd_hint=spd)
    return Matrix(csr, spd_hint=spd)


def _probe_spd(csr):
    d = csr.diagonal()
    if np.any(d <= 0):
        return False
    offsum = np.abs(csr).sum(axis=1) - np.abs(d)
    if np.all(d > offsum):
        return True
    if csr.shape[0] <= 2048:
        try:
            sla.cho_factor(csr.toarray())
            return True
        except sla.LinAlgError:
            return False
    return False


def save_matrix_market(path, A):
    """Write a Matrix as a MatrixMarket coordinate/real/general file."""
    if not isinstance(A, Matrix):
        A = Matrix(A)
    coo = A.tocsr().tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{A.n} {A.n} {coo.nnz}\n")
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def load_vector(path):
    """Read a plain-text vector file, one value per line ('%' comments allowed)."""
    values = []
    for line_no, line in _tokenize(path):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        try:
            values.append(float(stripped))
        except ValueError:
            raise MatrixMarketFormatError("could not parse vector entry", line_no) from None
    if not values:
        raise MatrixMarketFormatError("vector file holds no values")
    return np.array(values, dtype=np.float64)
