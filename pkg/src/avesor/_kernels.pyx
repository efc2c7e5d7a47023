# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: the (nu, omega) derivative scan and the fused
SOR-like tridiagonal iteration.  Mirrors avesor._fallback exactly; the
tridiagonal factor arrays come from avesor.linalg.factorize and the solves
go through the same LAPACK routines, so both backends produce identical
iterates.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, fabs, isfinite, sqrt
from scipy.linalg.cython_lapack cimport dgttrs, dpttrs

cnp.import_array()

BACKEND_NAME = "compiled"


def g1prime_grid(nus_in, omegas_in):
    """Slope of the decreasing-branch derivative of g on a (nu, omega) grid.

    Same contract as the fallback: NaN marks grid points where the radicand
    under the square root is not positive.
    """
    cdef double[::1] nus = np.ascontiguousarray(nus_in, dtype=np.float64)
    cdef double[::1] omegas = np.ascontiguousarray(omegas_in, dtype=np.float64)
    cdef Py_ssize_t ni = nus.shape[0], nj = omegas.shape[0], i, j
    out = np.empty((ni, nj), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double nu, w, wm1, r, s, sp, rad, lroot, upper, corr
    with nogil:
        for i in range(ni):
            nu = nus[i]
            for j in range(nj):
                w = omegas[j]
                wm1 = w - 1.0
                r = 3.0 * wm1 * wm1 + 2.0 * nu * nu * w * w * w * w \
                    + 2.0 * nu * w * w * (1.0 - w)
                s = 6.0 * wm1 + 8.0 * nu * nu * w * w * w \
                    + 2.0 * nu * (2.0 * w - 3.0 * w * w)
                sp = 6.0 + 24.0 * nu * nu * w * w + 2.0 * nu * (2.0 - 6.0 * w)
                rad = r * r - 4.0 * wm1 * wm1 * wm1 * wm1
                if rad <= 0.0:
                    o[i, j] = NAN
                    continue
                lroot = sqrt(rad)
                upper = s * s + sp * r - 24.0 * wm1 * wm1
                corr = r * s - 8.0 * wm1 * wm1 * wm1
                o[i, j] = sp + upper / lroot - (corr * corr) / (lroot * lroot * lroot)
    return out


cdef double _tridiag_residual(double[::1] sub, double[::1] diag, double[::1] sup,
                              double[::1] b, double[::1] x) nogil:
    cdef Py_ssize_t n = diag.shape[0], i
    cdef double acc = 0.0, t
    for i in range(n):
        t = diag[i] * x[i]
        if i > 0:
            t += sub[i - 1] * x[i - 1]
        if i + 1 < n:
            t += sup[i] * x[i + 1]
        t -= fabs(x[i]) + b[i]
        acc += t * t
    return sqrt(acc)


cdef double _seminorm(double[::1] xstar, double[::1] ystar,
                      double[::1] x, double[::1] y, double winv2) nogil:
    cdef Py_ssize_t n = x.shape[0], i
    cdef double ax = 0.0, ay = 0.0, t
    for i in range(n):
        t = xstar[i] - x[i]
        ax += t * t
        t = ystar[i] - y[i]
        ay += t * t
    return sqrt(ax + winv2 * ay)


def sor_like_tridiag(sub_in, diag_in, sup_in, factor, b_in, double omega,
                     x0, y0, double tol, int max_iter, xstar_in=None):
    """Run the SOR-like iteration for a tridiagonal system (compiled twin).

    See avesor._fallback.sor_like_tridiag for the contract.
    """
    cdef double[::1] sub = np.ascontiguousarray(sub_in, dtype=np.float64)
    cdef double[::1] diag = np.ascontiguousarray(diag_in, dtype=np.float64)
    cdef double[::1] sup = np.ascontiguousarray(sup_in, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef Py_ssize_t n = diag.shape[0]

    x_arr = np.array(x0, dtype=np.float64)
    y_arr = np.array(y0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    z_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] z = z_arr

    cdef bint spd = factor[0] == "spd"
    cdef double[::1] fa, fb, fc, fdu2
    cdef int[::1] fipiv
    cdef double[::1] _empty_d = np.empty(0, dtype=np.float64)
    cdef int[::1] _empty_i = np.empty(0, dtype=np.int32)
    if spd:
        fa = np.ascontiguousarray(factor[1], dtype=np.float64)
        fb = np.ascontiguousarray(factor[2], dtype=np.float64)
        fc = _empty_d
        fdu2 = _empty_d
        fipiv = _empty_i
    else:
        fa = np.ascontiguousarray(factor[1], dtype=np.float64)
        fb = np.ascontiguousarray(factor[2], dtype=np.float64)
        fc = np.ascontiguousarray(factor[3], dtype=np.float64)
        fdu2 = np.ascontiguousarray(factor[4], dtype=np.float64)
        fipiv = np.ascontiguousarray(factor[5], dtype=np.int32)

    cdef bint track_err = xstar_in is not None
    cdef double[::1] xstar = _empty_d
    cdef double[::1] ystar = _empty_d
    cdef double winv2 = 0.0
    if track_err:
        xstar = np.ascontiguousarray(xstar_in, dtype=np.float64)
        ystar = np.abs(np.asarray(xstar_in, dtype=np.float64))
        winv2 = 1.0 / (omega * omega)

    res_hist_arr = np.empty(max_iter + 1, dtype=np.float64)
    cdef double[::1] res_hist = res_hist_arr
    cdef double[::1] err_hist = _empty_d
    err_hist_arr = None
    if track_err:
        err_hist_arr = np.empty(max_iter + 1, dtype=np.float64)
        err_hist = err_hist_arr

    cdef int k = 0, info = 0, nrhs = 1, ldb = <int> n, norder = <int> n
    cdef int breakdown = -1
    cdef char trans = b'N'
    cdef double r
    cdef Py_ssize_t i

    res_hist[0] = _tridiag_residual(sub, diag, sup, b, x)
    if track_err:
        err_hist[0] = _seminorm(xstar, ystar, x, y, winv2)

    while res_hist[k] > tol and k < max_iter:
        with nogil:
            for i in range(n):
                z[i] = y[i] + b[i]
            if spd:
                dpttrs(&norder, &nrhs, &fa[0], &fb[0], &z[0], &ldb, &info)
            else:
                dgttrs(&trans, &norder, &nrhs, &fa[0], &fb[0], &fc[0],
                       &fdu2[0], &fipiv[0], &z[0], &ldb, &info)
        if info != 0:
            breakdown = k + 1
            break
        with nogil:
            for i in range(n):
                x[i] = (1.0 - omega) * x[i] + omega * z[i]
                y[i] = (1.0 - omega) * y[i] + omega * fabs(x[i])
            r = _tridiag_residual(sub, diag, sup, b, x)
        k += 1
        if not isfinite(r):
            breakdown = k
            break
        res_hist[k] = r
        if track_err:
            err_hist[k] = _seminorm(xstar, ystar, x, y, winv2)

    res_out = res_hist_arr[:k + 1].copy()
    err_out = err_hist_arr[:k + 1].copy() if track_err else None
    converged = breakdown < 0 and res_out[-1] <= tol
    return x_arr, y_arr, res_out, err_out, k, bool(converged), breakdown
