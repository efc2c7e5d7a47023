"""Pure numpy/LAPACK implementations of the hot kernels.

Selected at import time by :mod:`avesor._backend` when the compiled
extension is unavailable (or AVESOR_PURE_PYTHON is set).  Signatures and
semantics match :mod:`avesor._kernels` exactly; both factor nothing
themselves, the tridiagonal factor arrays are produced once by
``avesor.linalg.factorize`` and reused across iterations.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

BACKEND_NAME = "python"


def g1prime_grid(nus, omegas):
    """Slope of the decreasing-branch derivative of g on a (nu, omega) grid.

    Returns a (len(nus), len(omegas)) array of

        s' + (s^2 + s' r - 24(w-1)^2)/L - (r s - 8(w-1)^3)^2 / L^3,

    with r = 3(w-1)^2 + 2 nu^2 w^4 + 2 nu w^2 (1-w), s = r' and
    L = sqrt(r^2 - 4(w-1)^4).  Grid points where the radicand is not
    positive are returned as NaN so the caller can record them as skipped.
    """
    nus = np.asarray(nus, dtype=np.float64).reshape(-1, 1)
    omegas = np.asarray(omegas, dtype=np.float64).reshape(1, -1)
    w = omegas
    wm1 = w - 1.0
    r = 3.0 * wm1 ** 2 + 2.0 * nus ** 2 * w ** 4 + 2.0 * nus * w ** 2 * (1.0 - w)
    s = 6.0 * wm1 + 8.0 * nus ** 2 * w ** 3 + 2.0 * nus * (2.0 * w - 3.0 * w ** 2)
    sp = 6.0 + 24.0 * nus ** 2 * w ** 2 + 2.0 * nus * (2.0 - 6.0 * w)
    rad = r * r - 4.0 * wm1 ** 4
    with np.errstate(invalid="ignore", divide="ignore"):
        lroot = np.sqrt(np.where(rad > 0.0, rad, np.nan))
        upper = s * s + sp * r - 24.0 * wm1 ** 2
        corr = (r * s - 8.0 * wm1 ** 3) ** 2
        vals = sp + upper / lroot - corr / lroot ** 3
    return vals


def sor_like_tridiag(sub, diag, sup, factor, b, omega, x0, y0, tol, max_iter, xstar=None):
    """Run the SOR-like iteration for a tridiagonal system.

    ``factor`` is ("spd", d, e) from dpttrf or ("lu", dl, d, du, du2, ipiv)
    from dgttrf; the factorization is reused, never recomputed.  Returns
    (x, y, residual_history, error_norm_history | None, iterations,
    converged, breakdown_step) where breakdown_step is -1 unless a
    non-finite iterate appeared.
    """
    sub = np.asarray(sub)
    diag = np.asarray(diag)
    sup = np.asarray(sup)
    b = np.asarray(b)
    x = np.array(x0, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    if factor[0] == "spd":
        fd, fe = factor[1], factor[2]

        def apply_inverse(rhs):
            out, info = lapack.dpttrs(fd, fe, rhs)
            return np.asarray(out).reshape(-1), info
    else:
        dl, d, du, du2, ipiv = factor[1:]

        def apply_inverse(rhs):
            out, info = lapack.dgttrs(dl, d, du, du2, ipiv, rhs)
            return np.asarray(out).reshape(-1), info

    def res_of(v):
        av = diag * v
        av[:-1] += sup * v[1:]
        av[1:] += sub * v[:-1]
        return float(np.linalg.norm(av - np.abs(v) - b))

    if xstar is not None:
        xstar = np.asarray(xstar)
        ystar = np.abs(xstar)
        winv2 = omega ** -2

        def err_of(xv, yv):
            return float(np.sqrt(np.sum((xstar - xv) ** 2) + winv2 * np.sum((ystar - yv) ** 2)))

    res_hist = [res_of(x)]
    err_hist = [err_of(x, y)] if xstar is not None else None
    k = 0
    breakdown = -1
    while res_hist[-1] > tol and k < max_iter:
        z, info = apply_inverse(y + b)
        if info != 0:
            breakdown = k + 1
            break
        x = (1.0 - omega) * x + omega * z
        y = (1.0 - omega) * y + omega * np.abs(x)
        k += 1
        r = res_of(x)
        if not np.isfinite(r):
            breakdown = k
            break
        res_hist.append(r)
        if err_hist is not None:
            err_hist.append(err_of(x, y))
    res_arr = np.array(res_hist)
    err_arr = np.array(err_hist) if err_hist is not None else None
    converged = bool(breakdown < 0 and res_arr[-1] <= tol)
    return x, y, res_arr, err_arr, k, converged, breakdown
