# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coordinate-descent kernel for weighted lasso paths.

Same sweep schedule as the pure-numpy fallback in ``_cd_numpy``: full
cyclic passes alternate with passes over the active set, and a lambda
converges only when a full pass moves no coefficient by ``tol`` or more.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef double _sweep(const double[::1, :] X, double[::1] r, double[::1] beta,
                   const double[::1] weights, const double[::1] col_ss,
                   double lam, const cnp.int64_t[::1] idx,
                   Py_ssize_t count) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t k, j, i
    cdef double z, t, w, ss, b_old, b_new, d
    cdef double z0, z1, z2, z3, z4, z5, z6, z7
    cdef double max_change = 0.0
    for k in range(count):
        j = idx[k]
        ss = col_ss[j]
        if ss == 0.0:
            continue
        b_old = beta[j]
        # Unrolled dot product: independent accumulators let the compiler
        # vectorize the reduction without reassociating a single chain.
        z0 = z1 = z2 = z3 = z4 = z5 = z6 = z7 = 0.0
        i = 0
        while i + 8 <= n:
            z0 += X[i, j] * r[i]
            z1 += X[i + 1, j] * r[i + 1]
            z2 += X[i + 2, j] * r[i + 2]
            z3 += X[i + 3, j] * r[i + 3]
            z4 += X[i + 4, j] * r[i + 4]
            z5 += X[i + 5, j] * r[i + 5]
            z6 += X[i + 6, j] * r[i + 6]
            z7 += X[i + 7, j] * r[i + 7]
            i += 8
        while i < n:
            z0 += X[i, j] * r[i]
            i += 1
        z = (((z0 + z1) + (z2 + z3)) + ((z4 + z5) + (z6 + z7)))
        z += ss * b_old
        w = weights[j]
        if w > 0.0:
            t = lam * w
            if z > t:
                b_new = (z - t) / ss
            elif z < -t:
                b_new = (z + t) / ss
            else:
                b_new = 0.0
        else:
            b_new = z / ss
        if b_new != b_old:
            d = b_old - b_new
            i = 0
            while i + 8 <= n:
                r[i] += d * X[i, j]
                r[i + 1] += d * X[i + 1, j]
                r[i + 2] += d * X[i + 2, j]
                r[i + 3] += d * X[i + 3, j]
                r[i + 4] += d * X[i + 4, j]
                r[i + 5] += d * X[i + 5, j]
                r[i + 6] += d * X[i + 6, j]
                r[i + 7] += d * X[i + 7, j]
                i += 8
            while i < n:
                r[i] += d * X[i, j]
                i += 1
            beta[j] = b_new
            d = fabs(d)
            if d > max_change:
                max_change = d
    return max_change


cdef Py_ssize_t _solve(const double[::1, :] X, double[::1] r, double[::1] beta,
                       const double[::1] weights, const double[::1] col_ss,
                       double lam, double tol, Py_ssize_t max_iter,
                       const cnp.int64_t[::1] full, cnp.int64_t[::1] active,
                       bint* converged) noexcept nogil:
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t sweeps = 0
    cdef Py_ssize_t j, n_active
    cdef double change
    converged[0] = False
    while sweeps < max_iter:
        change = _sweep(X, r, beta, weights, col_ss, lam, full, p)
        sweeps += 1
        if change < tol:
            converged[0] = True
            break
        if sweeps >= max_iter:
            break
        n_active = 0
        for j in range(p):
            if beta[j] != 0.0 or weights[j] == 0.0:
                active[n_active] = j
                n_active += 1
        while sweeps < max_iter:
            change = _sweep(X, r, beta, weights, col_ss, lam, active, n_active)
            sweeps += 1
            if change < tol:
                break
    return sweeps


def cd_path(X, y, weights, lams, double tol, max_iter):
    """Weighted-lasso coordinate descent along a descending lambda path.

    Returns ``(coefs, sweeps, converged)`` with ``coefs`` of shape
    ``(len(lams), p)``; successive lambdas are warm-started.
    """
    X = np.asfortranarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    lams = np.ascontiguousarray(lams, dtype=np.float64)

    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t p = X.shape[1]
    cdef Py_ssize_t n_lam = lams.shape[0]
    cdef Py_ssize_t cap = <Py_ssize_t> max_iter

    col_ss = np.einsum("ij,ij->j", X, X)
    beta = np.zeros(p)
    r = y.copy()
    coefs = np.zeros((n_lam, p))
    sweeps_out = np.zeros(n_lam, dtype=np.int64)
    conv_out = np.zeros(n_lam, dtype=bool)
    full = np.arange(p, dtype=np.int64)
    active = np.empty(p, dtype=np.int64)

    cdef const double[::1, :] X_v = X
    cdef double[::1] y_v = y
    cdef const double[::1] w_v = weights
    cdef const double[::1] lam_v = lams
    cdef const double[::1] ss_v = col_ss
    cdef double[::1] beta_v = beta
    cdef double[::1] r_v = r
    cdef const cnp.int64_t[::1] full_v = full
    cdef cnp.int64_t[::1] active_v = active

    cdef Py_ssize_t idx, sweeps
    cdef bint converged
    for idx in range(n_lam):
        with nogil:
            sweeps = _solve(X_v, r_v, beta_v, w_v, ss_v, lam_v[idx],
                            tol, cap, full_v, active_v, &converged)
        coefs[idx, :] = beta
        sweeps_out[idx] = sweeps
        conv_out[idx] = converged
    return coefs, sweeps_out, conv_out
