# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Arimoto sweeps for E0, Blahut-Arimoto, simplex grid search."""

import numpy as np

from libc.math cimport pow, log, exp, log1p, INFINITY

cdef double LN2 = 0.6931471805599453


def arimoto_sweep(const double[::1] rhos, const double[:, ::1] W, const double[::1] p0,
                  double tol, long max_iter):
    """Warm-started Arimoto iterations for E0(rho, W) at each rho in order.

    Returns (values, probs, bounds, iters); ``bounds`` is a certified upper
    bound on E0(rho, W) - values in bits.
    """
    cdef Py_ssize_t n = rhos.shape[0]
    cdef Py_ssize_t nx = W.shape[0]
    cdef Py_ssize_t ny = W.shape[1]
    values_arr = np.zeros(n)
    probs_arr = np.empty((n, nx))
    bounds_arr = np.zeros(n)
    iters_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] values = values_arr
    cdef double[:, ::1] probs = probs_arr
    cdef double[::1] bounds = bounds_arr
    cdef long long[::1] iters = iters_arr

    cdef double[:, ::1] a = np.empty((nx, ny))
    cdef double[::1] al = np.empty(ny)
    cdef double[::1] lw = np.empty(ny)
    cdef double[::1] w = np.empty(ny)
    cdef double[::1] beta = np.empty(nx)
    cdef double[::1] r = np.empty(nx)
    cdef double[::1] p = np.array(p0, dtype=np.float64, copy=True)

    cdef Py_ssize_t k, x, y
    cdef long it
    cdef double rho, s, m, F, bmin, gap, rmax, tot, v, bnd
    for k in range(n):
        rho = rhos[k]
        if rho <= 0.0:
            values[k] = 0.0
            bounds[k] = 0.0
            for x in range(nx):
                probs[k, x] = p[x]
            continue
        s = 1.0 / (1.0 + rho)
        for x in range(nx):
            for y in range(ny):
                a[x, y] = pow(W[x, y], s) if W[x, y] > 0.0 else 0.0
        it = 0
        while True:
            m = -INFINITY
            for y in range(ny):
                v = 0.0
                for x in range(nx):
                    v += p[x] * a[x, y]
                al[y] = v
                if v > 0.0:
                    lw[y] = rho * log(v)
                    if lw[y] > m:
                        m = lw[y]
                else:
                    lw[y] = -INFINITY
            F = 0.0
            for y in range(ny):
                w[y] = exp(lw[y] - m) if al[y] > 0.0 else 0.0
                F += al[y] * w[y]
            bmin = INFINITY
            for x in range(nx):
                v = 0.0
                for y in range(ny):
                    v += a[x, y] * w[y]
                beta[x] = v
                if v < bmin:
                    bmin = v
            gap = (1.0 + rho) * (1.0 - bmin / F)
            if gap < 1.0:
                bnd = -log1p(-gap) / LN2
            else:
                bnd = INFINITY
            if bnd <= tol or it >= max_iter:
                break
            rmax = -INFINITY
            for x in range(nx):
                if p[x] > 0.0 and beta[x] > 0.0:
                    r[x] = -log(beta[x] / F) / rho
                    if r[x] > rmax:
                        rmax = r[x]
            tot = 0.0
            for x in range(nx):
                if p[x] > 0.0 and beta[x] > 0.0:
                    p[x] = p[x] * exp(r[x] - rmax)
                else:
                    p[x] = 0.0
                tot += p[x]
            for x in range(nx):
                p[x] /= tot
            it += 1
        values[k] = -(log(F) + m) / LN2
        bounds[k] = bnd if bnd > 0.0 else 0.0
        iters[k] = it
        for x in range(nx):
            probs[k, x] = p[x]
    return values_arr, probs_arr, bounds_arr, iters_arr


def blahut_arimoto(const double[:, ::1] W, const double[::1] p0, double tol, long max_iter):
    """Capacity in bits. Returns (capacity, p, gap, iters)."""
    cdef Py_ssize_t nx = W.shape[0]
    cdef Py_ssize_t ny = W.shape[1]
    cdef double[::1] p = np.array(p0, dtype=np.float64, copy=True)
    cdef double[::1] q = np.empty(ny)
    cdef double[::1] d = np.empty(nx)
    cdef Py_ssize_t x, y
    cdef long it = 0
    cdef double v, dmax, lo, hi, tot
    while True:
        for y in range(ny):
            v = 0.0
            for x in range(nx):
                v += p[x] * W[x, y]
            q[y] = v
        dmax = -INFINITY
        for x in range(nx):
            v = 0.0
            for y in range(ny):
                if W[x, y] > 0.0:
                    v += W[x, y] * log(W[x, y] / q[y])
            d[x] = v
            if v > dmax:
                dmax = v
        tot = 0.0
        for x in range(nx):
            tot += p[x] * exp(d[x] - dmax)
        lo = dmax + log(tot)
        hi = dmax
        if (hi - lo) / LN2 <= tol or it >= max_iter:
            break
        for x in range(nx):
            p[x] = p[x] * exp(d[x] - dmax) / tot
        it += 1
    return lo / LN2, np.asarray(p), (hi - lo) / LN2, it


def simplex_grid_min(const double[:, ::1] M, long resolution):
    """Minimize p' M p over the grid {c / resolution : sum c = resolution}."""
    cdef Py_ssize_t k = M.shape[0]
    cdef double[::1] c = np.zeros(k)
    cdef double[::1] best = np.zeros(k)
    cdef Py_ssize_t i, j
    cdef long total = 0
    cdef double v, vbest = INFINITY
    cdef double n = <double>resolution
    if k == 1:
        return M[0, 0], np.ones(1)
    while True:
        c[k - 1] = resolution - total
        v = 0.0
        for i in range(k):
            if c[i] != 0.0:
                for j in range(k):
                    v += c[i] * c[j] * M[i, j]
        if v < vbest:
            vbest = v
            for i in range(k):
                best[i] = c[i]
        j = k - 2
        while j >= 0:
            c[j] += 1.0
            total += 1
            if total <= resolution:
                break
            total -= <long>c[j]
            c[j] = 0.0
            j -= 1
        if j < 0:
            break
    out = np.asarray(best) / n
    return vbest / (n * n), out
