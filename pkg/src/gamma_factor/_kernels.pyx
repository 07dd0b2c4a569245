# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Jacobi eigensolver, one-sided Jacobi SVD and
alternating maximization of multilinear forms over products of l_q balls.

Function for function identical in contract to ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign, pow, isinf

cnp.import_array()

NAME = "cython"


def jacobi_eigh(a, double tol, int max_sweeps):
    cdef double[:, ::1] A = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = A.shape[0]
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] V = v_arr
    cdef Py_ssize_t i, j, p, q, k
    cdef double fro = 0.0, off, target, apq, theta, t, c, s, x, y, g, h
    cdef int sweeps = 0
    for i in range(n):
        for j in range(n):
            fro += A[i, j] * A[i, j]
    target = tol * sqrt(fro)
    for sweeps in range(1, max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j] * A[i, j]
        if sqrt(off) <= target:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                g = 100.0 * fabs(apq)
                if fabs(A[p, p]) + g == fabs(A[p, p]) and fabs(A[q, q]) + g == fabs(A[q, q]):
                    # negligible against both diagonal entries
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                h = A[q, q] - A[p, p]
                if fabs(h) + g == fabs(h):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = A[k, p]
                    y = A[k, q]
                    A[k, p] = c * x - s * y
                    A[k, q] = s * x + c * y
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * y
                    A[q, k] = s * x + c * y
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = A[i, i]
    return w, v_arr, sweeps


def jacobi_svd(a, double tol, int max_sweeps):
    w_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] W = w_arr
    cdef Py_ssize_t m = W.shape[0], n = W.shape[1]
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] V = v_arr
    cdef Py_ssize_t p, q, k
    cdef double alpha, beta, gamma, zeta, t, c, s, x, y
    cdef int sweeps = 0
    cdef bint rotated
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(m):
                    alpha += W[k, p] * W[k, p]
                    beta += W[k, q] * W[k, q]
                    gamma += W[k, p] * W[k, q]
                if gamma == 0.0 or fabs(gamma) <= tol * sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = copysign(1.0, zeta) / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    x = W[k, p]
                    y = W[k, q]
                    W[k, p] = c * x - s * y
                    W[k, q] = s * x + c * y
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
        if not rotated:
            break
    return w_arr, v_arr, sweeps


cdef void _contract(const double[::1] coeffs, const Py_ssize_t[::1] shape,
                    const Py_ssize_t[::1] offs, const double[::1] xs,
                    Py_ssize_t skip, double[::1] out) noexcept nogil:
    cdef Py_ssize_t nmodes = shape.shape[0]
    cdef Py_ssize_t total = coeffs.shape[0]
    cdef Py_ssize_t idx[32]
    cdef Py_ssize_t i, k, r
    cdef double prod
    for k in range(nmodes):
        idx[k] = 0
    for k in range(out.shape[0]):
        out[k] = 0.0
    for i in range(total):
        prod = coeffs[i]
        if prod != 0.0:
            for k in range(nmodes):
                if k != skip:
                    prod = prod * xs[offs[k] + idx[k]]
            if skip >= 0:
                out[idx[skip]] += prod
            else:
                out[0] += prod
        # advance the C-order multi-index
        r = nmodes - 1
        while r >= 0:
            idx[r] += 1
            if idx[r] < shape[r]:
                break
            idx[r] = 0
            r -= 1


def _offsets(shape):
    sh = np.ascontiguousarray(shape, dtype=np.intp)
    if sh.shape[0] > 32:
        raise ValueError("at most 32 tensor modes are supported")
    offs = np.zeros(sh.shape[0] + 1, dtype=np.intp)
    offs[1:] = np.cumsum(sh)
    return sh, offs


def contract_except(coeffs, shape, xs_flat, Py_ssize_t skip):
    sh, offs = _offsets(shape)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64).ravel()
    cdef const double[::1] xs = np.ascontiguousarray(xs_flat, dtype=np.float64)
    out = np.zeros(sh[skip], dtype=np.float64)
    _contract(c, sh, offs, xs, skip, out)
    return out


def form_value(coeffs, shape, xs_flat):
    sh, offs = _offsets(shape)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64).ravel()
    cdef const double[::1] xs = np.ascontiguousarray(xs_flat, dtype=np.float64)
    out = np.zeros(1, dtype=np.float64)
    _contract(c, sh, offs, xs, -1, out)
    return float(out[0])


cdef double _ball_argmax(double[::1] c, double q, double[::1] x) noexcept nogil:
    # writes the maximizer of <c, x> over the unit l_q ball into x (unless c == 0
    # for 1 < q < inf, in which case x is left alone) and returns the max value
    cdef Py_ssize_t j, d = c.shape[0], best = 0
    cdef double val = 0.0, a, qs
    if q == 1.0:
        for j in range(d):
            if fabs(c[j]) > fabs(c[best]):
                best = j
        for j in range(d):
            x[j] = 0.0
        x[best] = 1.0 if c[best] >= 0.0 else -1.0
        return fabs(c[best])
    if isinf(q):
        for j in range(d):
            x[j] = 1.0 if c[j] >= 0.0 else -1.0
            val += fabs(c[j])
        return val
    qs = q / (q - 1.0)
    for j in range(d):
        val += pow(fabs(c[j]), qs)
    val = pow(val, 1.0 / qs)
    if val == 0.0:
        return 0.0
    for j in range(d):
        a = pow(fabs(c[j]) / val, qs - 1.0)
        x[j] = copysign(a, c[j]) if c[j] != 0.0 else 0.0
    return val


def alt_max(coeffs, shape, exps, xs0, int max_sweeps, double tol):
    sh, offs = _offsets(shape)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64).ravel()
    xs_arr = np.array(xs0, dtype=np.float64, order="C", copy=True)
    cdef double[::1] xs = xs_arr
    cdef const double[::1] q = np.ascontiguousarray(exps, dtype=np.float64)
    cdef Py_ssize_t nmodes = sh.shape[0], k
    cdef Py_ssize_t[::1] shv = sh
    cdef Py_ssize_t[::1] offv = offs
    cdef double value = -np.inf, prev
    cdef int sweeps = 0
    bufs = [np.zeros(d, dtype=np.float64) for d in sh]
    cdef double[::1] buf
    for sweeps in range(1, max_sweeps + 1):
        prev = value
        for k in range(nmodes):
            buf = bufs[k]
            _contract(c, shv, offv, xs, k, buf)
            value = _ball_argmax(buf, q[k], xs[offv[k]:offv[k + 1]])
        if value - prev <= tol * (1.0 + fabs(value)):
            break
    return value, xs_arr, sweeps
