"""Pure NumPy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; ``_backend`` picks one at
import time. Inputs are assumed validated (float64, C-contiguous).
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"


def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi on a symmetric matrix. Returns unsorted (w, v, sweeps)."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    offmask = 1.0 - np.eye(n)
    fro = math.sqrt(float(np.sum(a * a)))
    target = tol * fro
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = math.sqrt(float(np.sum((a * offmask) ** 2)))
        if off <= target:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if apq == 0.0:
                    continue
                app = float(a[p, p])
                aqq = float(a[q, q])
                g = 100.0 * abs(apq)
                if abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    # negligible against both diagonal entries
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                h = aqq - app
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, sweeps


def jacobi_svd(a, tol, max_sweeps):
    """One-sided Jacobi on the columns of ``a`` (rows >= cols).

    Returns (w, v, sweeps) where ``a @ v == w`` has mutually orthogonal
    columns; singular values are the column norms of ``w``.
    """
    w = np.array(a, dtype=np.float64, copy=True)
    n = w.shape[1]
    v = np.eye(n)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(w[:, p] @ w[:, p])
                beta = float(w[:, q] @ w[:, q])
                gamma = float(w[:, p] @ w[:, q])
                if gamma == 0.0 or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, q]
                w[:, q] = s * wp + c * w[:, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        if not rotated:
            break
    return w, v, sweeps


def _ball_argmax(c, q):
    # maximizer of <c, x> over the unit l_q ball, and the attained value
    if q == 1.0:
        j = int(np.argmax(np.abs(c)))
        x = np.zeros_like(c)
        val = abs(float(c[j]))
        x[j] = 1.0 if c[j] >= 0 else -1.0
        return x, val
    if math.isinf(q):
        x = np.where(c >= 0, 1.0, -1.0)
        return x, float(np.sum(np.abs(c)))
    qs = q / (q - 1.0)
    a = np.abs(c)
    val = float(np.sum(a ** qs) ** (1.0 / qs))
    if val == 0.0:
        return None, 0.0
    x = np.sign(c) * (a / val) ** (qs - 1.0)
    return x, val


def contract_except(coeffs, shape, xs_flat, skip):
    """Contract ``coeffs`` with every factor vector except slot ``skip``."""
    t = np.asarray(coeffs).reshape(shape)
    offs = np.concatenate([[0], np.cumsum(shape)])
    # contract trailing modes first so axis numbers stay valid
    for k in range(len(shape) - 1, -1, -1):
        if k == skip:
            continue
        t = np.tensordot(t, xs_flat[offs[k]:offs[k + 1]], axes=([k], [0]))
    return np.ascontiguousarray(t, dtype=np.float64)


def form_value(coeffs, shape, xs_flat):
    t = np.asarray(coeffs).reshape(shape)
    offs = np.concatenate([[0], np.cumsum(shape)])
    for k in range(len(shape) - 1, -1, -1):
        t = np.tensordot(t, xs_flat[offs[k]:offs[k + 1]], axes=([k], [0]))
    return float(t)


def alt_max(coeffs, shape, exps, xs0, max_sweeps, tol):
    """Alternating exact maximization of a multilinear form over a product of
    l_q unit balls, starting from ``xs0`` (concatenated factor vectors).

    Returns (value, xs, sweeps).
    """
    xs = np.array(xs0, dtype=np.float64, copy=True)
    offs = np.concatenate([[0], np.cumsum(shape)]).astype(int)
    n = len(shape)
    value = -math.inf
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        prev = value
        for k in range(n):
            c = contract_except(coeffs, shape, xs, k)
            x, val = _ball_argmax(c, exps[k])
            if x is not None:
                xs[offs[k]:offs[k + 1]] = x
            value = val
        if value - prev <= tol * (1.0 + abs(value)):
            break
    return value, xs, sweeps
