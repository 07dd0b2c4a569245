"""Two-sided bounds on  sup |F(x_1, ..., x_k)|  over a product of l_q unit balls.

``F`` is a real multilinear form given by its coefficient array. Injective
norms (balls of the dual spaces), operator norms (domain balls plus the dual
ball of the codomain) and norms of multilinear functionals all reduce to
this one quantity.

Lower bounds come from alternating maximization, which is exact per block:
with all but one argument fixed the form is linear, and the maximum of a
linear functional over an l_q ball is the dual norm of its coefficients.

Upper bounds are certified by one of the routes below; each result records
which one produced it.

``linear``     one argument: the dual norm, exact.
``spectral``   two Euclidean arguments: largest singular value, exact.
``vertex``     all but one argument range over polyhedral balls: the form
               is convex in each argument separately, so its sup is attained
               at extreme points; enumerate them, exact.
``flatten``    route through l_2 with the verified embedding constants and
               bound the Euclidean sup by the spectral norm of a flattening.
``entrywise``  |x_j| <= 1 on any l_q ball, so sup <= sum |coefficients|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .config import settings
from .errors import BudgetError, UnsupportedError
from .numerics import SeededRng, spectral_norm, svd
from .spaces import INF, SpaceSpec, dual_exponent, lp_norm, unit_ball_vertices, vertex_count, verified_embedding_constants


@dataclass
class FormBound:
    value: float
    route: str
    exact: bool
    detail: dict = field(default_factory=dict)


def _dual_norm(c: np.ndarray, q) -> float:
    qs = dual_exponent(q)
    return lp_norm(c, INF if qs == INF else float(qs))


def _ball_normalize(x: np.ndarray, q: float) -> np.ndarray:
    n = lp_norm(x, q)
    if n > 1.0:
        x = x / n
        # guard against the last ulp
        n = lp_norm(x, q)
        if n > 1.0:
            x = x / (n * (1 + 4e-16))
    return x


def sup_lower(
    coeffs: np.ndarray,
    balls: Sequence[SpaceSpec],
    restarts: int,
    rng: SeededRng,
    starts: Sequence[Sequence[np.ndarray]] = (),
) -> tuple[float, list[np.ndarray]]:
    """Best value of |F| found by multistart alternating maximization.

    Returns the value together with the maximizing arguments, each inside its
    ball, with the value recomputed at those arguments.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    shape = tuple(coeffs.shape)
    exps = np.array([b.pf for b in balls], dtype=np.float64)
    kern = _backend.kernels
    best_v, best_x = 0.0, [np.zeros(d) for d in shape]
    if not np.any(coeffs):
        return 0.0, best_x

    def run(x0: np.ndarray):
        nonlocal best_v, best_x
        _, xs, _ = kern.alt_max(coeffs, shape, exps, x0, settings.alt_max_sweeps, settings.alt_tol)
        parts, off = [], 0
        for d, q in zip(shape, exps):
            parts.append(_ball_normalize(xs[off:off + d].copy(), q))
            off += d
        v = abs(kern.form_value(coeffs, shape, np.concatenate(parts)))
        if v > best_v:
            best_v, best_x = v, parts

    for s in list(starts) + list(_structured_starts(coeffs)):
        run(np.concatenate([np.asarray(v, dtype=np.float64) for v in s]))
    for _ in range(restarts):
        run(np.concatenate([rng.normal(d) for d in shape]))
    return best_v, best_x


def _structured_starts(coeffs: np.ndarray):
    # leading left singular vectors of every unfolding
    if coeffs.ndim < 2:
        return []
    vecs = []
    for k in range(coeffs.ndim):
        unf = np.moveaxis(coeffs, k, 0).reshape(coeffs.shape[k], -1)
        u, s, _ = svd(unf)
        vecs.append(u[:, 0] if s.size and s[0] > 0 else np.ones(coeffs.shape[k]))
    return [vecs]


def _bipartitions(n: int):
    # each unordered split of range(n) into two nonempty groups, once
    for mask in range(1, 2 ** (n - 1)):
        left = [k for k in range(n) if mask >> k & 1]
        right = [k for k in range(n) if not mask >> k & 1]
        yield left, right


def euclidean_flatten_bound(coeffs: np.ndarray) -> tuple[float, tuple]:
    """min over flattenings of the spectral norm; bounds the sup over Euclidean balls."""
    n = coeffs.ndim
    if n == 1:
        return float(np.linalg.norm(coeffs)), ((0,), ())
    best, arg = math.inf, None
    for left, right in _bipartitions(n):
        rows = int(np.prod([coeffs.shape[k] for k in left]))
        mat = np.transpose(coeffs, left + right).reshape(rows, -1)
        val = spectral_norm(mat)
        if val < best:
            best, arg = val, (tuple(left), tuple(right))
    return best, arg


def _vertex_enumeration(coeffs: np.ndarray, balls: Sequence[SpaceSpec], free: int) -> float:
    # contract each polyhedral mode with its vertex matrix, then take the
    # dual norm along the free mode
    t = coeffs
    for k, ball in enumerate(balls):
        if k == free:
            continue
        verts = np.array(unit_ball_vertices(ball))
        # the vertex axis takes the place of mode k
        t = np.moveaxis(np.tensordot(verts, t, axes=([1], [k])), 0, k)
    # now t has shape (m_0, ..., d_free, ..., m_{n-1}) with free axis at `free`
    moved = np.moveaxis(t, free, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    qs = dual_exponent(balls[free].p)
    p = INF if qs == INF else float(qs)
    if p == 1:
        vals = np.sum(np.abs(flat), axis=1)
    elif math.isinf(p):
        vals = np.max(np.abs(flat), axis=1)
    elif p == 2:
        vals = np.sqrt(np.sum(flat * flat, axis=1))
    else:
        vals = np.array([lp_norm(r, p) for r in flat])
    return float(vals.max())


def sup_upper(coeffs: np.ndarray, balls: Sequence[SpaceSpec]) -> FormBound:
    """Certified upper bound on sup |F| over the product of balls (best route)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = coeffs.ndim
    if not np.any(coeffs):
        return FormBound(0.0, "zero", True)
    if n == 1:
        return FormBound(_dual_norm(coeffs, balls[0].p), "linear", True)
    if n == 2 and balls[0].euclidean and balls[1].euclidean:
        return FormBound(spectral_norm(coeffs), "spectral", True)

    cands: list[FormBound] = [FormBound(float(np.sum(np.abs(coeffs))), "entrywise", False)]

    # exact enumeration: leave the mode with the most vertices (or a
    # non-polyhedral one) free
    nonpoly = [k for k, b in enumerate(balls) if not b.polyhedral]
    if len(nonpoly) <= 1:
        if nonpoly:
            free = nonpoly[0]
        else:
            free = max(range(n), key=lambda k: (vertex_count(balls[k]) if balls[k].dim <= 62 else math.inf))
        try:
            count = 1
            for k, b in enumerate(balls):
                if k != free:
                    count *= vertex_count(b)
                    if count > settings.vertex_budget:
                        raise BudgetError("vertex budget")
            val = _vertex_enumeration(coeffs, balls, free)
            return FormBound(val, "vertex", True, {"free_mode": free, "vertices": count})
        except BudgetError:
            pass

    try:
        consts = [verified_embedding_constants(b)[0] for b in balls]
        eu, split = euclidean_flatten_bound(coeffs)
        factor = float(np.prod(consts))
        cands.append(FormBound(factor * eu, "flatten", False, {"split": [list(split[0]), list(split[1])], "embedding": consts}))
    except (BudgetError, UnsupportedError):
        pass
    return min(cands, key=lambda b: b.value)


def sup_bounds(
    coeffs: np.ndarray,
    balls: Sequence[SpaceSpec],
    restarts: int,
    rng: SeededRng,
) -> tuple[float, list[np.ndarray], FormBound]:
    """Lower value with maximizers, and certified upper bound."""
    up = sup_upper(coeffs, balls)
    lo, xs = sup_lower(coeffs, balls, restarts, rng)
    if up.exact:
        # the lower search cannot beat an exact value beyond rounding
        lo = min(lo, up.value)
    return lo, xs, up
