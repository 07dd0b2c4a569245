"""Dense linear algebra and seeded stochastic search.

The eigensolver and SVD are Jacobi methods running on the compiled kernel
backend when available (see ``_backend``). ``multistart_maximize`` is a
generic projected-gradient ascent used for black-box sup-type quantities; it
only ever yields lower bounds on a supremum.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .config import settings
from .errors import InputError, SearchError


def _finite_matrix(a, what: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"{what}: expected a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what}: non-finite entries")
    return arr


class SymmetricMatrix:
    """Dense real symmetric matrix; symmetrized as (M + M^T)/2 on construction."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = _finite_matrix(entries, "SymmetricMatrix")
        if arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InputError(f"SymmetricMatrix: expected square dim >= 1, got {arr.shape}")
        sym = (arr + arr.T) / 2.0
        sym.setflags(write=False)
        self.entries = sym

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def __sub__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        return SymmetricMatrix(self.entries - other.entries)

    def __add__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        return SymmetricMatrix(self.entries + other.entries)

    def __mul__(self, c: float) -> "SymmetricMatrix":
        return SymmetricMatrix(self.entries * c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"SymmetricMatrix(dim={self.dim})"


@dataclasses.dataclass(frozen=True)
class SeededRng:
    """Caller-owned deterministic random stream.

    Backed by NumPy's PCG64 bit generator seeded through ``SeedSequence``;
    the same (seed, stream) pair yields the same draws on every platform.
    Sub-streams for parallel restarts come from :meth:`child`.
    """

    seed: int
    stream: tuple[int, ...] = ()
    algorithm: str = "PCG64"

    def __post_init__(self):
        object.__setattr__(
            self,
            "_gen",
            np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.stream))),
        )

    @property
    def generator(self) -> np.random.Generator:
        return self._gen  # type: ignore[attr-defined]

    def child(self, *key: int) -> "SeededRng":
        return SeededRng(self.seed, self.stream + tuple(key))

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def unit_vector(self, dim: int) -> np.ndarray:
        while True:
            v = self.generator.standard_normal(dim)
            nrm = np.linalg.norm(v)
            if nrm > 1e-300:
                return v / nrm


def jacobi_eigh(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Parameters
    ----------
    s : SymmetricMatrix or array_like
        Arrays are symmetrized first.

    Returns
    -------
    eigenvalues : ndarray
        In descending order.
    eigenvectors : ndarray
        Orthonormal columns, ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``.
    """
    if not isinstance(s, SymmetricMatrix):
        s = SymmetricMatrix(s)
    w, v, _ = _backend.kernels.jacobi_eigh(s.entries, settings.eig_tol, settings.eig_max_sweeps)
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])


def min_eigenvalue(s) -> float:
    return float(jacobi_eigh(s)[0][-1])


def _complete_columns(u: np.ndarray, good: np.ndarray) -> np.ndarray:
    # replace columns flagged not-good by unit vectors orthogonal to the rest
    m, k = u.shape
    out = u.copy()
    basis = [out[:, j] for j in range(k) if good[j]]
    for j in range(k):
        if good[j]:
            continue
        for i in range(m):
            cand = np.zeros(m)
            cand[i] = 1.0
            for b in basis:
                cand -= (b @ cand) * b
            for b in basis:  # second pass for numerical orthogonality
                cand -= (b @ cand) * b
            nrm = np.linalg.norm(cand)
            if nrm > 1e-8:
                out[:, j] = cand / nrm
                basis.append(out[:, j])
                break
    return out


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``a = U @ diag(s) @ V.T`` by one-sided Jacobi.

    ``s`` is non-negative and descending, ``U`` is m x k and ``V`` n x k with
    k = min(m, n); both have orthonormal columns.
    """
    arr = _finite_matrix(a, "svd")
    m, n = arr.shape
    if m < n:
        u, s, v = svd(arr.T)
        return v, s, u
    if n == 0:
        return np.zeros((m, 0)), np.zeros(0), np.zeros((0, 0))
    w, v, _ = _backend.kernels.jacobi_svd(arr, settings.svd_tol, settings.svd_max_sweeps)
    s = np.sqrt(np.sum(w * w, axis=0))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    w = w[:, order]
    v = np.ascontiguousarray(v[:, order])
    scale = s[0] if s.size else 0.0
    good = s > max(scale, 1e-300) * 1e-13
    u = np.zeros_like(w)
    u[:, good] = w[:, good] / s[good]
    if not np.all(good):
        u = _complete_columns(u, good)
    return u, s, v


def spectral_norm(a) -> float:
    arr = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if arr.size == 0:
        return 0.0
    return float(svd(arr)[1][0])


def nuclear_norm(a) -> float:
    arr = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if arr.size == 0:
        return 0.0
    return float(np.sum(svd(arr)[1]))


# -- multistart projected gradient ascent -----------------------------------

Block = tuple[int, str]  # (dim, "sphere" | "ball")


def _project(x: np.ndarray, blocks: Sequence[Block], offs: np.ndarray) -> np.ndarray:
    out = x.copy()
    for (dim, kind), a, b in zip(blocks, offs[:-1], offs[1:]):
        seg = out[a:b]
        nrm = float(np.linalg.norm(seg))
        if kind == "sphere":
            if nrm > 0:
                out[a:b] = seg / nrm
            else:
                out[a:b] = 0.0
                out[a] = 1.0
        elif nrm > 1.0:
            out[a:b] = seg / nrm
    return out


def _random_start(blocks: Sequence[Block], rng: SeededRng) -> np.ndarray:
    parts = []
    for dim, kind in blocks:
        v = rng.unit_vector(dim)
        if kind == "ball":
            v = v * rng.uniform() ** (1.0 / dim)
        parts.append(v)
    return np.concatenate(parts)


def _split(x: np.ndarray, offs: np.ndarray) -> list[np.ndarray]:
    return [x[a:b].copy() for a, b in zip(offs[:-1], offs[1:])]


def multistart_maximize(
    objective: Callable[[list[np.ndarray]], float],
    blocks: Sequence[Block],
    restarts: int,
    rng: SeededRng,
    starts: Sequence[Sequence[np.ndarray]] = (),
    max_iter: int | None = None,
) -> tuple[list[np.ndarray], float]:
    """Maximize a black-box objective over a product of unit spheres/balls.

    Each restart runs projected gradient ascent with central-difference
    gradients and a backtracking step. Explicit ``starts`` are tried before
    the random ones. The best value found is a lower bound on the supremum;
    for a fixed seed the result is nondecreasing in ``restarts``.

    Raises
    ------
    SearchError
        If the objective is non-finite at any probed point.
    """
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    blocks = [(int(d), str(k)) for d, k in blocks]
    for d, k in blocks:
        if d < 1 or k not in ("sphere", "ball"):
            raise InputError(f"bad block ({d}, {k!r})")
    offs = np.concatenate([[0], np.cumsum([d for d, _ in blocks])]).astype(int)
    h = settings.fd_step
    iters = settings.ascent_max_iter if max_iter is None else max_iter

    def f(x: np.ndarray) -> float:
        val = objective(_split(x, offs))
        val = float(val)
        if not math.isfinite(val):
            raise SearchError(f"objective returned {val} at point {x.tolist()}")
        return val

    def ascend(x: np.ndarray) -> tuple[np.ndarray, float]:
        fx = f(x)
        eta = 1.0
        for _ in range(iters):
            g = np.empty_like(x)
            for i in range(x.size):
                e = np.zeros_like(x)
                e[i] = h
                g[i] = (f(x + e) - f(x - e)) / (2 * h)
            gn = float(np.linalg.norm(g))
            if gn < 1e-14:
                break
            improved = False
            while eta > 1e-12:
                y = _project(x + eta * g / gn, blocks, offs)
                fy = f(y)
                if fy > fx:
                    improved = True
                    break
                eta *= 0.5
            if not improved:
                break
            gain = fy - fx
            x, fx = y, fy
            eta = min(eta * 2.0, 4.0)
            if gain <= 1e-15 * (1.0 + abs(fx)):
                break
        return x, fx

    best_x, best_v = None, -math.inf
    candidates = [np.concatenate([np.asarray(p, dtype=np.float64).ravel() for p in s]) for s in starts]
    for x0 in candidates:
        x, v = ascend(_project(x0, blocks, offs))
        if v > best_v:
            best_x, best_v = x, v
    for _ in range(restarts):
        x, v = ascend(_random_start(blocks, rng))
        if v > best_v:
            best_x, best_v = x, v
    return _split(best_x, offs), best_v
