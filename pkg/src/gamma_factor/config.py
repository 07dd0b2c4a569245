"""Numerical tolerances and search budgets shared by every module.

Values live on a single mutable :class:`Settings` instance so the CLI (or a
test) can override them in one place::

    from gamma_factor.config import settings, override

    with override(psd_rel_tol=1e-6):
        ...
"""

from __future__ import annotations

import contextlib
import dataclasses
import os
from typing import Iterator


@dataclasses.dataclass
class Settings:
    # cyclic Jacobi stops once off-diagonal Frobenius mass <= eig_tol * ||S||_F
    eig_tol: float = 1e-14
    eig_max_sweeps: int = 64
    svd_tol: float = 1e-15
    svd_max_sweeps: int = 64

    # projected gradient ascent used by multistart_maximize
    fd_step: float = 1e-6
    ascent_max_iter: int = 200

    # alternating maximization of multilinear forms
    alt_max_sweeps: int = 100
    alt_tol: float = 1e-13

    # accepted iff lambda_min(gram(st) - gram(xz)) >= -psd_rel_tol * (1 + tr gram(st))
    psd_rel_tol: float = 1e-8
    # slack allowed when comparing two certified bounds
    norm_rel_tol: float = 1e-9

    # exhaustive vertex enumeration is used when the vertex product is at most this
    vertex_budget: int = 1 << 14
    # p = inf balls have 2**dim vertices
    max_cube_dim: int = 16
    # closed-form l_p -> l_2 embedding constants are brute-force checked up to this dim
    embed_verify_max_dim: int = 8

    # pi upper search: rank cap factor (times max dim)
    rank_cap_factor: int = 2

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


settings = Settings()


@contextlib.contextmanager
def override(**kwargs) -> Iterator[Settings]:
    """Temporarily replace fields of the global settings."""
    old = {k: getattr(settings, k) for k in kwargs}
    for k, v in kwargs.items():
        if not hasattr(settings, k):
            raise AttributeError(f"unknown setting {k!r}")
        setattr(settings, k, v)
    try:
        yield settings
    finally:
        for k, v in old.items():
            setattr(settings, k, v)


def max_threads() -> int:
    """Cap on parallel restarts, from ``GAMMA_FACTOR_THREADS`` (default 1)."""
    raw = os.environ.get("GAMMA_FACTOR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
