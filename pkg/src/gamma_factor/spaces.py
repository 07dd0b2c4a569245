"""Finite-dimensional l_p spaces: descriptors, norms, dual exponents and the
l_p <-> l_2 embedding constants used by the routing bounds."""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from typing import Union

import numpy as np

from .config import settings
from .errors import BudgetError, InputError, UnsupportedError

INF = math.inf
Exponent = Union[Fraction, float]  # a Fraction >= 1, or math.inf


def parse_exponent(p) -> Exponent:
    """Normalize an exponent to a ``Fraction`` or ``math.inf``.

    Accepts ints, Fractions, floats (snapped to the nearest fraction with
    denominator <= 10**6) and strings such as ``"inf"`` or ``"4/3"``.
    """
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return INF
        try:
            p = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad exponent {p!r}") from exc
    if isinstance(p, bool):
        raise InputError(f"bad exponent {p!r}")
    if isinstance(p, float):
        if math.isinf(p) and p > 0:
            return INF
        if not math.isfinite(p):
            raise InputError(f"bad exponent {p!r}")
        p = Fraction(p).limit_denominator(10**6)
    if isinstance(p, int):
        p = Fraction(p)
    if not isinstance(p, Fraction):
        raise InputError(f"bad exponent {p!r}")
    if p < 1:
        raise InputError(f"exponent must be >= 1, got {p}")
    return p


class SpaceSpec:
    """The space l_p^dim over the reals."""

    __slots__ = ("dim", "p")

    def __init__(self, dim: int, p=2):
        if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 1:
            raise InputError(f"dim must be a positive integer, got {dim!r}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "p", parse_exponent(p))

    def __setattr__(self, name, value):
        raise AttributeError("SpaceSpec is immutable")

    @property
    def pf(self) -> float:
        """The exponent as a float."""
        return INF if self.p == INF else float(self.p)

    @property
    def euclidean(self) -> bool:
        return self.p == 2

    @property
    def polyhedral(self) -> bool:
        return self.p == 1 or self.p == INF

    def __eq__(self, other):
        return isinstance(other, SpaceSpec) and self.dim == other.dim and self.p == other.p

    def __hash__(self):
        return hash((self.dim, self.p))

    def __repr__(self):
        return f"SpaceSpec(dim={self.dim}, p={exponent_str(self.p)})"

    def to_json(self) -> dict:
        if self.p == INF:
            p = "inf"
        elif self.p.denominator == 1:
            p = int(self.p)
        else:
            p = float(self.p)
        return {"dim": self.dim, "p": p}

    @classmethod
    def from_json(cls, obj) -> "SpaceSpec":
        if not isinstance(obj, dict) or "dim" not in obj or "p" not in obj:
            raise InputError(f"SpaceSpec JSON needs 'dim' and 'p', got {obj!r}")
        return cls(obj["dim"], obj["p"])


def exponent_str(p: Exponent) -> str:
    return "inf" if p == INF else str(p)


def euclidean(dim: int) -> SpaceSpec:
    return SpaceSpec(dim, 2)


def dual_exponent(p: Exponent) -> Exponent:
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def dual_space(space: SpaceSpec) -> SpaceSpec:
    return SpaceSpec(space.dim, dual_exponent(space.p))


def as_vector(space: SpaceSpec, v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != space.dim:
        raise InputError(f"vector of shape {arr.shape} does not match {space!r}")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector has non-finite entries")
    return arr


def lp_norm(v: np.ndarray, p: float) -> float:
    a = np.abs(np.asarray(v, dtype=np.float64))
    if a.size == 0:
        return 0.0
    if p == 1:
        return float(a.sum())
    if math.isinf(p):
        return float(a.max())
    if p == 2:
        return float(math.sqrt(float(a @ a)))
    m = float(a.max())
    if m == 0.0:
        return 0.0
    return m * float(np.sum((a / m) ** p) ** (1.0 / p))


def norm(space: SpaceSpec, v) -> float:
    return lp_norm(as_vector(space, v), space.pf)


def unit_ball_vertices(space: SpaceSpec) -> list[np.ndarray]:
    """Extreme points of a polyhedral unit ball (p = 1 or p = inf)."""
    d = space.dim
    if space.p == 1:
        out = []
        for k in range(d):
            for s in (1.0, -1.0):
                e = np.zeros(d)
                e[k] = s
                out.append(e)
        return out
    if space.p == INF:
        if d > settings.max_cube_dim:
            raise BudgetError(f"l_inf^{d} has 2^{d} vertices (cap 2^{settings.max_cube_dim})")
        return [np.array(s, dtype=np.float64) for s in itertools.product((1.0, -1.0), repeat=d)]
    raise UnsupportedError(f"unit ball of l_{exponent_str(space.p)} is not polyhedral")


def vertex_count(space: SpaceSpec) -> int:
    if space.p == 1:
        return 2 * space.dim
    if space.p == INF:
        return 2**space.dim
    raise UnsupportedError("not polyhedral")


# -- embedding constants ---------------------------------------------------------


def _ratio_exponent(space: SpaceSpec) -> float:
    # 1/2 - 1/p, with 1/inf = 0
    return 0.5 - (0.0 if space.p == INF else 1.0 / float(space.p))


def to_l2_constant(space: SpaceSpec) -> float:
    """sup { ||x||_2 : ||x||_p <= 1 } = max(1, d^(1/2 - 1/p))."""
    return max(1.0, space.dim ** _ratio_exponent(space))


def from_l2_constant(space: SpaceSpec) -> float:
    """sup { ||x||_p : ||x||_2 <= 1 } = max(1, d^(1/p - 1/2))."""
    return max(1.0, space.dim ** (-_ratio_exponent(space)))


def brute_force_embedding(space: SpaceSpec, restarts: int = 16, seed: int = 0) -> tuple[float, float]:
    """Numerically maximize ||x||_2/||x||_p and ||x||_p/||x||_2.

    Exact by vertex enumeration when the l_p ball is polyhedral (the ratio
    is a convex function maximized at an extreme point); otherwise a
    multistart search plus the structured candidates (basis vectors and the
    all-ones vector), giving lower bounds on both constants.
    """
    from .numerics import SeededRng, multistart_maximize

    d, p = space.dim, space.pf
    cands = [np.eye(d)[0], np.ones(d) / math.sqrt(d)]
    if space.p == 1 or (space.p == INF and d <= settings.max_cube_dim):
        up = max(lp_norm(v, 2.0) for v in unit_ball_vertices(space))
    else:
        up = None
    rng = SeededRng(seed)

    def to_l2(xs):
        return 1.0 / lp_norm(xs[0], p)

    def from_l2(xs):
        return lp_norm(xs[0], p)

    blocks = [(d, "sphere")]
    if up is None:
        _, up = multistart_maximize(to_l2, blocks, restarts, rng, starts=[[c] for c in cands], max_iter=60)
    _, down = multistart_maximize(from_l2, blocks, restarts, rng, starts=[[c] for c in cands], max_iter=60)
    return up, down


@functools.lru_cache(maxsize=None)
def verified_embedding_constants(space: SpaceSpec) -> tuple[float, float]:
    """Closed-form embedding constants, cross-checked against brute force.

    Raises
    ------
    BudgetError
        If ``space.dim`` exceeds ``settings.embed_verify_max_dim``.
    UnsupportedError
        If the brute-force values disagree with the closed forms.
    """
    if space.dim > settings.embed_verify_max_dim:
        raise BudgetError(
            f"embedding constants are only verified up to dim {settings.embed_verify_max_dim}, got {space.dim}"
        )
    up_cf, down_cf = to_l2_constant(space), from_l2_constant(space)
    if space.euclidean:
        return up_cf, down_cf
    up_bf, down_bf = brute_force_embedding(space)
    for name, cf, bf in (("to_l2", up_cf, up_bf), ("from_l2", down_cf, down_bf)):
        if bf > cf * (1 + 1e-9) or bf < cf * (1 - 1e-6):
            raise UnsupportedError(f"{name} constant for {space!r}: closed form {cf} vs brute force {bf}")
    return up_cf, down_cf
