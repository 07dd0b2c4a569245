"""Multilinear operators T: X_1 x ... x X_n -> Y stored as coefficient tensors.

The coefficient array has shape ``(dim X_1, ..., dim X_n, dim Y)`` and

    T(x^1, ..., x^n)[j] = sum_{i_1..i_n} C[i_1, ..., i_n, j] x^1[i_1] ... x^n[i_n].

Contracting the same array against a dense tensor u instead of an
elementary one gives the linearization, and restricting that to elementary
tensors gives the Sigma-operator f_T.

Codomains are either an l_p space (``SpaceSpec``) or a tensor product
(``TensorSpace``) whose norm is tagged ``pi``, ``eps`` or ``l2``; every use of
a tensor-valued norm states which certified side it takes.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence, Union

import numpy as np

from . import forms
from .errors import InputError, UnsupportedError
from .numerics import SeededRng
from .spaces import INF, SpaceSpec, as_vector, dual_space, euclidean, lp_norm
from .tensors import (
    DenseTensor,
    NormInterval,
    injective_norm_bounds,
    injective_norm_upper,
    projective_norm_bounds,
    projective_upper,
)

NORM_TAGS = ("pi", "eps", "l2")


class TensorSpace:
    """Y_1 (x) ... (x) Y_m as a codomain, with its crossnorm tag."""

    __slots__ = ("spaces", "norm")

    def __init__(self, spaces: Sequence[SpaceSpec], norm: str = "pi"):
        spaces = tuple(spaces)
        if not spaces or not all(isinstance(s, SpaceSpec) for s in spaces):
            raise InputError("TensorSpace needs a nonempty list of SpaceSpec")
        if norm not in NORM_TAGS:
            raise InputError(f"unknown crossnorm tag {norm!r}; expected one of {NORM_TAGS}")
        if norm == "l2" and not all(s.euclidean for s in spaces):
            raise InputError("the l2 crossnorm needs Euclidean factors")
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "norm", norm)

    def __setattr__(self, name, value):
        raise AttributeError("TensorSpace is immutable")

    @property
    def dim(self) -> int:
        return math.prod(s.dim for s in self.spaces)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    @property
    def euclidean(self) -> bool:
        # as a normed space: only the Hilbert crossnorm is Euclidean
        return self.norm == "l2"

    def __eq__(self, other):
        return isinstance(other, TensorSpace) and self.spaces == other.spaces and self.norm == other.norm

    def __hash__(self):
        return hash((self.spaces, self.norm))

    def __repr__(self):
        return f"TensorSpace({list(self.spaces)!r}, norm={self.norm!r})"

    def to_json(self) -> dict:
        return {"tensor": [s.to_json() for s in self.spaces], "norm": self.norm}


Codomain = Union[SpaceSpec, TensorSpace]
SCALARS = SpaceSpec(1, 2)


def codomain_from_json(obj) -> Codomain:
    if isinstance(obj, dict) and "tensor" in obj:
        return TensorSpace([SpaceSpec.from_json(s) for s in obj["tensor"]], obj.get("norm", "pi"))
    return SpaceSpec.from_json(obj)


def codomain_norm_bounds(cod: Codomain, v: np.ndarray, budget: int = 8, seed: int = 0) -> tuple[float, float]:
    """(lower, upper) for the norm of v in the codomain; equal when exact."""
    v = np.asarray(v, dtype=np.float64)
    if isinstance(cod, SpaceSpec):
        val = lp_norm(v, cod.pf)
        return val, val
    if not np.any(v):
        return 0.0, 0.0
    if cod.norm == "l2":
        val = float(np.linalg.norm(v))
        return val, val
    u = DenseTensor(cod.spaces, v.reshape(cod.shape))
    iv = injective_norm_bounds(u, budget, seed) if cod.norm == "eps" else projective_norm_bounds(u, budget, seed)
    return iv.lower, iv.upper


def codomain_norm_upper(cod: Codomain, v: np.ndarray, budget: int = 8, seed: int = 0) -> float:
    """Certified upper bound on the codomain norm of v, skipping lower-bound searches."""
    v = np.asarray(v, dtype=np.float64)
    if isinstance(cod, SpaceSpec) or cod.norm == "l2" or not np.any(v):
        return codomain_norm_bounds(cod, v)[1]
    u = DenseTensor(cod.spaces, v.reshape(cod.shape))
    if cod.norm == "eps":
        return injective_norm_upper(u.coeffs, u.spaces).value
    if u.order <= 2 and all(s.euclidean for s in u.spaces):
        return projective_norm_bounds(u).upper
    return projective_upper(u, budget, SeededRng(seed))[0]


class MultilinearOperator:
    """A bounded multilinear map between finite-dimensional l_p spaces.

    Parameters
    ----------
    domain : sequence of SpaceSpec
        The spaces X_1, ..., X_n.
    codomain : SpaceSpec or TensorSpace
        The space Y.
    coeffs : array_like
        Shape ``(dim X_1, ..., dim X_n, dim Y)``.
    factors : sequence of MultilinearOperator, optional
        Set by :func:`product_of_linear`; the linear maps T_i with
        T = (x) o (T_1, ..., T_n). Used for sharper norm bounds.
    """

    __slots__ = ("domain", "codomain", "coeffs", "factors")

    def __init__(self, domain: Sequence[SpaceSpec], codomain: Codomain, coeffs, factors=None):
        domain = tuple(domain)
        if not domain or not all(isinstance(s, SpaceSpec) for s in domain):
            raise InputError("domain must be a nonempty list of SpaceSpec")
        if not isinstance(codomain, (SpaceSpec, TensorSpace)):
            raise InputError(f"bad codomain {codomain!r}")
        arr = np.array(coeffs, dtype=np.float64)
        want = tuple(s.dim for s in domain) + (codomain.dim,)
        if arr.shape != want:
            raise InputError(f"coefficient shape {arr.shape} does not match {want}")
        if not np.all(np.isfinite(arr)):
            raise InputError("operator has non-finite coefficients")
        arr.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "factors", tuple(factors) if factors is not None else None)

    def __setattr__(self, name, value):
        raise AttributeError("MultilinearOperator is immutable")

    @property
    def order(self) -> int:
        return len(self.domain)

    @property
    def is_scalar(self) -> bool:
        return isinstance(self.codomain, SpaceSpec) and self.codomain.dim == 1

    @property
    def is_linear(self) -> bool:
        return self.order == 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def matrix(self) -> np.ndarray:
        """For a linear operator: the usual matrix A with T(x) = A @ x."""
        if not self.is_linear:
            raise InputError("matrix() needs a linear operator")
        return self.coeffs.T.copy()

    def _same(self, other):
        if not isinstance(other, MultilinearOperator) or other.domain != self.domain or other.codomain != self.codomain:
            raise InputError("operators act between different spaces")

    def __add__(self, other):
        self._same(other)
        return MultilinearOperator(self.domain, self.codomain, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same(other)
        return MultilinearOperator(self.domain, self.codomain, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return MultilinearOperator(self.domain, self.codomain, self.coeffs * float(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"MultilinearOperator(domain={list(self.domain)!r}, codomain={self.codomain!r})"

    def to_json(self) -> dict:
        return {
            "domain": [s.to_json() for s in self.domain],
            "codomain": self.codomain.to_json(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_json(cls, obj) -> "MultilinearOperator":
        for key in ("domain", "codomain", "coeffs"):
            if not isinstance(obj, dict) or key not in obj:
                raise InputError(f"operator JSON is missing {key!r}")
        domain = [SpaceSpec.from_json(s) for s in obj["domain"]]
        return cls(domain, codomain_from_json(obj["codomain"]), obj["coeffs"])


# -- constructors ----------------------------------------------------------------


def linear_operator(matrix, domain: SpaceSpec | None = None, codomain: Codomain | None = None) -> MultilinearOperator:
    """The linear map x -> matrix @ x."""
    a = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    m, d = a.shape
    domain = domain or euclidean(d)
    codomain = codomain or euclidean(m)
    return MultilinearOperator([domain], codomain, a.T)


def identity(space: SpaceSpec) -> MultilinearOperator:
    return MultilinearOperator([space], space, np.eye(space.dim))


def inner_product(dim: int, p=2) -> MultilinearOperator:
    """G(x, y) = sum_k x_k y_k on l_p^dim x l_p^dim."""
    s = SpaceSpec(dim, p)
    return MultilinearOperator([s, s], SCALARS, np.eye(dim)[:, :, None])


def scalar_form(domain: Sequence[SpaceSpec], coeffs) -> MultilinearOperator:
    c = np.asarray(coeffs, dtype=np.float64)
    return MultilinearOperator(domain, SCALARS, c[..., None])


# -- evaluation ------------------------------------------------------------------


def evaluate(T: MultilinearOperator, *xs) -> np.ndarray:
    if len(xs) != T.order:
        raise InputError(f"operator takes {T.order} arguments, got {len(xs)}")
    out = T.coeffs
    for s, x in zip(T.domain, xs):
        out = np.tensordot(as_vector(s, x), out, axes=([0], [0]))
    return np.asarray(out, dtype=np.float64)


def sigma_apply(T: MultilinearOperator, u: DenseTensor) -> np.ndarray:
    """The linearization applied to a dense tensor u in X_1 (x) ... (x) X_n."""
    if not isinstance(u, DenseTensor) or u.spaces != T.domain:
        raise InputError("tensor does not live in the operator's domain")
    return np.tensordot(u.coeffs, T.coeffs, axes=T.order)


def _norm_balls(T: MultilinearOperator):
    # the form whose sup over these balls is ||T|| (for SpaceSpec / eps / l2 codomains)
    cod = T.codomain
    coeffs = T.coeffs
    if isinstance(cod, SpaceSpec):
        return coeffs, list(T.domain) + [dual_space(cod)]
    if cod.norm == "l2":
        return coeffs, list(T.domain) + [euclidean(cod.dim)]
    # eps: sup over x and over functionals y_k^* in the dual balls
    return coeffs.reshape(coeffs.shape[:-1] + cod.shape), list(T.domain) + [dual_space(s) for s in cod.spaces]


def operator_norm_bounds(T: MultilinearOperator, budget: int = 16, seed: int = 0) -> NormInterval:
    """Enclosure of ||T|| = sup { ||T(x^1, ..., x^n)|| : x^i in B_{X_i} }.

    For an l_p codomain, ||T(x)||_Y = sup over y^* in B_{Y^*}, so ||T|| is the
    sup of an (n+1)-linear form over a product of balls and every route of
    :mod:`forms` applies. A pi-tagged tensor codomain is bracketed between its
    eps value (lower) and the l_1 coefficient norm (upper), which dominates pi
    because basis tensors have norm one; operators built by
    :func:`product_of_linear` use ||T|| = prod ||T_i|| instead.
    """
    if isinstance(budget, bool) or not isinstance(budget, (int, np.integer)) or budget <= 0:
        raise InputError(f"budget must be a positive integer, got {budget!r}")
    if T.is_zero():
        return NormInterval(0.0, 0.0, {"route": "zero"}, {"route": "zero"})
    rng = SeededRng(seed)
    cod = T.codomain
    if isinstance(cod, TensorSpace) and cod.norm == "pi":
        if T.factors is not None:
            parts = [operator_norm_bounds(f, budget, seed) for f in T.factors]
            lo = math.prod(p.lower for p in parts)
            up = math.prod(p.upper for p in parts)
            cert = {"route": "product-of-linear", "factor_norms": [p.to_json() for p in parts]}
            return NormInterval(lo, up, cert, cert)
        coeffs = T.coeffs.reshape(T.coeffs.shape[:-1] + cod.shape)
        balls = list(T.domain) + [dual_space(s) for s in cod.spaces]
        lo, xs, _ = forms.sup_bounds(coeffs, balls, budget, rng)
        up = forms.sup_upper(T.coeffs, list(T.domain) + [SpaceSpec(cod.dim, INF)])
        return NormInterval(
            min(lo, up.value),
            up.value,
            {"route": "eps-lower", "value": lo, "arguments": xs},
            {"route": "l1-coefficients/" + up.route, "value": up.value, **up.detail},
        )
    coeffs, balls = _norm_balls(T)
    lo, xs, up = forms.sup_bounds(coeffs, balls, budget, rng)
    up_cert = {"route": up.route, "value": up.value, **up.detail}
    if up.exact:
        return NormInterval(up.value, up.value, up_cert, up_cert)
    return NormInterval(lo, up.value, {"route": "search", "value": lo, "arguments": xs}, up_cert)


def hs_norm(T: MultilinearOperator) -> float:
    """Hilbert-Schmidt norm; all domain spaces and the codomain must be Euclidean."""
    if not all(s.euclidean for s in T.domain) or not T.codomain.euclidean:
        raise UnsupportedError("the Hilbert-Schmidt norm needs Euclidean domain and codomain")
    return float(np.linalg.norm(T.coeffs.ravel()))


# -- constructions ----------------------------------------------------------------


def fix_coordinates(T: MultilinearOperator, fixed: Mapping[int, object]) -> MultilinearOperator:
    """Contract the slots in ``fixed`` with the given vectors."""
    n = T.order
    idx = sorted(fixed)
    if len(idx) != len(set(idx)) or any(not isinstance(k, (int, np.integer)) or not 0 <= k < n for k in idx):
        raise InputError(f"fixed slots must be distinct indices in [0, {n})")
    if len(idx) >= n:
        raise InputError("all coordinates fixed; use evaluate instead")
    out = T.coeffs
    for k in reversed(idx):
        out = np.tensordot(out, as_vector(T.domain[k], fixed[k]), axes=([k], [0]))
    free = [s for k, s in enumerate(T.domain) if k not in fixed]
    return MultilinearOperator(free, T.codomain, out)


def rank_one(phi: MultilinearOperator, y, codomain: SpaceSpec | None = None) -> MultilinearOperator:
    """x -> phi(x) y for a scalar multilinear form phi."""
    if not phi.is_scalar:
        raise InputError("rank_one needs a scalar-valued form")
    y = np.asarray(y, dtype=np.float64)
    codomain = codomain or euclidean(y.size)
    y = as_vector(codomain, y)
    return MultilinearOperator(phi.domain, codomain, np.multiply.outer(phi.coeffs[..., 0], y))


def product_of_linear(ops: Sequence[MultilinearOperator], norm: str = "pi") -> MultilinearOperator:
    """(x) o (T_1, ..., T_n): (x^1, ..., x^n) -> T_1 x^1 (x) ... (x) T_n x^n."""
    ops = list(ops)
    if not ops:
        raise InputError("need at least one factor")
    for t in ops:
        if not t.is_linear or not isinstance(t.codomain, SpaceSpec):
            raise InputError("product_of_linear needs linear maps into l_p spaces")
    n = len(ops)
    coeffs = ops[0].coeffs
    for t in ops[1:]:
        coeffs = np.multiply.outer(coeffs, t.coeffs)
    # axes are (d1, e1, d2, e2, ...); bring them to (d1..dn, e1..en)
    perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    coeffs = np.transpose(coeffs, perm)
    cod = TensorSpace([t.codomain for t in ops], norm)
    coeffs = coeffs.reshape(tuple(t.domain[0].dim for t in ops) + (cod.dim,))
    return MultilinearOperator([t.domain[0] for t in ops], cod, coeffs, factors=ops)


def canonical_map(spaces: Sequence[SpaceSpec], norm: str = "pi") -> MultilinearOperator:
    """The canonical multilinear map (x^1, ..., x^n) -> x^1 (x) ... (x) x^n."""
    return product_of_linear([identity(s) for s in spaces], norm)


def precompose_linear(T: MultilinearOperator, maps: Sequence[MultilinearOperator | None]) -> MultilinearOperator:
    """(z^1, ..., z^n) -> T(R_1 z^1, ..., R_n z^n); ``None`` stands for the identity."""
    maps = list(maps)
    if len(maps) != T.order:
        raise InputError(f"need {T.order} maps, got {len(maps)}")
    out = T.coeffs
    domain = list(T.domain)
    for k, r in enumerate(maps):
        if r is None:
            continue
        if not r.is_linear or r.codomain != T.domain[k]:
            raise InputError(f"map {k} does not land in domain slot {k}")
        # new[.., z, ..] = sum_x R[z, x] T[.., x, ..]
        out = np.moveaxis(np.tensordot(r.coeffs, out, axes=([1], [k])), 0, k)
        domain[k] = r.domain[0]
    return MultilinearOperator(domain, T.codomain, out)


def postcompose_linear(S: MultilinearOperator, T: MultilinearOperator) -> MultilinearOperator:
    """x -> S(T(x))."""
    if not S.is_linear or S.domain[0] != T.codomain:
        raise InputError("S must be linear on the codomain of T")
    out = np.tensordot(T.coeffs, S.coeffs, axes=([T.order], [0]))
    return MultilinearOperator(T.domain, S.codomain, out)


def with_domain(T: MultilinearOperator, domain: Sequence[SpaceSpec]) -> MultilinearOperator:
    """Same coefficients, domain spaces replaced (dimensions must agree)."""
    domain = list(domain)
    if [s.dim for s in domain] != [s.dim for s in T.domain]:
        raise InputError("replacement domain has different dimensions")
    return MultilinearOperator(domain, T.codomain, T.coeffs)
