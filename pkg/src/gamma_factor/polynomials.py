"""Homogeneous polynomials P(x) = T(x, ..., x) with symmetric coefficients."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .certificates import CertifiedInterval, GammaCertificate, gamma_interval, tolerances
from .config import settings
from .errors import CertificateRefused, InconsistencyError, InputError
from .numerics import SeededRng, SymmetricMatrix, jacobi_eigh, min_eigenvalue, multistart_maximize, svd
from .operators import MultilinearOperator, operator_norm_bounds
from .spaces import SpaceSpec, as_vector, lp_norm
from .tensors import DenseTensor, NormInterval, fiber_terms, outer, projective_norm_bounds, projective_upper


def symmetrize_array(a: np.ndarray, n: int) -> np.ndarray:
    """Average over all permutations of the first n axes."""
    a = np.asarray(a, dtype=np.float64)
    rest = list(range(n, a.ndim))
    perms = list(itertools.permutations(range(n)))
    out = np.zeros_like(a)
    for p in perms:
        out += np.transpose(a, list(p) + rest)
    return out / len(perms)


class HomogeneousPolynomial:
    """An n-homogeneous polynomial X -> Y; coefficients are symmetrized on construction."""

    __slots__ = ("degree", "space", "codomain", "coeffs")

    def __init__(self, degree: int, space: SpaceSpec, codomain: SpaceSpec, coeffs):
        if isinstance(degree, bool) or not isinstance(degree, (int, np.integer)) or degree < 1:
            raise InputError(f"degree must be a positive integer, got {degree!r}")
        if not isinstance(space, SpaceSpec) or not isinstance(codomain, SpaceSpec):
            raise InputError("space and codomain must be SpaceSpec")
        arr = np.array(coeffs, dtype=np.float64)
        want = (space.dim,) * int(degree) + (codomain.dim,)
        if arr.shape != want:
            raise InputError(f"coefficient shape {arr.shape} does not match {want}")
        if not np.all(np.isfinite(arr)):
            raise InputError("polynomial has non-finite coefficients")
        arr = symmetrize_array(arr, int(degree))
        arr.setflags(write=False)
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("HomogeneousPolynomial is immutable")

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __repr__(self):
        return f"HomogeneousPolynomial(degree={self.degree}, space={self.space!r}, codomain={self.codomain!r})"

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "space": self.space.to_json(),
            "codomain": self.codomain.to_json(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_json(cls, obj, tol: float = 1e-12) -> "HomogeneousPolynomial":
        for key in ("degree", "space", "codomain", "coeffs"):
            if not isinstance(obj, dict) or key not in obj:
                raise InputError(f"polynomial JSON is missing {key!r}")
        raw = np.asarray(obj["coeffs"], dtype=np.float64)
        degree = obj["degree"]
        if not isinstance(degree, int) or degree < 1 or raw.ndim != degree + 1:
            raise InputError("coefficient array does not match the degree")
        sym = symmetrize_array(raw, degree)
        if np.max(np.abs(sym - raw), initial=0.0) > tol * (1 + np.max(np.abs(raw), initial=0.0)):
            raise InputError("polynomial coefficients are not symmetric")
        return cls(degree, SpaceSpec.from_json(obj["space"]), SpaceSpec.from_json(obj["codomain"]), raw)


def evaluate_poly(P: HomogeneousPolynomial, x) -> np.ndarray:
    x = as_vector(P.space, x)
    out = P.coeffs
    for _ in range(P.degree):
        out = np.tensordot(x, out, axes=([0], [0]))
    return np.asarray(out, dtype=np.float64)


def associated_operator(P: HomogeneousPolynomial) -> MultilinearOperator:
    return MultilinearOperator([P.space] * P.degree, P.codomain, P.coeffs)


def symmetrize(T: MultilinearOperator) -> HomogeneousPolynomial:
    """The polynomial x -> T(x, ..., x)."""
    if len(set(T.domain)) != 1 or not isinstance(T.codomain, SpaceSpec):
        raise InputError("symmetrize needs equal domain spaces and an l_p codomain")
    return HomogeneousPolynomial(T.order, T.domain[0], T.codomain, T.coeffs)


def compose_poly(S: MultilinearOperator | None, P: HomogeneousPolynomial, R: MultilinearOperator | None) -> HomogeneousPolynomial:
    """z -> S(P(R z))."""
    c = P.coeffs
    space, cod = P.space, P.codomain
    if R is not None:
        if not R.is_linear or R.codomain != P.space:
            raise InputError("R must be linear into the polynomial's domain")
        for k in range(P.degree):
            c = np.moveaxis(np.tensordot(R.coeffs, c, axes=([1], [k])), 0, k)
        space = R.domain[0]
    if S is not None:
        if not S.is_linear or S.domain[0] != P.codomain:
            raise InputError("S must be linear on the polynomial's codomain")
        c = np.tensordot(c, S.coeffs, axes=([P.degree], [0]))
        cod = S.codomain
    return HomogeneousPolynomial(P.degree, space, cod, c)


# -- symmetric vectorization -------------------------------------------------------


def monomials(dim: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(dim), n))


def _multinomial(alpha: tuple[int, ...]) -> int:
    counts = {}
    for a in alpha:
        counts[a] = counts.get(a, 0) + 1
    out = math.factorial(len(alpha))
    for c in counts.values():
        out //= math.factorial(c)
    return out


def sym_vec(w: np.ndarray) -> np.ndarray:
    """Coordinates in the monomial basis, weighted so inner products match.

    For symmetric a, b: <sym_vec(a), sym_vec(b)> = sum of a * b over all entries.
    """
    n, dim = w.ndim, w.shape[0]
    return np.array([w[alpha] * math.sqrt(_multinomial(alpha)) for alpha in monomials(dim, n)])


def sym_power(v: np.ndarray, n: int) -> np.ndarray:
    return outer([np.asarray(v, dtype=np.float64)] * n)


# -- symmetric projective norm -----------------------------------------------------


def _check_symmetric(w: DenseTensor):
    if len(set(w.spaces)) != 1:
        raise InputError("a symmetric tensor needs equal factor spaces")
    sym = symmetrize_array(w.coeffs, w.order)
    if np.max(np.abs(sym - w.coeffs)) > 1e-12 * (1 + np.max(np.abs(w.coeffs))):
        raise InputError("tensor is not symmetric")


def polarization_cost(term: Sequence[np.ndarray], p: float) -> float:
    """Cost of sym(x_1 (x) ... (x) x_n) via the polarization formula.

    sym(x_1 (x) ... (x) x_n) = (1 / (2^n n!)) sum_eps eps_1...eps_n (sum_i eps_i x_i)^(n),
    a combination of 2^n symmetric powers; fixing eps_1 = 1 halves the sum.
    """
    n = len(term)
    if n == 1:
        return lp_norm(term[0], p)
    # the cost is not invariant under x_i -> c_i x_i with prod c_i = 1, so
    # equalize the factor norms first (at most n^n / n! times prod ||x_i||)
    norms = [lp_norm(x, p) for x in term]
    if min(norms) == 0:
        return 0.0
    g = math.prod(norms) ** (1.0 / n)
    term = [x * (g / nr) for x, nr in zip(term, norms)]
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=n - 1):
        v = term[0] + sum(s * x for s, x in zip(signs, term[1:]))
        total += lp_norm(v, p) ** n
    return 2.0 * total / (2.0**n * math.factorial(n))


def _sym_peel(coeffs: np.ndarray, cap: int, rng: SeededRng, restarts: int):
    # greedy symmetric rank-1 peeling: maximize |w(v, ..., v)| on the sphere
    n, dim = coeffs.ndim, coeffs.shape[0]
    resid = np.array(coeffs)
    scale = float(np.linalg.norm(coeffs))
    terms = []
    for _ in range(cap):
        if float(np.linalg.norm(resid)) <= 1e-13 * scale:
            break

        def f(xs, r=resid):
            t = r
            for _ in range(n):
                t = np.tensordot(xs[0], t, axes=([0], [0]))
            return abs(float(t))

        # start from the leading directions of the unfolding
        unf = resid.reshape(dim, -1)
        u, s, _ = svd(unf)
        starts = [[u[:, k]] for k in range(min(2, s.size))]
        xs, _ = multistart_maximize(f, [(dim, "sphere")], restarts, rng, starts=starts, max_iter=60)
        v = xs[0]
        lam = resid
        for _ in range(n):
            lam = np.tensordot(v, lam, axes=([0], [0]))
        lam = float(lam)
        if lam == 0:
            break
        terms.append((lam, v))
        resid = resid - lam * sym_power(v, n)
    return terms, resid


def sym_projective_bounds(w: DenseTensor, budget: int = 16, seed: int = 0) -> NormInterval:
    """Enclosure of the symmetric projective norm of a symmetric tensor.

    Upper: the cheapest of (a) the eigendecomposition (degree 2), (b) greedy
    symmetric peeling plus the polarized residual and (c) the polarization of
    a plain elementary decomposition. Lower: the plain projective lower
    bound, since pi <= pi_s.
    """
    if isinstance(budget, bool) or not isinstance(budget, (int, np.integer)) or budget <= 0:
        raise InputError(f"budget must be a positive integer, got {budget!r}")
    _check_symmetric(w)
    if w.is_zero():
        return NormInterval(0.0, 0.0, {"route": "zero"}, {"route": "zero"})
    n, p = w.order, w.spaces[0].pf
    rng = SeededRng(seed)
    if n == 1:
        v = lp_norm(w.coeffs, p)
        cert = {"route": "vector-norm", "value": v}
        return NormInterval(v, v, cert, cert)
    cands = []
    if n == 2:
        lam, vecs = jacobi_eigh(SymmetricMatrix(w.coeffs))
        resid = w.coeffs - (vecs * lam) @ vecs.T
        cost = float(sum(abs(l) * lp_norm(vecs[:, k], p) ** 2 for k, l in enumerate(lam)))
        cost += sum(polarization_cost(t, p) for t in fiber_terms(resid, 0))
        cands.append((cost, {"route": "eigen", "eigenvalues": lam}))
    cap = w.shape[0] + 2
    terms, resid = _sym_peel(w.coeffs, cap, rng, max(1, min(budget, 4)))
    cost = sum(abs(l) * lp_norm(v, p) ** n for l, v in terms)
    cost += sum(polarization_cost(t, p) for t in fiber_terms(resid, 0))
    cands.append((cost, {"route": "symmetric-peel", "terms": [(l, v) for l, v in terms]}))
    _, pcert = projective_upper(w, budget, rng.child(1), search=n >= 3)
    plain = pcert.get("terms") or []
    resid = np.array(w.coeffs)
    for t in plain:
        resid = resid - outer(t)
    cost = sum(polarization_cost(t, p) for t in list(plain) + fiber_terms(resid, 0))
    cands.append((cost, {"route": "polarization", "plain_route": pcert["route"]}))
    up, up_cert = min(cands, key=lambda c: c[0])
    up_cert = dict(up_cert, value=up)
    lo_iv = projective_norm_bounds(w, budget, seed)
    lo = min(lo_iv.lower, up)
    return NormInterval(lo, up, lo_iv.lower_certificate, up_cert)


def sym_power_difference(s: np.ndarray, t: np.ndarray, n: int, space: SpaceSpec) -> DenseTensor:
    return DenseTensor([space] * n, sym_power(s, n) - sym_power(t, n))


def _sym_diff_upper_fast(s: np.ndarray, t: np.ndarray, n: int, p: float) -> float:
    # two symmetric powers, or the exact eigen route in degree 2
    best = lp_norm(s, p) ** n + lp_norm(t, p) ** n
    if not np.any(s - t):
        return 0.0
    if n == 2:
        m = np.outer(s, s) - np.outer(t, t)
        lam, vecs = jacobi_eigh(SymmetricMatrix(m))
        resid = m - (vecs * lam) @ vecs.T
        cost = float(sum(abs(l) * lp_norm(vecs[:, k], p) ** 2 for k, l in enumerate(lam)))
        cost += sum(polarization_cost(tt, p) for tt in fiber_terms(resid, 0))
        best = min(best, cost)
    return best


# -- polynomial witnesses -----------------------------------------------------------


class PolynomialWitness:
    """Pairs of vectors (x_i, z_i) dominated by (s_j, t_j) in the polynomial sense."""

    __slots__ = ("xz_pairs", "st_pairs", "space")

    def __init__(self, space: SpaceSpec, xz_pairs, st_pairs):
        def clean(pairs):
            out = []
            for pr in pairs:
                if len(pr) != 2:
                    raise InputError("witness pairs must be pairs of vectors")
                out.append((as_vector(space, pr[0]).copy(), as_vector(space, pr[1]).copy()))
            return tuple(out)

        st = clean(st_pairs)
        if not st:
            raise InputError("a witness needs at least one (s, t) pair")
        object.__setattr__(self, "xz_pairs", clean(xz_pairs))
        object.__setattr__(self, "st_pairs", st)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialWitness is immutable")

    def to_json(self) -> dict:
        return {
            "xz": [[x.tolist(), z.tolist()] for x, z in self.xz_pairs],
            "st": [[s.tolist(), t.tolist()] for s, t in self.st_pairs],
        }

    @classmethod
    def from_json(cls, obj, space: SpaceSpec) -> "PolynomialWitness":
        if not isinstance(obj, dict) or "xz" not in obj or "st" not in obj:
            raise InputError("witness JSON needs 'xz' and 'st'")
        return cls(space, obj["xz"], obj["st"])


def sym_gram(pairs, n: int) -> SymmetricMatrix:
    d = np.array([sym_vec(sym_power(x, n) - sym_power(z, n)) for x, z in pairs])
    return SymmetricMatrix(d.T @ d)


def check_poly_domination(w: PolynomialWitness, n: int, tol: float | None = None) -> tuple[bool, float]:
    """Gram comparison over the symmetric coefficient space (all scalar n-homogeneous phi)."""
    tol = settings.psd_rel_tol if tol is None else float(tol)
    g_st = sym_gram(w.st_pairs, n)
    diff = g_st - sym_gram(w.xz_pairs, n) if w.xz_pairs else g_st
    lam = min_eigenvalue(diff)
    return bool(lam >= -tol * (1.0 + g_st.trace())), float(lam)


def poly_lower_bound(P: HomogeneousPolynomial, w: PolynomialWitness, budget: int = 16, seed: int = 0) -> GammaCertificate:
    if w.space != P.space:
        raise InputError("witness vectors do not live in the polynomial's domain")
    ok, lam = check_poly_domination(w, P.degree)
    if not ok:
        raise CertificateRefused(f"polynomial domination rejected (min eigenvalue {lam:.3e})")
    num = sum(lp_norm(evaluate_poly(P, x) - evaluate_poly(P, z), P.codomain.pf) ** 2 for x, z in w.xz_pairs)
    den = 0.0
    for s, t in w.st_pairs:
        fast = _sym_diff_upper_fast(s, t, P.degree, P.space.pf)
        if fast > 0 and P.degree > 2:
            fast = min(fast, sym_projective_bounds(sym_power_difference(s, t, P.degree, P.space), budget, seed).upper)
        den += fast**2
    if den == 0:
        raise CertificateRefused("denominator is zero")
    return GammaCertificate(
        "witness-lower",
        math.sqrt(num / den),
        {"witness": w, "numerator": float(num), "denominator": float(den), "min_eigenvalue": lam, "tolerances": tolerances()},
    )


def _poly_fast_value(P, x, z) -> float:
    num = lp_norm(evaluate_poly(P, x) - evaluate_poly(P, z), P.codomain.pf)
    den = _sym_diff_upper_fast(x, z, P.degree, P.space.pf)
    return 0.0 if den == 0 else num / den


def poly_search_witness(P: HomogeneousPolynomial, seed: int = 0, budget: int = 64) -> tuple[PolynomialWitness, GammaCertificate]:
    """Equality witnesses from z = 0 maximizers, basis pairs and random pairs."""
    dim = P.space.dim
    rng = SeededRng(seed)
    zero = np.zeros(dim)
    cands = []
    eye = np.eye(dim)
    for k in range(dim):
        cands.append((eye[k], zero))
        for j in range(dim):
            if j != k:
                cands.append((eye[k], eye[j]))
                cands.append((eye[k] + eye[j], eye[k] - eye[j]))
    for _ in range(budget):
        x = rng.unit_vector(dim)
        if rng.uniform() < 0.5:
            cands.append((x, zero))
        else:
            cands.append((x, rng.unit_vector(dim) * math.exp(rng.uniform(math.log(0.25), math.log(4.0)))))
    best_v, best = -1.0, None
    for x, z in cands:
        v = _poly_fast_value(P, x, z)
        if v > best_v:
            best_v, best = v, (x, z)
    # refine the best single pair locally
    def obj(xs):
        return _poly_fast_value(P, xs[0], xs[1])

    xs, v = multistart_maximize(obj, [(dim, "ball"), (dim, "ball")], 1, rng, starts=[[best[0] / max(1.0, lp_norm(best[0], 2)), best[1] / max(1.0, lp_norm(best[1], 2))]], max_iter=40)
    if v > best_v:
        best = (xs[0], xs[1])
    w = PolynomialWitness(P.space, [best], [best])
    return w, poly_lower_bound(P, w, min(budget, 16), seed)


def poly_gamma_interval(P: HomogeneousPolynomial, seed: int = 0, budget: int = 64) -> CertifiedInterval:
    """lower from the polynomial witness search; upper = Gamma upper of the associated operator."""
    if P.is_zero():
        z = GammaCertificate("zero", 0.0)
        return CertifiedInterval(0.0, 0.0, z, z, [z])
    _, low = poly_search_witness(P, seed, budget)
    op = gamma_interval(associated_operator(P), seed, budget)
    up = op.upper_cert
    if math.isfinite(up.value) and low.value > up.value + settings.norm_rel_tol * (1 + up.value):
        raise InconsistencyError(f"polynomial lower {low.value} exceeds upper {up.value}")
    return CertifiedInterval(min(low.value, up.value), up.value, low, up, op.candidates)


def poly_composition_upper(R: MultilinearOperator | None, inner: CertifiedInterval, S: MultilinearOperator | None, degree: int,
                           budget: int = 16, seed: int = 0) -> GammaCertificate:
    """Gamma(S P R) <= ||R||^n Gamma(P) ||S|| (degree-n homogeneity in R)."""
    r = 1.0 if R is None else operator_norm_bounds(R, budget, seed).upper
    s = 1.0 if S is None else operator_norm_bounds(S, budget, seed).upper
    value = r**degree * inner.upper * s
    return GammaCertificate("composition-upper", value, {"R_norm_upper": r, "degree": degree, "inner_upper": inner.upper, "S_norm_upper": s})
