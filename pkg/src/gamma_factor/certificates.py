"""Certified bounds on the Hilbert-space factorization constant Gamma(T).

Lower bounds come from domination witnesses. Write d = vec(p) - vec(q) for a
pair of elementary tensors; a family (x_i, z_i) is dominated by (s_j, t_j)
when every multilinear functional phi satisfies

    sum_i |<phi, d(x_i, z_i)>|^2 <= sum_j |<phi, d(s_j, t_j)>|^2,

which, phi ranging over the whole coefficient space, is the PSD comparison
gram(st) - gram(xz) >= 0. Any dominated witness then gives

    Gamma(T)^2 >= sum_i ||f_T(x_i) - f_T(z_i)||^2 / sum_j pi(s_j - t_j)^2,

and an upper bound on pi in the denominator keeps the quotient valid.

Upper bounds come from the closed-form routes: Hilbert-Schmidt norm,
Hilbert domain (2^(n-1) ||T||), rank-one sums, routing through l_2 with
embedding constants, ideal composition and the product of linear maps.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import forms
from .config import max_threads, settings
from .errors import BudgetError, CertificateRefused, InconsistencyError, InputError, UnsupportedError
from .numerics import SeededRng, SymmetricMatrix, jacobi_eigh, min_eigenvalue, svd
from .operators import (
    MultilinearOperator,
    TensorSpace,
    _norm_balls,
    codomain_norm_bounds,
    codomain_norm_upper,
    evaluate,
    hs_norm,
    operator_norm_bounds,
    with_domain,
)
from .spaces import SpaceSpec, euclidean, lp_norm, verified_embedding_constants
from .tensors import (
    DecomposablePoint,
    injective_norm_lower,
    outer,
    pi_distance_bounds,
    pi_distance_upper_fast,
    projective_lower,
    DenseTensor,
)

KINDS = (
    "witness-lower",
    "norm-lower",
    "hs-upper",
    "hilbert-domain-upper",
    "rank-one-upper",
    "composition-upper",
    "routing-upper",
    "product-upper",
    "zero",
    "none",
)

Pair = tuple[DecomposablePoint, DecomposablePoint]


class KwapienWitness:
    """Two families of pairs of elementary tensors, (x_i, z_i) and (s_j, t_j)."""

    __slots__ = ("xz_pairs", "st_pairs", "spaces")

    def __init__(self, xz_pairs: Sequence[Pair], st_pairs: Sequence[Pair]):
        xz = [tuple(pr) for pr in xz_pairs]
        st = [tuple(pr) for pr in st_pairs]
        if not st:
            raise InputError("a witness needs at least one (s, t) pair")
        spaces = st[0][0].spaces
        for pr in xz + st:
            if len(pr) != 2 or any(not isinstance(p, DecomposablePoint) for p in pr):
                raise InputError("witness pairs must be two DecomposablePoints")
            if pr[0].spaces != spaces or pr[1].spaces != spaces:
                raise InputError("witness points live in different tensor products")
        object.__setattr__(self, "xz_pairs", tuple(xz))
        object.__setattr__(self, "st_pairs", tuple(st))
        object.__setattr__(self, "spaces", spaces)

    def __setattr__(self, name, value):
        raise AttributeError("KwapienWitness is immutable")

    @classmethod
    def equality(cls, pairs: Sequence[Pair]) -> "KwapienWitness":
        return cls(pairs, pairs)

    def scaled_st(self, lam: float) -> "KwapienWitness":
        return KwapienWitness(self.xz_pairs, [(s.scaled(lam), t.scaled(lam)) for s, t in self.st_pairs])

    def scaled_xz(self, c: float) -> "KwapienWitness":
        return KwapienWitness([(x.scaled(c), z.scaled(c)) for x, z in self.xz_pairs], self.st_pairs)

    def to_json(self) -> dict:
        return {
            "xz": [[p.to_json(), q.to_json()] for p, q in self.xz_pairs],
            "st": [[p.to_json(), q.to_json()] for p, q in self.st_pairs],
        }

    @classmethod
    def from_json(cls, obj, spaces: Sequence[SpaceSpec]) -> "KwapienWitness":
        if not isinstance(obj, dict) or "xz" not in obj or "st" not in obj:
            raise InputError("witness JSON needs 'xz' and 'st'")

        def pairs(key):
            out = []
            for i, pr in enumerate(obj[key]):
                if not isinstance(pr, (list, tuple)) or len(pr) != 2:
                    raise InputError(f"{key}[{i}] must be a pair of points")
                out.append((DecomposablePoint.from_json(pr[0], spaces), DecomposablePoint.from_json(pr[1], spaces)))
            return out

        return cls(pairs("xz"), pairs("st"))


@dataclass
class GammaCertificate:
    kind: str
    value: float
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown certificate kind {self.kind!r}")
        self.value = float(self.value)
        if math.isnan(self.value) or self.value < 0:
            raise InconsistencyError(f"certificate value {self.value} is not a nonnegative number")

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "payload": self.payload}


@dataclass
class CertifiedInterval:
    """lower <= Gamma(T) <= upper, each side with its certificate."""

    lower: float
    upper: float
    lower_cert: GammaCertificate
    upper_cert: GammaCertificate
    candidates: list = field(default_factory=list)

    def __post_init__(self):
        if math.isfinite(self.upper) and self.lower > self.upper + 1e-9 * (1 + self.upper):
            raise InconsistencyError(f"certified lower {self.lower} exceeds certified upper {self.upper}")

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_cert": self.lower_cert.to_json(),
            "upper_cert": self.upper_cert.to_json(),
            "upper_candidates": [c.to_json() for c in self.candidates],
        }


def tolerances() -> dict:
    return {"psd_rel_tol": settings.psd_rel_tol, "norm_rel_tol": settings.norm_rel_tol}


# -- domination ------------------------------------------------------------------


def _differences(pairs: Sequence[Pair]) -> np.ndarray:
    return np.array([(outer(p.factors) - outer(q.factors)).ravel() for p, q in pairs])


def gram_matrix(pairs: Sequence[Pair]) -> SymmetricMatrix:
    """sum_i d_i d_i^T with d_i = vec(p_i) - vec(q_i)."""
    pairs = list(pairs)
    if not pairs:
        raise InputError("gram_matrix needs at least one pair")
    spaces = pairs[0][0].spaces
    for p, q in pairs:
        if p.spaces != spaces or q.spaces != spaces:
            raise InputError("pairs live in different tensor products")
    d = _differences(pairs)
    return SymmetricMatrix(d.T @ d)


def check_domination(w: KwapienWitness, tol: float | None = None) -> tuple[bool, float]:
    """Accept iff min eig(gram(st) - gram(xz)) >= -tol * (1 + trace gram(st))."""
    tol = settings.psd_rel_tol if tol is None else float(tol)
    g_st = gram_matrix(w.st_pairs)
    if w.xz_pairs:
        diff = g_st - gram_matrix(w.xz_pairs)
    else:
        diff = g_st
    lam = min_eigenvalue(diff)
    return bool(lam >= -tol * (1.0 + g_st.trace())), float(lam)


def _max_scale(d_st: np.ndarray, d_xz: np.ndarray) -> float:
    """Largest c with c^2 gram(xz) <= gram(st); 0 if xz leaves the range of st."""
    g_st = SymmetricMatrix(d_st.T @ d_st)
    w, v = jacobi_eigh(g_st)
    if w[0] <= 0:
        return 0.0
    keep = w > 1e-12 * w[0]
    vk = v[:, keep]
    proj = d_xz @ vk
    total = float(np.sum(d_xz * d_xz))
    if total == 0:
        return math.inf
    if total - float(np.sum(proj * proj)) > 1e-12 * total:
        return 0.0
    m = proj / np.sqrt(w[keep])
    lam = jacobi_eigh(SymmetricMatrix(m.T @ m))[0][0]
    return 0.0 if lam <= 0 else 1.0 / math.sqrt(lam)


# -- witness values --------------------------------------------------------------


def _codomain_lower(T: MultilinearOperator, v: np.ndarray, budget: int, seed: int) -> float:
    return codomain_norm_bounds(T.codomain, v, budget, seed)[0]


def _codomain_lower_fast(T: MultilinearOperator, v: np.ndarray, rng: SeededRng) -> float:
    cod = T.codomain
    if isinstance(cod, SpaceSpec) or cod.norm == "l2" or not np.any(v):
        return codomain_norm_bounds(cod, v)[0]
    if cod.norm == "eps":
        return injective_norm_lower(v.reshape(cod.shape), cod.spaces, 2, rng)
    return projective_lower(DenseTensor(cod.spaces, v.reshape(cod.shape)), 1, rng, search=False)[0]


def lower_bound_from_witness(T: MultilinearOperator, w: KwapienWitness, budget: int = 16, seed: int = 0) -> GammaCertificate:
    """The certified witness lower bound.

    Raises
    ------
    CertificateRefused
        If the domination check fails or the denominator vanishes.
    """
    if w.spaces != T.domain:
        raise InputError("witness points do not live in the operator's domain")
    ok, lam = check_domination(w)
    if not ok:
        raise CertificateRefused(f"domination rejected (min eigenvalue {lam:.3e})")
    num_terms = [
        _codomain_lower(T, evaluate(T, *x.factors) - evaluate(T, *z.factors), budget, seed) ** 2 for x, z in w.xz_pairs
    ]
    den_terms = []
    for s, t in w.st_pairs:
        up = min(pi_distance_bounds(s, t, budget, seed).upper, pi_distance_upper_fast(s, t))
        den_terms.append(up**2)
    num, den = float(sum(num_terms)), float(sum(den_terms))
    if den == 0:
        raise CertificateRefused("denominator is zero")
    value = math.sqrt(num / den)
    return GammaCertificate(
        "witness-lower",
        value,
        {
            "witness": w,
            "numerator": num,
            "denominator": den,
            "min_eigenvalue": lam,
            "tolerances": tolerances(),
        },
    )


def _fast_value(T, xz, st, rng) -> float:
    num = 0.0
    for x, z in xz:
        num += _codomain_lower_fast(T, evaluate(T, *x.factors) - evaluate(T, *z.factors), rng) ** 2
    den = sum(pi_distance_upper_fast(s, t) ** 2 for s, t in st)
    return 0.0 if den == 0 else math.sqrt(num / den)


# -- witness search ------------------------------------------------------------------


def _random_point(spaces, rng: SeededRng) -> DecomposablePoint:
    fs = []
    for s in spaces:
        mag = math.exp(rng.uniform(math.log(0.25), math.log(4.0)))
        fs.append(rng.unit_vector(s.dim) * mag)
    return DecomposablePoint(spaces, fs)


def _proposals(T: MultilinearOperator, seeds: list, rng: SeededRng, count: int):
    """Equality-witness proposals: single random pairs and structured variants."""
    spaces = T.domain
    n = T.order
    for i in range(count):
        kind = i % 5
        if kind == 0 and seeds:
            base = seeds[i // 5 % len(seeds)]
            noise = 0.3 * 0.9 ** (i // 5)
            x = DecomposablePoint(spaces, [f + noise * rng.normal(f.size) for f in base.factors])
            yield [(x, x.scaled(0.0))]
        elif kind == 1:
            x = _random_point(spaces, rng)
            yield [(x, x.scaled(0.0))]
        elif kind == 2:
            x = _random_point(spaces, rng)
            k = int(rng.integers(0, n))
            fs = list(x.factors)
            fs[k] = rng.unit_vector(spaces[k].dim) * lp_norm(fs[k], 2)
            yield [(x, DecomposablePoint(spaces, fs))]
        elif kind == 3:
            x = _random_point(spaces, rng)
            z = _random_point(spaces, rng)
            yield [(x, z)]
        else:
            x = _random_point(spaces, rng)
            lam = float(rng.uniform(-1.0, 1.0))
            yield [(x, x.scaled(lam))]


def _search_chunk(T, seeds, rng: SeededRng, count: int):
    best_v, best = -1.0, None
    singles = []
    for pairs in _proposals(T, seeds, rng, count):
        v = _fast_value(T, pairs, pairs, rng)
        singles.append((v, pairs))
        if v > best_v:
            best_v, best = v, (pairs, pairs)
    # perturbed multi-pair witnesses: xz near st, scaled back into domination
    dim = math.prod(s.dim for s in T.domain)
    if dim <= 64 and singles:
        singles.sort(key=lambda t: -t[0])
        top = [p for _, p in singles[: max(2, min(8, count // 8))]]
        tries = max(1, count // 10)
        for i in range(tries):
            k = 2 + i % 3
            st = [top[(i + j) % len(top)][0] for j in range(k)]
            eps = 0.2 * 0.8 ** (i // 3)
            xz = [
                (DecomposablePoint(T.domain, [f + eps * rng.normal(f.size) for f in x.factors]),
                 DecomposablePoint(T.domain, [f + eps * rng.normal(f.size) for f in z.factors]))
                for x, z in st
            ]
            c = _max_scale(_differences(st), _differences(xz))
            if not 0 < c < math.inf:
                continue
            xz = [(x.scaled(c * (1 - 1e-9)), z.scaled(c * (1 - 1e-9))) for x, z in xz]
            if not check_domination(KwapienWitness(xz, st))[0]:
                continue
            v = _fast_value(T, xz, st, rng)
            if v > best_v:
                best_v, best = v, (xz, st)
    return best_v, best


def search_witness(T: MultilinearOperator, seed: int = 0, budget: int = 64) -> tuple[KwapienWitness, GammaCertificate]:
    """Seeded search for a good domination witness.

    Proposals are split into a fixed number of chunks, each with its own
    child generator, so the result does not depend on how many threads run
    them (``GAMMA_FACTOR_THREADS``). Chunk results are merged by max with
    ties going to the lower chunk index.
    """
    if isinstance(budget, bool) or not isinstance(budget, (int, np.integer)) or budget < 1:
        raise InputError(f"budget must be a positive integer, got {budget!r}")
    spaces = T.domain
    rng = SeededRng(seed)
    zero_pt = DecomposablePoint(spaces, [np.zeros(s.dim) for s in spaces])
    if T.is_zero():
        x = DecomposablePoint(spaces, [np.eye(s.dim)[0] for s in spaces])
        w = KwapienWitness.equality([(x, zero_pt)])
        return w, lower_bound_from_witness(T, w)

    # norm maximizers give the ||T|| level with z = 0
    coeffs, balls = _norm_balls(T)
    _, xs = forms.sup_lower(coeffs, balls, min(budget, 16), rng.child(0))
    seeds = [DecomposablePoint(spaces, xs[: T.order])]
    if math.prod(s.dim for s in spaces) <= 64:
        for idx in np.ndindex(*[s.dim for s in spaces]):
            seeds.append(DecomposablePoint(spaces, [np.eye(s.dim)[i] for s, i in zip(spaces, idx)]))

    best_v, best = -1.0, None
    for p in seeds:
        pairs = [(p, zero_pt)]
        v = _fast_value(T, pairs, pairs, rng)
        if v > best_v:
            best_v, best = v, (pairs, pairs)

    chunks = 4
    per = max(1, budget // chunks)
    args = [(T, seeds, rng.child(1, k), per) for k in range(chunks)]
    threads = max_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, chunks)) as ex:
            results = list(ex.map(lambda a: _search_chunk(*a), args))
    else:
        results = [_search_chunk(*a) for a in args]
    for v, cand in results:
        if cand is not None and v > best_v:
            best_v, best = v, cand
    w = KwapienWitness(best[0], best[1])
    return w, lower_bound_from_witness(T, w, budget=min(budget, 16), seed=seed)


# -- upper routes -----------------------------------------------------------------


def upper_bound_hs(T: MultilinearOperator) -> GammaCertificate:
    try:
        v = hs_norm(T)
    except UnsupportedError as exc:
        raise CertificateRefused(str(exc)) from exc
    return GammaCertificate("hs-upper", v, {"hs_norm": v})


def upper_bound_hilbert_domain(T: MultilinearOperator, budget: int = 16, seed: int = 0) -> GammaCertificate:
    if not all(s.euclidean for s in T.domain):
        raise CertificateRefused("the Hilbert-domain route needs Euclidean domain spaces")
    nb = operator_norm_bounds(T, min(budget, 64), seed)
    if not math.isfinite(nb.upper):
        raise CertificateRefused("no certified upper bound on ||T||")
    c = 2.0 ** (T.order - 1)
    return GammaCertificate("hilbert-domain-upper", c * nb.upper, {"factor": c, "norm_upper": nb.upper_certificate})


def _form_norm_upper(phi: np.ndarray, domain) -> forms.FormBound:
    return forms.sup_upper(phi, list(domain))


def upper_bound_rank_one(phi: MultilinearOperator, y, codomain=None) -> GammaCertificate:
    """Gamma(phi . y) <= ||phi|| ||y||."""
    if not phi.is_scalar:
        raise InputError("phi must be scalar valued")
    y = np.asarray(y, dtype=np.float64)
    cod = codomain or euclidean(y.size)
    nb = _form_norm_upper(phi.coeffs[..., 0], phi.domain)
    ny = codomain_norm_upper(cod, y)
    return GammaCertificate("rank-one-upper", nb.value * ny, {"phi_norm_upper": nb.value, "phi_route": nb.route, "y_norm": ny})


def upper_bound_rank_one_sum(T: MultilinearOperator) -> GammaCertificate:
    """Gamma is a norm, so Gamma(sum_k phi_k . y_k) <= sum_k ||phi_k|| ||y_k||.

    Two splittings are tried: the SVD of the (domain | codomain) flattening
    and the expansion along the codomain basis.
    """
    n = T.order
    flat = T.coeffs.reshape(-1, T.codomain.dim)
    dshape = T.coeffs.shape[:n]
    best, detail = math.inf, {}
    u, s, v = svd(flat)
    cost = 0.0
    for k in range(s.size):
        if s[k] == 0:
            continue
        phi = (u[:, k] * s[k]).reshape(dshape)
        cost += _form_norm_upper(phi, T.domain).value * codomain_norm_upper(T.codomain, v[:, k])
    if cost < best:
        best, detail = cost, {"split": "svd", "terms": int(np.sum(s > 0))}
    cost = 0.0
    for j in range(T.codomain.dim):
        col = flat[:, j]
        if not np.any(col):
            continue
        e = np.zeros(T.codomain.dim)
        e[j] = 1.0
        cost += _form_norm_upper(col.reshape(dshape), T.domain).value * codomain_norm_upper(T.codomain, e)
    if cost < best:
        best, detail = cost, {"split": "codomain-basis"}
    return GammaCertificate("rank-one-upper", best, detail)


def upper_bound_routing(T: MultilinearOperator, budget: int = 16, seed: int = 0) -> GammaCertificate:
    """Route l_p domains through l_2: Gamma(T) <= prod c_i * Gamma(T on l_2 domains).

    c_i = max(1, d_i^(1/2 - 1/p_i)) is the norm of the identity l_p -> l_2,
    checked against brute force before use.
    """
    consts = []
    for s in T.domain:
        try:
            consts.append(verified_embedding_constants(s)[0])
        except (BudgetError, UnsupportedError) as exc:
            raise CertificateRefused(f"embedding constant for {s!r} unavailable: {exc}") from exc
    te = with_domain(T, [euclidean(s.dim) for s in T.domain])
    inner = [upper_bound_hilbert_domain(te, budget, seed)]
    try:
        inner.append(upper_bound_hs(te))
    except CertificateRefused:
        pass
    best = min(inner, key=lambda c: c.value)
    c = math.prod(consts)
    return GammaCertificate("routing-upper", c * best.value, {"embedding_constants": consts, "inner": best})


def _linear_norm_upper(S: MultilinearOperator | None, budget: int, seed: int) -> float:
    if S is None:
        return 1.0
    if not S.is_linear:
        raise InputError("expected a linear operator")
    return operator_norm_bounds(S, budget, seed).upper


def upper_bound_composition(
    maps: Sequence[MultilinearOperator | None],
    inner: CertifiedInterval,
    S: MultilinearOperator | None = None,
    budget: int = 16,
    seed: int = 0,
    mid_norm: str = "pi",
) -> GammaCertificate:
    """Gamma(S f_T R) <= ||R|| Gamma(T) ||S|| with R = (x) o (R_1, ..., R_n).

    Into the projective tensor product ||R|| = prod ||R_i||; for any other
    mid-space tag the conservative 2^(n-1) prod ||R_i|| is used.
    """
    if not math.isfinite(inner.upper):
        raise CertificateRefused("inner interval has no finite upper bound")
    norms = [_linear_norm_upper(r, budget, seed) for r in maps]
    r_norm = math.prod(norms)
    if mid_norm != "pi":
        r_norm *= 2.0 ** (len(norms) - 1)
    s_norm = _linear_norm_upper(S, budget, seed)
    value = r_norm * inner.upper * s_norm
    return GammaCertificate(
        "composition-upper",
        value,
        {"R_norm_upper": r_norm, "R_factor_norms": norms, "inner_upper": inner.upper, "S_norm_upper": s_norm, "mid_norm": mid_norm},
    )


def upper_bound_product(T: MultilinearOperator, seed: int = 0, budget: int = 16) -> GammaCertificate:
    """Gamma((x) o (T_1, ..., T_n)) <= 2^(n-1) prod Gamma(T_i) into a projective product."""
    if T.factors is None or not isinstance(T.codomain, TensorSpace) or T.codomain.norm != "pi":
        raise CertificateRefused("not a product of linear maps into a projective tensor product")
    parts = [gamma_interval(f, seed, budget) for f in T.factors]
    c = 2.0 ** (T.order - 1)
    value = c * math.prod(p.upper for p in parts)
    return GammaCertificate("product-upper", value, {"factor": c, "factor_uppers": [p.upper for p in parts]})


def upper_candidates(T: MultilinearOperator, seed: int = 0, budget: int = 16) -> list[GammaCertificate]:
    routes = [
        lambda: upper_bound_hs(T),
        lambda: upper_bound_hilbert_domain(T, budget, seed),
        lambda: upper_bound_rank_one_sum(T),
        lambda: upper_bound_routing(T, budget, seed),
        lambda: upper_bound_product(T, seed, budget),
    ]
    out = []
    for r in routes:
        try:
            out.append(r())
        except CertificateRefused:
            pass
    return out


def gamma_interval(T: MultilinearOperator, seed: int = 0, budget: int = 64) -> CertifiedInterval:
    """lower = max(witness value, ||T|| lower); upper = best applicable route."""
    if isinstance(budget, bool) or not isinstance(budget, (int, np.integer)) or budget < 1:
        raise InputError(f"budget must be a positive integer, got {budget!r}")
    if T.is_zero():
        z = GammaCertificate("zero", 0.0)
        return CertifiedInterval(0.0, 0.0, z, z, [z])
    nbudget = min(budget, 64)
    nb = operator_norm_bounds(T, nbudget, seed)
    w, wcert = search_witness(T, seed, budget)
    lower_cert = wcert
    if nb.lower > wcert.value:
        lower_cert = GammaCertificate("norm-lower", nb.lower, {"norm_lower": nb.lower_certificate, "witness_value": wcert.value})
    cands = upper_candidates(T, seed, nbudget)
    if cands:
        upper_cert = min(cands, key=lambda c: c.value)
    else:
        upper_cert = GammaCertificate("none", math.inf, {"reason": "no certified upper route applies"})
    lo, up = lower_cert.value, upper_cert.value
    if math.isfinite(up) and lo > up + settings.norm_rel_tol * (1 + up):
        raise InconsistencyError(f"Gamma lower {lo} exceeds upper {up}")
    return CertifiedInterval(min(lo, up), up, lower_cert, upper_cert, cands)
