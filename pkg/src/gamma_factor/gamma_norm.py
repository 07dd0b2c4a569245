"""The tensor norm gamma on X_1 (x) ... (x) X_n (x) Y.

A representation u = sum_i (p_i - q_i) (x) y_i with the family (p_i, q_i)
dominated by (a_i, b_i) costs

    (sum_i pi(a_i - b_i)^2)^(1/2) * (sum_i ||y_i||^2)^(1/2),

and gamma(u) is the infimum of that cost. Upper bounds therefore come from
explicit representations; lower bounds come from functionals whose norm in
the dual is controlled (elementary phi (x) y^*, or operators with a
certified Gamma upper bound).
"""

from __future__ import annotations

import math

import numpy as np

from .certificates import CertifiedInterval, KwapienWitness, check_domination, gamma_interval
from .errors import CertificateRefused, InconsistencyError, InputError
from .numerics import SeededRng, multistart_maximize, svd
from .operators import MultilinearOperator
from .spaces import SpaceSpec, as_vector, dual_space, lp_norm
from .tensors import (
    DecomposablePoint,
    DenseTensor,
    fiber_terms,
    outer,
    pi_distance_bounds,
    projective_lower,
    projective_upper,
)


class GammaRepresentation:
    """Terms (p_i, q_i, y_i) with dominators (a_i, b_i).

    Dominators default to the terms' own pairs, which is always admissible.
    """

    __slots__ = ("terms", "dominators", "spaces", "codomain")

    def __init__(self, terms, codomain: SpaceSpec, dominators=None):
        terms = [tuple(t) for t in terms]
        if not terms:
            raise InputError("a representation needs at least one term")
        if not isinstance(codomain, SpaceSpec):
            raise InputError("codomain must be a SpaceSpec")
        spaces = terms[0][0].spaces
        clean = []
        for t in terms:
            if len(t) != 3:
                raise InputError("terms are triples (p, q, y)")
            p, q, y = t
            if not isinstance(p, DecomposablePoint) or not isinstance(q, DecomposablePoint):
                raise InputError("p and q must be DecomposablePoints")
            if p.spaces != spaces or q.spaces != spaces:
                raise InputError("terms live in different tensor products")
            yv = np.array(as_vector(codomain, y))
            yv.setflags(write=False)
            clean.append((p, q, yv))
        if dominators is None:
            dominators = [(p, q) for p, q, _ in clean]
        dominators = [tuple(d) for d in dominators]
        # pad with zero pairs so counts agree
        zero = DecomposablePoint(spaces, [np.zeros(s.dim) for s in spaces])
        while len(dominators) < len(clean):
            dominators.append((zero, zero))
        if len(dominators) != len(clean):
            raise InputError("more dominators than terms")
        object.__setattr__(self, "terms", tuple(clean))
        object.__setattr__(self, "dominators", tuple(dominators))
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "codomain", codomain)

    def __setattr__(self, name, value):
        raise AttributeError("GammaRepresentation is immutable")

    def __len__(self):
        return len(self.terms)

    def witness(self) -> KwapienWitness:
        return KwapienWitness([(p, q) for p, q, _ in self.terms], self.dominators)

    def validate(self) -> float:
        ok, lam = check_domination(self.witness())
        if not ok:
            raise CertificateRefused(f"representation is not dominated (min eigenvalue {lam:.3e})")
        return lam

    def to_json(self) -> dict:
        return {
            "spaces": [s.to_json() for s in self.spaces],
            "codomain": self.codomain.to_json(),
            "terms": [{"p": p.to_json(), "q": q.to_json(), "y": y.tolist()} for p, q, y in self.terms],
            "dominators": [[a.to_json(), b.to_json()] for a, b in self.dominators],
        }

    @classmethod
    def from_json(cls, obj) -> "GammaRepresentation":
        for key in ("spaces", "codomain", "terms"):
            if not isinstance(obj, dict) or key not in obj:
                raise InputError(f"representation JSON is missing {key!r}")
        spaces = [SpaceSpec.from_json(s) for s in obj["spaces"]]
        cod = SpaceSpec.from_json(obj["codomain"])
        terms = []
        for i, t in enumerate(obj["terms"]):
            if not isinstance(t, dict) or not {"p", "q", "y"} <= set(t):
                raise InputError(f"terms[{i}] needs 'p', 'q' and 'y'")
            terms.append((DecomposablePoint.from_json(t["p"], spaces), DecomposablePoint.from_json(t["q"], spaces), t["y"]))
        doms = None
        if obj.get("dominators") is not None:
            doms = [(DecomposablePoint.from_json(a, spaces), DecomposablePoint.from_json(b, spaces)) for a, b in obj["dominators"]]
        return cls(terms, cod, doms)


def assemble(rep: GammaRepresentation) -> DenseTensor:
    """The tensor sum_i (p_i - q_i) (x) y_i in X_1 (x) ... (x) X_n (x) Y."""
    shape = tuple(s.dim for s in rep.spaces) + (rep.codomain.dim,)
    out = np.zeros(shape)
    for p, q, y in rep.terms:
        out += np.multiply.outer(outer(p.factors) - outer(q.factors), y)
    return DenseTensor(list(rep.spaces) + [rep.codomain], out)


def _termwise_dominated(rep: GammaRepresentation) -> bool:
    for (p, q, _), dom in zip(rep.terms, rep.dominators):
        if not check_domination(KwapienWitness([(p, q)], [dom]))[0]:
            return False
    return True


def gamma_upper_details(rep: GammaRepresentation, budget: int = 16, seed: int = 0) -> tuple[float, dict]:
    """Certified upper bound on gamma(assemble(rep)) with its evidence."""
    lam = rep.validate()
    a = np.array([pi_distance_bounds(s, t, budget, seed).upper for s, t in rep.dominators])
    b = np.array([lp_norm(y, rep.codomain.pf) for _, _, y in rep.terms])
    plain = float(np.linalg.norm(a) * np.linalg.norm(b))
    detail = {"route": "representation", "value": plain, "pi_uppers": a, "y_norms": b, "min_eigenvalue": lam}
    if _termwise_dominated(rep):
        # rescaling term i by lambda_i (pairs) and 1/lambda_i (y_i) keeps it
        # dominated; the best choice gives sum a_i b_i by Cauchy-Schwarz
        bal = float(np.sum(a * b))
        if bal < plain:
            detail.update(route="rebalanced", value=bal, unbalanced=plain)
            return bal, detail
    return plain, detail


def gamma_upper(rep: GammaRepresentation, budget: int = 16, seed: int = 0) -> float:
    return gamma_upper_details(rep, budget, seed)[0]


def greedy_split(u: DenseTensor, budget: int = 16, seed: int = 0) -> GammaRepresentation:
    """A representation of u built from an elementary decomposition.

    Every term x^1 (x) ... (x) x^n (x) y becomes (p, 0, y) with p the
    elementary tensor of the x's and its own pair as dominator; the floating
    residual is split exactly into basis tensors times fibers along Y.
    """
    if u.order < 2:
        raise InputError("u must have at least one domain factor and the Y factor")
    spaces, cod = list(u.spaces[:-1]), u.spaces[-1]
    _, cert = projective_upper(u, budget, SeededRng(seed))
    terms_src = cert.get("terms")
    if terms_src is None:
        terms_src = fiber_terms(u.coeffs, u.order - 1)
    resid = np.array(u.coeffs)
    for t in terms_src:
        resid = resid - outer(t)
    terms_src = list(terms_src) + fiber_terms(resid, u.order - 1)
    zero = [np.zeros(s.dim) for s in spaces]
    terms = []
    for t in terms_src:
        p = DecomposablePoint(spaces, t[:-1])
        terms.append((p, DecomposablePoint(spaces, zero), t[-1]))
    return GammaRepresentation(terms, cod)


def gamma_lower_elementary(u: DenseTensor, budget: int = 16, seed: int = 0) -> float:
    """max over y^* of pi(<u, y^*>) / ||y^*||, a lower bound for gamma(u).

    For a fixed y^* the sup of |<phi (x) y^*, u>| / ||phi|| over phi is the
    projective norm of the contraction w = <u, y^*> (duality), and
    ||phi (x) y^*|| <= ||phi|| ||y^*|| in the dual of gamma. Each value uses a
    certified pi lower bound.
    """
    if u.is_zero():
        return 0.0
    spaces, cod = list(u.spaces[:-1]), u.spaces[-1]
    ystar_space = dual_space(cod)
    rng = SeededRng(seed)
    flat = u.coeffs.reshape(-1, cod.dim)

    def value(ystar: np.ndarray) -> float:
        nrm = lp_norm(ystar, ystar_space.pf)
        if nrm == 0:
            return 0.0
        w = DenseTensor(spaces, (flat @ ystar).reshape(u.shape[:-1]))
        if w.is_zero():
            return 0.0
        return projective_lower(w, 1, rng, search=False)[0] / nrm

    cands = list(np.eye(cod.dim))
    _, s, v = svd(flat)
    cands += [v[:, k] for k in range(s.size) if s[k] > 0]
    best = max(value(c) for c in cands)
    if cod.dim > 1:
        xs, _ = multistart_maximize(lambda z: value(z[0]), [(cod.dim, "sphere")], max(1, min(budget, 4)), rng,
                                      starts=[[c / np.linalg.norm(c)] for c in cands], max_iter=30)
        best = max(best, value(xs[0]))
    return float(best)


def pairing(T: MultilinearOperator, u: DenseTensor) -> float:
    """phi_T(u) = sum of T's coefficients against u's (T maps into the dual of Y)."""
    if T.coeffs.shape != u.shape:
        raise InputError(f"operator coefficients {T.coeffs.shape} do not pair with tensor {u.shape}")
    return float(np.sum(T.coeffs * u.coeffs))


def gamma_lower_via_operator(
    u: DenseTensor, T: MultilinearOperator, interval: CertifiedInterval | None = None, seed: int = 0, budget: int = 64
) -> float:
    """|phi_T(u)| / Gamma_ub(T), valid since |phi_T(u)| <= Gamma(T) gamma(u)."""
    if T.domain != tuple(u.spaces[:-1]) or T.codomain != dual_space(u.spaces[-1]):
        raise InputError("T must map the domain factors of u into the dual of its last factor")
    pr = pairing(T, u)
    if pr == 0:
        return 0.0
    if interval is None:
        interval = gamma_interval(T, seed, budget)
    ub = interval.upper
    if ub == 0:
        raise InconsistencyError("Gamma upper bound is zero but the pairing is not")
    if not math.isfinite(ub):
        return 0.0
    return abs(pr) / ub
