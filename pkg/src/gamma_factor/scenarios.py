"""Named demo scenarios run by ``gamma-factor demo``.

Each scenario returns ``(results, checks)``: a list of result records (one per
computed quantity) and a list of inequality checks ``lhs <= rhs``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .certificates import (
    KwapienWitness,
    check_domination,
    gamma_interval,
    search_witness,
    upper_bound_composition,
    upper_bound_hs,
)
from .gamma_norm import GammaRepresentation, assemble, gamma_lower_elementary, gamma_upper, greedy_split, pairing
from .numerics import SeededRng, nuclear_norm, spectral_norm
from .operators import (
    MultilinearOperator,
    canonical_map,
    evaluate,
    inner_product,
    linear_operator,
    postcompose_linear,
    precompose_linear,
)
from .polynomials import HomogeneousPolynomial, poly_gamma_interval
from .spaces import euclidean
from .tensors import DecomposablePoint, DenseTensor, hilbert_crossnorm, outer

SQRT2 = math.sqrt(2.0)


def check(name: str, lhs: float, rhs: float, tol: float = 0.0) -> dict:
    lhs, rhs = float(lhs), float(rhs)
    return {"name": name, "passed": bool(lhs <= rhs + tol), "lhs": lhs, "rhs": rhs, "tol": tol}


def interval_result(quantity: str, ci) -> dict:
    out = {"quantity": quantity}
    out.update(ci.to_json())
    return out


def _random_operator(rng: SeededRng, dims, m: int) -> MultilinearOperator:
    return MultilinearOperator([euclidean(d) for d in dims], euclidean(m), rng.normal(tuple(dims) + (m,)))


def _random_point(rng: SeededRng, dims) -> DecomposablePoint:
    return DecomposablePoint([euclidean(d) for d in dims], [rng.normal(d) for d in dims])


# -- scenarios ---------------------------------------------------------------------


def inner_product_scenario(seed: int, budget: int):
    G = inner_product(2)
    ci = gamma_interval(G, seed, budget)
    checks = [
        check("lower >= 1", 1.0, ci.lower, 1e-6),
        check("upper <= sqrt(2)", ci.upper, SQRT2, 1e-6),
        check("lower <= upper", ci.lower, ci.upper, 1e-9),
    ]
    return [interval_result("Gamma(inner product on l2^2)", ci)], checks


def canonical_scenario(seed: int, budget: int):
    results, checks = [], []
    for n in (2, 3):
        T = canonical_map([euclidean(2)] * n, "pi")
        ci = gamma_interval(T, seed, budget)
        results.append(interval_result(f"Gamma(canonical map, n={n})", ci))
        checks.append(check(f"n={n}: ||T|| = 1 <= lower", 1.0, ci.lower, 1e-6))
        checks.append(check(f"n={n}: upper <= 2^(n-1)", ci.upper, 2.0 ** (n - 1), 1e-6))
    return results, checks


def sandwich_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (1,))
    checks, worst = [], {"eps<=l2": -math.inf, "l2<=pi": -math.inf}
    count = max(10, min(budget, 200))
    for k in range(count):
        d = 2 + k % 2
        c = rng.normal((d, d))
        u = DenseTensor([euclidean(d)] * 2, c)
        e, h, p = spectral_norm(c), hilbert_crossnorm(u), nuclear_norm(c)
        worst["eps<=l2"] = max(worst["eps<=l2"], e - h)
        worst["l2<=pi"] = max(worst["l2<=pi"], h - p)
    checks.append(check(f"max(eps - l2) over {count} tensors <= 0", worst["eps<=l2"], 0.0, 1e-9))
    checks.append(check(f"max(l2 - pi) over {count} tensors <= 0", worst["l2<=pi"], 0.0, 1e-9))
    return [{"quantity": "tensors checked", "value": float(count)}], checks


def metric_equivalence_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (2,))
    count = max(10, min(budget, 200))
    worst = -math.inf
    for k in range(count):
        d = 2 + k % 2
        p, q = _random_point(rng, [d, d]), _random_point(rng, [d, d])
        diff = outer(p.factors) - outer(q.factors)
        worst = max(worst, nuclear_norm(diff) - 2.0 * spectral_norm(diff))
    checks = [check(f"max(pi(p-q) - 2 eps(p-q)) over {count} pairs <= 0", worst, 0.0, 1e-9)]
    return [{"quantity": "pairs checked", "value": float(count)}], checks


def hilbert_schmidt_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (3,))
    results, checks = [], []
    for k in range(3):
        T = _random_operator(rng, [2, 2], 2)
        ci = gamma_interval(T, seed, budget)
        hs = upper_bound_hs(T).value
        results.append(interval_result(f"Gamma(random bilinear #{k})", ci))
        checks.append(check(f"#{k}: upper <= ||T||_HS", ci.upper, hs, 1e-9))
        checks.append(check(f"#{k}: lower <= ||T||_HS", ci.lower, hs, 1e-9))
    return results, checks


def duality_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (4,))
    results, checks = [], []
    for k in range(4):
        T = _random_operator(rng, [2, 2], 2)
        u = DenseTensor([euclidean(2)] * 3, rng.normal((2, 2, 2)))
        ci = gamma_interval(T, seed, budget)
        gub = gamma_upper(greedy_split(u, 8, seed), 8, seed)
        pr = abs(pairing(T, u))
        results.append({"quantity": f"pair #{k}", "pairing": pr, "gamma_operator_upper": ci.upper, "gamma_tensor_upper": gub})
        checks.append(check(f"#{k}: |phi_T(u)| <= Gamma_ub(T) gamma_ub(u)", pr, ci.upper * gub, 1e-6 * (1 + pr)))
    # the exact case u = (e1 (x) e1 - e2 (x) e2) (x) y
    e = np.eye(2)
    s = [euclidean(2)] * 2
    rep = GammaRepresentation(
        [(DecomposablePoint(s, [e[0], e[0]]), DecomposablePoint(s, [e[1], e[1]]), [1.0, 0.0])], euclidean(2)
    )
    u = assemble(rep)
    lo, up = gamma_lower_elementary(u, 8, seed), gamma_upper(rep, 8, seed)
    results.append({"quantity": "gamma((e1e1 - e2e2) y)", "lower": lo, "upper": up})
    checks.append(check("gamma lower >= 2", 2.0, lo, 1e-6))
    checks.append(check("gamma upper <= 2", up, 2.0, 1e-6))
    return results, checks


def ideal_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (5,))
    results, checks = [], []
    for k in range(3):
        T = _random_operator(rng, [2, 2], 2)
        R = [linear_operator(rng.normal((2, 2))) for _ in range(2)]
        S = linear_operator(rng.normal((2, 2)))
        chain = postcompose_linear(S, precompose_linear(T, R))
        inner = gamma_interval(T, seed, budget)
        up = upper_bound_composition(R, inner, S, 16, seed)
        _, low = search_witness(chain, seed, budget)
        results.append({"quantity": f"chain #{k}", "witness_lower": low.to_json(), "composition_upper": up.to_json()})
        checks.append(check(f"#{k}: witness lower <= ||R|| Gamma(T) ||S||", low.value, up.value, 1e-6))
    return results, checks


def kwapien_scenario(seed: int, budget: int):
    rng = SeededRng(seed, (6,))
    results, checks = [], []
    G = inner_product(2)
    w, cert = search_witness(G, seed, budget)
    results.append({"quantity": "witness lower for the inner product", "certificate": cert.to_json()})
    checks.append(check("witness lower <= sqrt(2)", cert.value, SQRT2, 1e-6))
    worst = -math.inf
    tried = 0
    for k in range(20):
        dims = [2] * (2 + k % 2)
        pairs = [(_random_point(rng, dims), _random_point(rng, dims)) for _ in range(2)]
        lam = 1.0 + rng.uniform()
        wit = KwapienWitness(pairs, [(s.scaled(lam ** (1 / len(dims))), t.scaled(lam ** (1 / len(dims)))) for s, t in pairs])
        if not check_domination(wit)[0]:
            continue
        tried += 1
        for _ in range(5):
            A = _random_operator(rng, dims, 2)
            lhs = sum(np.sum((evaluate(A, *x.factors) - evaluate(A, *z.factors)) ** 2) for x, z in wit.xz_pairs)
            rhs = sum(np.sum((evaluate(A, *s.factors) - evaluate(A, *t.factors)) ** 2) for s, t in wit.st_pairs)
            worst = max(worst, (lhs - rhs) / (1.0 + rhs))
    results.append({"quantity": "dominated witnesses checked", "value": float(tried)})
    checks.append(check("max relative excess of x-side over s-side <= 0", worst, 0.0, 1e-9))
    return results, checks


def polynomial_scenario(seed: int, budget: int):
    P = HomogeneousPolynomial(2, euclidean(2), euclidean(1), np.diag([1.0, -1.0])[:, :, None])
    ci = poly_gamma_interval(P, seed, budget)
    checks = [
        check("poly lower >= 1", 1.0, ci.lower, 1e-6),
        check("poly lower <= operator Gamma upper", ci.lower, ci.upper, 1e-6),
    ]
    return [interval_result("Gamma(x1^2 - x2^2)", ci)], checks


PRESETS: dict[str, Callable] = {
    "inner-product": inner_product_scenario,
    "canonical": canonical_scenario,
    "sandwich": sandwich_scenario,
    "metric-equivalence": metric_equivalence_scenario,
    "hilbert-schmidt": hilbert_schmidt_scenario,
    "duality": duality_scenario,
    "ideal": ideal_scenario,
    "kwapien": kwapien_scenario,
    "polynomial": polynomial_scenario,
}


def run_preset(name: str, seed: int = 0, budget: int = 64):
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name](seed, budget)

