"""Acceptance criteria AC1 to AC11.

Each test prints one ``ACn PASS`` or ``ACn FAIL`` line (visible in ``pytest -v``
output) and then asserts, so a failure is both reported and fatal.
"""

import json
import math
import pathlib
import time

import numpy as np
import pytest

from gamma_factor import (
    DecomposablePoint,
    DenseTensor,
    GammaRepresentation,
    HomogeneousPolynomial,
    KwapienWitness,
    MultilinearOperator,
    assemble,
    check_domination,
    euclidean,
    evaluate,
    gamma_interval,
    gamma_lower_elementary,
    gamma_upper,
    greedy_split,
    inner_product,
    injective_norm_bounds,
    linear_operator,
    operator_norm_bounds,
    pairing,
    poly_gamma_interval,
    postcompose_linear,
    precompose_linear,
    projective_norm_bounds,
    search_witness,
    upper_bound_composition,
)
from gamma_factor.cli import main
from gamma_factor.numerics import nuclear_norm, spectral_norm

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "samples"


class Criterion:
    def __init__(self, name, limit_s):
        self.name, self.limit = name, limit_s
        self.failures = []

    def expect(self, ok, msg):
        if not ok and len(self.failures) < 5:
            self.failures.append(msg)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is None and elapsed >= self.limit:
            self.failures.append(f"took {elapsed:.2f} s, limit {self.limit} s")
        ok = exc_type is None and not self.failures
        print(f"\n{self.name} {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s)")
        if exc_type is None:
            assert ok, "; ".join(self.failures)
        return False


@pytest.fixture
def crit(capsys):
    def make(name, limit_s):
        return _Reported(Criterion(name, limit_s), capsys)

    return make


class _Reported:
    # print outside pytest's capture so the line lands in the -v log
    def __init__(self, c, capsys):
        self.c, self.capsys = c, capsys

    def __enter__(self):
        return self.c.__enter__()

    def __exit__(self, *exc):
        with self.capsys.disabled():
            return self.c.__exit__(*exc)


def _eu_point(rng, dims):
    return DecomposablePoint([euclidean(d) for d in dims], [rng.normal(size=d) for d in dims])


def _eu_operator(rng, dims, m):
    return MultilinearOperator([euclidean(d) for d in dims], euclidean(m), rng.normal(size=tuple(dims) + (m,)))


def test_ac1_projective_injective_oracles(crit):
    rng = np.random.default_rng(101)
    with crit("AC1", 30) as c:
        for k in range(100):
            coeffs = rng.normal(size=(3, 3))
            u = DenseTensor([euclidean(3)] * 2, coeffs)
            oracle = nuclear_norm(coeffs)
            # exact=False forces the search and duality routes
            b = projective_norm_bounds(u, 200, k, exact=False)
            c.expect(b.lower >= oracle * (1 - 1e-6), f"#{k}: pi lower {b.lower} vs {oracle}")
            c.expect(b.lower <= oracle * (1 + 1e-9), f"#{k}: pi lower {b.lower} above {oracle}")
            c.expect(b.upper <= oracle * 1.05, f"#{k}: pi upper {b.upper} vs {oracle}")
            c.expect(b.upper >= oracle * (1 - 1e-9), f"#{k}: pi upper {b.upper} below {oracle}")
            e = injective_norm_bounds(u, 200, k)
            c.expect(abs(e.lower - spectral_norm(coeffs)) <= 1e-6, f"#{k}: eps lower {e.lower}")


def test_ac2_crossnorm_sandwich(crit):
    rng = np.random.default_rng(102)
    with crit("AC2", 5) as c:
        for k in range(1000):
            d = 2 + k % 2
            coeffs = rng.normal(size=(d, d))
            e, h, p = spectral_norm(coeffs), float(np.linalg.norm(coeffs)), nuclear_norm(coeffs)
            c.expect(e <= h + 1e-9 and h <= p + 1e-9, f"#{k}: {e} {h} {p}")


def test_ac3_metric_equivalence(crit):
    rng = np.random.default_rng(103)
    with crit("AC3", 5) as c:
        for k in range(1000):
            d = 2 + k % 2
            p, q = (np.outer(rng.normal(size=d), rng.normal(size=d)) for _ in range(2))
            diff = p - q
            c.expect(nuclear_norm(diff) <= 2 * spectral_norm(diff) + 1e-9, f"#{k}")


def _dominated_witness(rng, k):
    dims = [int(rng.integers(2, 4)) for _ in range(2 + k % 2)]
    pairs = [(_eu_point(rng, dims), _eu_point(rng, dims)) for _ in range(int(rng.integers(1, 4)))]
    kind = k % 3
    if kind == 0:
        return KwapienWitness.equality(pairs)
    if kind == 1:
        lam = (1 + rng.uniform()) ** (1 / len(dims))
        return KwapienWitness(pairs, [(s.scaled(lam), t.scaled(lam)) for s, t in pairs])
    # shrink each x-side pair by its own factor and pad the s-side with extra
    # random pairs; noise that leaves the span of the s-side differences would
    # be rejected, so only the accepted kind is generated
    xz = [(x.scaled(c), z.scaled(c)) for (x, z), c in zip(pairs, rng.uniform(0.8, 1.0, len(pairs)))]
    extra = [(_eu_point(rng, dims), _eu_point(rng, dims)) for _ in range(int(rng.integers(1, 3)))]
    return KwapienWitness(xz, list(pairs) + extra)


def test_ac4_witness_soundness(crit):
    rng = np.random.default_rng(104)
    with crit("AC4", 30) as c:
        for k in range(200):
            w = _dominated_witness(rng, k)
            c.expect(check_domination(w)[0], f"#{k}: witness rejected")
            dims = [f.size for f in w.st_pairs[0][0].factors]
            for _ in range(20):
                A = _eu_operator(rng, dims, int(rng.integers(1, 4)))
                lhs = sum(np.sum((evaluate(A, *x.factors) - evaluate(A, *z.factors)) ** 2) for x, z in w.xz_pairs)
                rhs = sum(np.sum((evaluate(A, *s.factors) - evaluate(A, *t.factors)) ** 2) for s, t in w.st_pairs)
                c.expect(lhs <= rhs + 1e-9 * (1 + lhs + rhs), f"#{k}: {lhs} > {rhs}")


def test_ac5_interval_consistency(crit):
    rng = np.random.default_rng(105)
    with crit("AC5", 60) as c:
        for k in range(50):
            n = 2 + k % 2
            T = _eu_operator(rng, [int(rng.integers(1, 4)) for _ in range(n)], int(rng.integers(1, 4)))
            ci = gamma_interval(T, k, 500)
            norm = operator_norm_bounds(T, 16, k)
            c.expect(ci.lower <= ci.upper + 1e-6, f"#{k}: {ci.lower} > {ci.upper}")
            c.expect(ci.lower >= norm.lower - 1e-6, f"#{k}: {ci.lower} < ||T|| lower {norm.lower}")


def test_ac6_inner_product_bracket(crit):
    with crit("AC6", 5) as c:
        ci = gamma_interval(inner_product(2), 0, 64)
        c.expect(ci.lower >= 1 - 1e-6, f"lower {ci.lower}")
        c.expect(ci.upper <= math.sqrt(2) + 1e-6, f"upper {ci.upper}")


def test_ac7_duality(crit):
    rng = np.random.default_rng(107)
    with crit("AC7", 30) as c:
        for k in range(100):
            dims = [2] * (2 + k % 2)
            m = int(rng.integers(1, 3))
            T = _eu_operator(rng, dims, m)
            u = DenseTensor([euclidean(d) for d in dims] + [euclidean(m)], rng.normal(size=tuple(dims) + (m,)))
            g_T = gamma_interval(T, k, 8).upper
            g_u = gamma_upper(greedy_split(u, 8, k), 8, k)
            pr = abs(pairing(T, u))
            c.expect(pr <= g_T * g_u + 1e-6 * (1 + pr), f"#{k}: {pr} > {g_T} * {g_u}")


def test_ac8_gamma_exact_case(crit):
    e = np.eye(2)
    s = [euclidean(2)] * 2
    y = np.array([0.6, 0.8])
    rep = GammaRepresentation([(DecomposablePoint(s, [e[0], e[0]]), DecomposablePoint(s, [e[1], e[1]]), y)], euclidean(2))
    with crit("AC8", 5) as c:
        u = assemble(rep)
        lo, up = gamma_lower_elementary(u, 16, 0), gamma_upper(rep, 16, 0)
        c.expect(lo >= 2 - 1e-6, f"lower {lo}")
        c.expect(up <= 2 + 1e-6, f"upper {up}")


def test_ac9_ideal_composition(crit):
    rng = np.random.default_rng(109)
    with crit("AC9", 30) as c:
        for k in range(50):
            n = 2 + k % 2
            T = _eu_operator(rng, [2] * n, 2)
            R = [linear_operator(rng.normal(size=(2, 2))) for _ in range(n)]
            S = linear_operator(rng.normal(size=(2, 2)))
            chain = postcompose_linear(S, precompose_linear(T, R))
            up = upper_bound_composition(R, gamma_interval(T, k, 8), S, 8, k)
            _, low = search_witness(chain, k, 16)
            c.expect(low.value <= up.value + 1e-6, f"#{k}: {low.value} > {up.value}")


def test_ac10_polynomials(crit):
    rng = np.random.default_rng(110)
    with crit("AC10", 30) as c:
        P = HomogeneousPolynomial(2, euclidean(2), euclidean(1), np.diag([1.0, -1.0])[:, :, None])
        ci = poly_gamma_interval(P, 0, 64)
        c.expect(ci.lower >= 1 - 1e-6, f"x1^2 - x2^2 lower {ci.lower}")
        for k in range(30):
            d, m = int(rng.integers(2, 4)), int(rng.integers(1, 3))
            a = rng.normal(size=(d, d, m))
            a = (a + a.transpose(1, 0, 2)) / 2
            T = MultilinearOperator([euclidean(d)] * 2, euclidean(m), a)
            P = HomogeneousPolynomial(2, euclidean(d), euclidean(m), a)
            lo = poly_gamma_interval(P, k, 16).lower
            up = gamma_interval(T, k, 16).upper
            c.expect(lo <= up + 1e-6, f"#{k}: {lo} > {up}")


JOBS = [
    ["demo", "inner-product"],
    ["demo", "sandwich"],
    ["demo", "metric-equivalence"],
    ["demo", "hilbert-schmidt"],
    ["demo", "kwapien"],
    ["demo", "polynomial"],
    ["norms", "-i", SAMPLES / "tensor_3x3.json"],
    ["norms", "-i", SAMPLES / "l1_bilinear.json"],
    ["certify", "-i", SAMPLES / "inner_product.json", "-i", SAMPLES / "diag_witness.json"],
    ["certify", "-i", SAMPLES / "zero_certify.json"],
    ["search-witness", "-i", SAMPLES / "inner_product.json"],
    ["gamma", "-i", SAMPLES / "inner_product.json"],
    ["gamma", "-i", SAMPLES / "gamma_exact.json"],
    ["poly", "-i", SAMPLES / "poly_x1sq_minus_x2sq.json"],
]


def test_ac11_determinism(crit, capsys):
    with crit("AC11", 10) as c:
        for job in JOBS:
            argv = [str(a) for a in job] + ["--seed", "7"]
            outs = []
            for _ in range(2):
                code = main(argv)
                outs.append(capsys.readouterr().out)
            c.expect(code in (0, 1) and outs[0] == outs[1], f"{' '.join(job[:2])}: differs or code {code}")
            json.loads(outs[0])
