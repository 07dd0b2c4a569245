import math

import numpy as np
import pytest

from conftest import e, point
from gamma_factor import (
    DenseTensor,
    MultilinearOperator,
    SpaceSpec,
    canonical_map,
    euclidean,
    evaluate,
    fix_coordinates,
    hs_norm,
    identity,
    inner_product,
    linear_operator,
    operator_norm_bounds,
    postcompose_linear,
    precompose_linear,
    product_of_linear,
    rank_one,
    scalar_form,
)
from gamma_factor.errors import InputError, UnsupportedError
from gamma_factor.operators import TensorSpace, sigma_apply
from gamma_factor.tensors import outer, to_dense

G = inner_product(2)


def random_op(nprng, dims, m, p=2):
    return MultilinearOperator([SpaceSpec(d, p) for d in dims], euclidean(m), nprng.standard_normal(tuple(dims) + (m,)))


def test_evaluate_inner_product():
    assert evaluate(G, e(0), e(0))[0] == 1.0
    assert evaluate(G, e(0), e(1))[0] == 0.0
    assert not np.any(evaluate(G, [0, 0], [3, 4]))


def test_evaluate_errors():
    with pytest.raises(InputError):
        evaluate(G, e(0))
    with pytest.raises(InputError):
        evaluate(G, e(0), [1, 0, 0])


def test_multilinearity(nprng):
    T = random_op(nprng, [2, 3, 2], 2)
    x, x2, y, z = nprng.standard_normal(2), nprng.standard_normal(2), nprng.standard_normal(3), nprng.standard_normal(2)
    np.testing.assert_allclose(evaluate(T, 2 * x, y, z), 2 * evaluate(T, x, y, z), atol=1e-12)
    np.testing.assert_allclose(evaluate(T, x + x2, y, z), evaluate(T, x, y, z) + evaluate(T, x2, y, z), atol=1e-12)


def test_sigma_apply(nprng):
    T = random_op(nprng, [2, 3], 2)
    p = point(nprng.standard_normal(2), nprng.standard_normal(3))
    q = point(nprng.standard_normal(2), nprng.standard_normal(3))
    np.testing.assert_allclose(sigma_apply(T, to_dense(p)), evaluate(T, *p.factors), atol=1e-12)
    np.testing.assert_allclose(
        sigma_apply(T, to_dense(p) - to_dense(q)), evaluate(T, *p.factors) - evaluate(T, *q.factors), atol=1e-12
    )
    assert not np.any(sigma_apply(T, DenseTensor(T.domain, np.zeros((2, 3)))))


def test_norm_examples():
    iv = operator_norm_bounds(G)
    assert (iv.lower, iv.upper) == pytest.approx((1.0, 1.0))
    iv = operator_norm_bounds(inner_product(2, "inf"))
    assert (iv.lower, iv.upper) == pytest.approx((2.0, 2.0))
    z = operator_norm_bounds(G * 0.0)
    assert (z.lower, z.upper) == (0.0, 0.0)


def test_norm_within_hs(nprng):
    for _ in range(5):
        T = random_op(nprng, [2, 2], 3)
        iv = operator_norm_bounds(T, 8)
        assert 0 <= iv.lower <= iv.upper + 1e-9
        assert iv.upper <= hs_norm(T) + 1e-9


def test_norm_budget_validation():
    with pytest.raises(InputError):
        operator_norm_bounds(G, 0)


def test_norm_l1_domain_vertex_exact():
    # l1 domains: the sup is attained at basis vectors
    rng = np.random.default_rng(3)
    T = random_op(rng, [3, 2], 2, p=1)
    best = max(np.linalg.norm(T.coeffs[i, j]) for i in range(3) for j in range(2))
    iv = operator_norm_bounds(T)
    assert iv.lower == pytest.approx(best, rel=1e-12)
    assert iv.upper == pytest.approx(best, rel=1e-12)


def test_hs_norm_examples(nprng):
    assert hs_norm(G) == pytest.approx(math.sqrt(2))
    assert hs_norm(G * 0.0) == 0.0
    phi = scalar_form([euclidean(2), euclidean(3)], nprng.standard_normal((2, 3)))
    y = nprng.standard_normal(4)
    assert hs_norm(rank_one(phi, y)) == pytest.approx(np.linalg.norm(phi.coeffs) * np.linalg.norm(y))
    with pytest.raises(UnsupportedError):
        hs_norm(inner_product(2, 1))


def test_fix_coordinates(nprng):
    f = fix_coordinates(G, {1: e(0)})
    assert f.order == 1
    np.testing.assert_allclose(f.coeffs[:, 0], [1, 0])
    assert fix_coordinates(G, {0: [0, 0]}).is_zero()
    T = random_op(nprng, [2, 3, 2], 2)
    v = nprng.standard_normal(2)
    x, y = nprng.standard_normal(2), nprng.standard_normal(3)
    np.testing.assert_allclose(evaluate(fix_coordinates(T, {2: v}), x, y), evaluate(T, x, y, v), atol=1e-12)
    with pytest.raises(InputError):
        fix_coordinates(G, {0: e(0), 1: e(1)})


def test_rank_one(nprng):
    r = rank_one(G, e(0))
    np.testing.assert_array_equal(r.coeffs, np.multiply.outer(np.eye(2), e(0)))
    assert rank_one(G, [0.0, 0.0]).is_zero()
    phi = scalar_form([euclidean(2), euclidean(2)], nprng.standard_normal((2, 2)))
    y = nprng.standard_normal(3)
    assert operator_norm_bounds(rank_one(phi, y)).upper <= operator_norm_bounds(phi).upper * np.linalg.norm(y) + 1e-9


def test_product_of_linear():
    T = canonical_map([euclidean(2), euclidean(2)])
    assert isinstance(T.codomain, TensorSpace)
    np.testing.assert_array_equal(evaluate(T, [1, 2], [3, 4]), np.outer([1, 2], [3, 4]).ravel())
    D = linear_operator(np.diag([1.0, 2.0]))
    P = product_of_linear([D, D])
    np.testing.assert_array_equal(evaluate(P, e(1), e(1)), 4 * outer([e(1), e(1)]).ravel())
    assert product_of_linear([D, linear_operator(np.zeros((2, 2)))]).is_zero()


def test_canonical_map_norm_is_one():
    iv = operator_norm_bounds(canonical_map([euclidean(2)] * 3))
    assert (iv.lower, iv.upper) == pytest.approx((1.0, 1.0))


def test_compositions(nprng):
    T = random_op(nprng, [2, 3], 2)
    same = precompose_linear(T, [identity(euclidean(2)), None])
    np.testing.assert_array_equal(same.coeffs, T.coeffs)
    assert postcompose_linear(linear_operator(np.zeros((4, 2))), T).is_zero()
    R1, R2 = linear_operator(nprng.standard_normal((2, 3))), linear_operator(nprng.standard_normal((3, 2)))
    S = linear_operator(nprng.standard_normal((4, 2)))
    chain = postcompose_linear(S, precompose_linear(T, [R1, R2]))
    for _ in range(100):
        a, b = nprng.standard_normal(3), nprng.standard_normal(2)
        want = S.matrix() @ evaluate(T, R1.matrix() @ a, R2.matrix() @ b)
        np.testing.assert_allclose(evaluate(chain, a, b), want, atol=1e-12)
    with pytest.raises(InputError):
        precompose_linear(T, [R2, None])


def test_json_round_trip(nprng):
    for T in [random_op(nprng, [2, 3], 2), canonical_map([euclidean(2), SpaceSpec(2, 1)], "eps")]:
        back = MultilinearOperator.from_json(T.to_json())
        assert back.domain == T.domain and back.codomain == T.codomain
        np.testing.assert_array_equal(back.coeffs, T.coeffs)


def test_rejects_bad_shapes():
    with pytest.raises(InputError):
        MultilinearOperator([euclidean(2)], euclidean(2), np.zeros((2, 3)))
    with pytest.raises(InputError):
        MultilinearOperator([euclidean(2)], euclidean(2), [[np.inf, 0], [0, 0]])
