import numpy as np
import pytest

from gamma_factor import SeededRng, SymmetricMatrix, jacobi_eigh, min_eigenvalue, multistart_maximize, svd
from gamma_factor.errors import InputError, SearchError
from gamma_factor.numerics import nuclear_norm, spectral_norm


def test_eigh_identity():
    w, v = jacobi_eigh(SymmetricMatrix(np.eye(3)))
    np.testing.assert_allclose(w, [1, 1, 1])
    np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-14)


def test_eigh_diagonal():
    w, v = jacobi_eigh(SymmetricMatrix(np.diag([1.0, 3.0])))
    np.testing.assert_allclose(w, [3, 1])
    np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]])


def test_eigh_random_residual(nprng):
    a = nprng.standard_normal((5, 5))
    s = SymmetricMatrix(a + a.T)
    w, v = jacobi_eigh(s)
    assert np.all(np.diff(w) <= 0)
    for k in range(5):
        assert np.linalg.norm(s.entries @ v[:, k] - w[k] * v[:, k]) <= 1e-10
    assert abs(w.sum() - s.trace()) <= 1e-9 * (1 + abs(s.trace()))
    np.testing.assert_allclose(w, np.linalg.eigvalsh(s.entries)[::-1], atol=1e-12)


def test_eigh_rejects_nan():
    with pytest.raises(InputError):
        SymmetricMatrix([[1.0, np.nan], [np.nan, 0.0]])


def test_svd_orthogonal():
    _, s, _ = svd(np.diag([1.0, -1.0]))
    np.testing.assert_allclose(s, [1, 1])


def test_svd_rank_one():
    u = np.array([0.6, 0.8])
    v = np.array([0.0, 1.0, 0.0])
    _, s, _ = svd(np.outer(u, v))
    np.testing.assert_allclose(s, [1, 0], atol=1e-15)


@pytest.mark.parametrize("shape", [(3, 4), (4, 3), (1, 5), (5, 1), (6, 6)])
def test_svd_reconstruction(nprng, shape):
    a = nprng.standard_normal(shape)
    u, s, v = svd(a)
    assert np.linalg.norm(u * s @ v.T - a) <= 1e-10
    assert abs(np.sum(s**2) - np.sum(a**2)) <= 1e-9 * np.sum(a**2)
    np.testing.assert_allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-12)


def test_svd_rejects_inf():
    with pytest.raises(InputError):
        svd([[1.0, np.inf]])


def test_spectral_and_nuclear(nprng):
    a = nprng.standard_normal((3, 3))
    ref = np.linalg.svd(a, compute_uv=False)
    assert spectral_norm(a) == pytest.approx(ref[0], rel=1e-12)
    assert nuclear_norm(a) == pytest.approx(ref.sum(), rel=1e-12)


def test_min_eigenvalue_cases(nprng):
    assert min_eigenvalue(SymmetricMatrix(np.zeros((2, 2)))) == 0.0
    assert min_eigenvalue(SymmetricMatrix(np.diag([2.0, -1.0]))) == pytest.approx(-1.0)
    vs = nprng.standard_normal((4, 6))
    assert min_eigenvalue(SymmetricMatrix(vs.T @ vs)) >= -1e-12


def test_multistart_linear_objective():
    c = np.array([3.0, -4.0, 12.0])
    xs, val = multistart_maximize(lambda x: float(c @ x[0]), [(3, "sphere")], 8, SeededRng(0))
    assert val == pytest.approx(13.0, abs=1e-6)
    assert np.linalg.norm(xs[0]) == pytest.approx(1.0)


def test_multistart_constant():
    _, val = multistart_maximize(lambda x: 2.5, [(2, "ball")], 3, SeededRng(0))
    assert val == 2.5


def test_multistart_bilinear(nprng):
    a = nprng.standard_normal((3, 2))
    _, val = multistart_maximize(lambda x: float(x[0] @ a @ x[1]), [(3, "sphere"), (2, "sphere")], 8, SeededRng(3))
    assert val == pytest.approx(np.linalg.svd(a, compute_uv=False)[0], abs=1e-6)


def test_multistart_deterministic():
    f = lambda x: float(np.sin(3 * x[0][0]) + x[0][1] ** 3)  # noqa: E731
    a = multistart_maximize(f, [(2, "sphere")], 5, SeededRng(11))
    b = multistart_maximize(f, [(2, "sphere")], 5, SeededRng(11))
    assert a[1] == b[1]
    np.testing.assert_array_equal(a[0][0], b[0][0])


def test_multistart_non_finite():
    with pytest.raises(SearchError):
        multistart_maximize(lambda x: float("nan"), [(2, "ball")], 2, SeededRng(0))


def test_rng_streams_independent():
    a = SeededRng(5).child(1).normal(4)
    b = SeededRng(5).child(2).normal(4)
    c = SeededRng(5).child(1).normal(4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, c)
