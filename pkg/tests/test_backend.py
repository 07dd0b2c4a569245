"""The compiled kernels and the NumPy fallback must agree."""

import numpy as np
import pytest

from gamma_factor import _backend, _kernels_py, inner_product, gamma_interval

compiled = pytest.importorskip("gamma_factor._kernels")


@pytest.fixture
def restore_backend():
    name = _backend.NAME
    yield
    _backend.use(name)


def test_names():
    assert compiled.NAME == "cython" and _kernels_py.NAME == "python"


def test_eigh_parity(nprng):
    a = nprng.standard_normal((6, 6))
    a = a + a.T
    w1, v1, _ = compiled.jacobi_eigh(a, 1e-14, 64)
    w2, v2, _ = _kernels_py.jacobi_eigh(a, 1e-14, 64)
    np.testing.assert_allclose(np.sort(w1), np.sort(w2), atol=1e-12)


@pytest.mark.parametrize("shape", [(4, 3), (5, 5), (1, 1)])
def test_svd_parity(nprng, shape):
    # singular values are the column norms of the rotated matrix
    a = nprng.standard_normal(shape)
    s1 = np.sort(np.linalg.norm(np.asarray(compiled.jacobi_svd(a, 1e-15, 64)[0]), axis=0))
    s2 = np.sort(np.linalg.norm(np.asarray(_kernels_py.jacobi_svd(a, 1e-15, 64)[0]), axis=0))
    np.testing.assert_allclose(s1, s2, atol=1e-12)


def test_form_kernels_parity(nprng):
    shape = (2, 3, 2)
    c = np.ascontiguousarray(nprng.standard_normal(shape))
    xs = nprng.standard_normal(sum(shape))
    assert compiled.form_value(c, shape, xs) == pytest.approx(_kernels_py.form_value(c, shape, xs), rel=1e-12)
    for k in range(3):
        np.testing.assert_allclose(
            compiled.contract_except(c, shape, xs, k), _kernels_py.contract_except(c, shape, xs, k), atol=1e-12
        )


@pytest.mark.parametrize("exps", [(2.0, 2.0, 2.0), (1.0, np.inf, 2.0), (3.0, 1.5, np.inf)])
def test_alt_max_parity(nprng, exps):
    shape = (2, 3, 2)
    c = np.ascontiguousarray(nprng.standard_normal(shape))
    x0 = nprng.standard_normal(sum(shape))
    e = np.array(exps)
    v1, x1, _ = compiled.alt_max(c, shape, e, x0, 100, 1e-13)
    v2, x2, _ = _kernels_py.alt_max(c, shape, e, x0, 100, 1e-13)
    assert v1 == pytest.approx(v2, rel=1e-10)


def test_end_to_end_parity(restore_backend):
    out = {}
    for name in ("cython", "python"):
        _backend.use(name)
        ci = gamma_interval(inner_product(2), 0, 16)
        out[name] = (ci.lower, ci.upper)
    assert out["cython"] == pytest.approx(out["python"], rel=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.use("fortran")
