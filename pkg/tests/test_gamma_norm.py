import numpy as np
import pytest

from conftest import e, point
from gamma_factor import (
    CertificateRefused,
    DenseTensor,
    GammaRepresentation,
    MultilinearOperator,
    assemble,
    euclidean,
    gamma_interval,
    gamma_lower_elementary,
    gamma_lower_via_operator,
    gamma_upper,
    greedy_split,
    inner_product,
    pairing,
    rank_one,
)
from gamma_factor.errors import InconsistencyError, InputError
from gamma_factor.certificates import CertifiedInterval, GammaCertificate
from gamma_factor.gamma_norm import gamma_upper_details

E2 = euclidean(2)


def exact_rep(y=(1.0, 0.0)):
    return GammaRepresentation([(point(e(0), e(0)), point(e(1), e(1)), list(y))], euclidean(len(y)))


def random_rep(nprng, k=2, y_dim=2):
    terms = []
    for _ in range(k):
        terms.append((point(*nprng.standard_normal((2, 2))), point(*nprng.standard_normal((2, 2))), nprng.standard_normal(y_dim)))
    return GammaRepresentation(terms, euclidean(y_dim))


def test_assemble_examples():
    p = point([1, 2], [3, 4])
    assert assemble(GammaRepresentation([(p, p, [1.0])], euclidean(1))).is_zero()
    assert assemble(GammaRepresentation([(p, point(e(0), e(1)), [0.0, 0.0])], E2)).is_zero()
    u = assemble(exact_rep([1.0]))
    np.testing.assert_array_equal(u.coeffs[..., 0], np.diag([1.0, -1.0]))


def test_gamma_exact_case():
    rep = exact_rep()
    u = assemble(rep)
    assert gamma_upper(rep) <= 2 + 1e-6
    assert gamma_lower_elementary(u) >= 2 - 1e-6


def test_gamma_upper_zero_and_scaling(nprng):
    p = point([1, 2], [3, 4])
    assert gamma_upper(GammaRepresentation([(p, p, [1.0, 2.0])], E2)) == 0.0
    rep = random_rep(nprng)
    base = gamma_upper(rep)
    for c in (2.0, -0.5):
        scaled = GammaRepresentation([(a, b, c * y) for a, b, y in rep.terms], E2)
        assert gamma_upper(scaled) == pytest.approx(abs(c) * base, rel=1e-9)


def test_gamma_upper_refuses_undominated():
    p, q = point(e(0), e(0)), point(e(1), e(1))
    rep = GammaRepresentation([(p.scaled(2.0), q.scaled(2.0), [1.0])], euclidean(1), dominators=[(p, q)])
    with pytest.raises(CertificateRefused):
        gamma_upper(rep)


def test_gamma_upper_subadditive(nprng):
    a, b = random_rep(nprng), random_rep(nprng)
    both = GammaRepresentation(list(a.terms) + list(b.terms), E2)
    assert gamma_upper(both) <= gamma_upper(a) + gamma_upper(b) + 1e-9


def test_zero_padding_does_not_increase(nprng):
    rep = random_rep(nprng)
    big = euclidean(3)
    terms = [
        (point(*[np.append(f, 0.0) for f in a.factors]), point(*[np.append(f, 0.0) for f in b.factors]), y)
        for a, b, y in rep.terms
    ]
    padded = GammaRepresentation(terms, E2)
    assert padded.spaces == (big, big)
    assert gamma_upper(padded) <= gamma_upper(rep) + 1e-9


def test_greedy_split_reassembles(nprng):
    u = DenseTensor([E2, E2, euclidean(3)], nprng.standard_normal((2, 2, 3)))
    rep = greedy_split(u, 8, 0)
    np.testing.assert_allclose(assemble(rep).coeffs, u.coeffs, atol=1e-10)
    lo, up = gamma_lower_elementary(u, 4, 0), gamma_upper(rep, 8, 0)
    assert lo <= up + 1e-9


def test_gamma_lower_elementary_cases(nprng):
    assert gamma_lower_elementary(DenseTensor([E2, E2, E2], np.zeros((2, 2, 2)))) == 0.0
    x, z, y = nprng.standard_normal(2), nprng.standard_normal(2), nprng.standard_normal(3)
    u = DenseTensor([E2, E2, euclidean(3)], np.multiply.outer(np.outer(x, z), y))
    want = np.linalg.norm(x) * np.linalg.norm(z) * np.linalg.norm(y)
    assert gamma_lower_elementary(u) >= want * (1 - 1e-9)


def test_via_operator():
    T = rank_one(inner_product(2), e(0))
    u = DenseTensor([E2, E2, E2], np.multiply.outer(np.outer(e(0), e(0)), e(0)))
    assert pairing(T, u) == 1.0
    assert gamma_lower_via_operator(u, T) >= 1 - 1e-9
    assert gamma_lower_via_operator(DenseTensor([E2, E2, E2], np.zeros((2, 2, 2))), T) == 0.0
    zero = GammaCertificate("zero", 0.0)
    with pytest.raises(InconsistencyError):
        gamma_lower_via_operator(u, T, CertifiedInterval(0.0, 0.0, zero, zero))
    with pytest.raises(InputError):
        gamma_lower_via_operator(DenseTensor([E2, E2], np.eye(2)), T)


def test_duality_bound(nprng):
    for k in range(5):
        T = MultilinearOperator([E2, E2], E2, nprng.standard_normal((2, 2, 2)))
        u = DenseTensor([E2, E2, E2], nprng.standard_normal((2, 2, 2)))
        pr = abs(pairing(T, u))
        bound = gamma_interval(T, k, 16).upper * gamma_upper(greedy_split(u, 4, k), 4, k)
        assert pr <= bound + 1e-6 * (1 + pr)


def test_rebalancing_route():
    rep = GammaRepresentation(
        [(point(e(0), e(0)), point(e(1), e(1)), [1.0, 0.0]), (point(e(0), e(1)), point(e(1), e(0)), [0.0, 3.0])], E2
    )
    val, detail = gamma_upper_details(rep)
    assert detail["route"] == "rebalanced"
    assert val == pytest.approx(2 * 1 + 2 * 3)


def test_json_round_trip(nprng):
    rep = random_rep(nprng)
    back = GammaRepresentation.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
