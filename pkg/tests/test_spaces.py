from fractions import Fraction

import numpy as np
import pytest

from gamma_factor import SpaceSpec, dual_space, lp_norm
from gamma_factor.errors import BudgetError, InputError, UnsupportedError
from gamma_factor.spaces import (
    INF,
    brute_force_embedding,
    from_l2_constant,
    norm,
    to_l2_constant,
    unit_ball_vertices,
    verified_embedding_constants,
)


@pytest.mark.parametrize(
    "p, v, expected",
    [(2, [3, 4], 5.0), ("inf", [1, -2], 2.0), (1, [1, 1, 1], 3.0), (3, [1, 1], 2 ** (1 / 3))],
)
def test_norm_values(p, v, expected):
    assert norm(SpaceSpec(len(v), p), v) == pytest.approx(expected)


def test_norm_length_mismatch():
    with pytest.raises(InputError):
        norm(SpaceSpec(3, 2), [1.0, 2.0])


def test_dual_exponents():
    assert dual_space(SpaceSpec(2, 2)).p == 2
    assert dual_space(SpaceSpec(2, 1)).p == INF
    assert dual_space(SpaceSpec(2, 4)).p == Fraction(4, 3)
    assert dual_space(SpaceSpec(2, "3/2")).p == 3


@pytest.mark.parametrize("p", [1, "4/3", 2, 3, "inf"])
def test_dual_involution(p):
    s = SpaceSpec(3, p)
    assert dual_space(dual_space(s)) == s


@pytest.mark.parametrize("p", [1, "3/2", 2, 5, "inf"])
def test_holder(nprng, p):
    s = SpaceSpec(4, p)
    d = dual_space(s)
    for _ in range(50):
        u, v = nprng.standard_normal(4), nprng.standard_normal(4)
        assert abs(u @ v) <= lp_norm(u, s.pf) * lp_norm(v, d.pf) * (1 + 1e-12)


def test_vertices():
    l1 = unit_ball_vertices(SpaceSpec(2, 1))
    assert sorted(map(tuple, l1)) == sorted([(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert len(unit_ball_vertices(SpaceSpec(2, "inf"))) == 4
    cube = unit_ball_vertices(SpaceSpec(3, "inf"))
    assert len(cube) == 8 and all(np.all(np.abs(v) == 1) for v in cube)


def test_vertices_errors():
    with pytest.raises(UnsupportedError):
        unit_ball_vertices(SpaceSpec(2, 2))
    with pytest.raises(BudgetError):
        unit_ball_vertices(SpaceSpec(40, "inf"))


def test_bad_specs():
    for args in [(0, 2), (2, 0.5), (2, "abc"), (2.5, 2)]:
        with pytest.raises(InputError):
            SpaceSpec(*args)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [1, "3/2", 2, 3, "inf"])
def test_embedding_constants_match_brute_force(dim, p):
    s = SpaceSpec(dim, p)
    to2, from2 = brute_force_embedding(s)
    assert to2 <= to_l2_constant(s) * (1 + 1e-9)
    assert from2 <= from_l2_constant(s) * (1 + 1e-9)
    assert to2 >= to_l2_constant(s) * (1 - 1e-6)
    assert from2 >= from_l2_constant(s) * (1 - 1e-6)


def test_linf_to_l2_constant():
    assert verified_embedding_constants(SpaceSpec(2, "inf"))[0] == pytest.approx(np.sqrt(2))
    assert verified_embedding_constants(SpaceSpec(3, 1))[0] == 1.0


def test_json_round_trip():
    for p in [1, "4/3", 2, "inf"]:
        s = SpaceSpec(3, p)
        assert SpaceSpec.from_json(s.to_json()) == s
