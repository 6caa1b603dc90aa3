import random

import pytest
from flint import fmpq
from hypothesis import given, strategies as st

from solvarith.errors import NotSolvable
from solvarith.exact_linalg import RatMat, bracket
from solvarith.lie import (
    LieAlgebraQ,
    cartan_subalgebra,
    exp_nilpotent,
    fitting_null,
    is_semisimple,
    jordan_decomposition,
    log_unipotent,
    normalizer,
    span_basis_mats,
    split_dn,
)
from solvarith.toplevel import lie_gn

from conftest import mat

h = mat([[1, 0], [0, -1]])
e = mat([[0, 1], [0, 0]])


def E(n, i, j):
    return RatMat.elementary(n, i, j)


def test_jordan_examples():
    s, nil = jordan_decomposition(mat([[1, 1], [0, 1]]))
    assert s.is_identity() and nil == e
    a = mat([[0, 1], [3, 0]])
    s, nil = jordan_decomposition(a)
    assert s == a and nil.is_zero()
    s, nil = jordan_decomposition(mat([[2, 1, 0], [0, 2, 0], [0, 0, 3]]))
    assert s == RatMat.diag([2, 2, 3]) and nil == E(3, 0, 1)


def _random_jordan_input(rng):
    # conjugate a matrix with repeated eigenvalues so the nilpotent part is nontrivial
    blocks = rng.choice([
        [[2, 1, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]],
        [[0, 1, 1, 0], [3, 0, 0, 1], [0, 0, 0, 1], [0, 0, 3, 0]],
        [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
        [[rng.randint(-3, 3) for _ in range(4)] for _ in range(4)],
    ])
    a = RatMat(blocks)
    while True:
        g = RatMat([[fmpq(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(4)] for _ in range(4)])
        if g.det() != 0:
            return g * a * g.inv()


def test_jordan_random_100():
    rng = random.Random(2024)
    for _ in range(100):
        a = _random_jordan_input(rng)
        s, nil = jordan_decomposition(a)
        assert s + nil == a
        assert s * nil == nil * s and s * a == a * s
        assert (nil ** 4).is_zero()
        assert is_semisimple(s)
        s2, nil2 = jordan_decomposition(s)
        assert s2 == s and nil2.is_zero()


def test_cartan_examples():
    g = LieAlgebraQ([h, e])
    cd = cartan_subalgebra(g)
    assert span_basis_mats(cd.h_basis, 2) and len(cd.h_basis) == 1
    assert LieAlgebraQ(cd.h_basis).contains(h)
    assert len(cd.fitting1_basis) == 1 and LieAlgebraQ(cd.fitting1_basis).contains(e)
    upper = LieAlgebraQ([E(3, 0, 1), E(3, 0, 2), E(3, 1, 2)])
    cd = cartan_subalgebra(upper)
    assert len(cd.h_basis) == 3 and cd.fitting1_basis == []
    g2 = LieAlgebraQ(lie_gn(2))
    cd = cartan_subalgebra(g2)
    t = LieAlgebraQ(lie_gn(2)[:2])
    assert len(cd.h_basis) == 2 and all(t.contains(x) for x in cd.h_basis)
    nn = LieAlgebraQ(lie_gn(2)[2:])
    assert len(cd.fitting1_basis) == 4 and all(nn.contains(x) for x in cd.fitting1_basis)


def test_not_solvable():
    sl2 = LieAlgebraQ([h, e, mat([[0, 0], [1, 0]])])
    with pytest.raises(NotSolvable):
        cartan_subalgebra(sl2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gn_split_dims(n):
    g = LieAlgebraQ(lie_gn(n))
    assert g.dim == [6, 15, 28][n - 2]
    sp = split_dn(g)
    assert len(sp.d_basis) == n and len(sp.n_basis) == 4 * n * (n - 1) // 2


def _conjugated(basis, seed):
    rng = random.Random(seed)
    n = basis[0].n
    while True:
        m = RatMat([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if m.det() not in (0, 1, -1):
            break
    mi = m.inv()
    return [m * b * mi for b in basis]


@given(st.integers(0, 10 ** 6), st.integers(0, 3))
def test_cartan_and_split_invariants(seed, which):
    basis = [
        [h, e],
        lie_gn(2),
        [RatMat.diag([1, 0, 0]), RatMat.diag([0, 1, 0]), E(3, 0, 1), E(3, 0, 2), E(3, 1, 2)],
        [mat([[0, 1, 0], [2, 0, 0], [0, 0, 0]]), E(3, 0, 2), E(3, 1, 2)],
    ][which]
    g = LieAlgebraQ(_conjugated(basis, seed))
    cd = cartan_subalgebra(g, seed=seed)
    hsub = LieAlgebraQ(cd.h_basis, g.n)
    assert hsub.is_nilpotent_algebra()
    assert len(normalizer(g, cd.h_basis)) == len(cd.h_basis)
    assert len(span_basis_mats(cd.h_basis + cd.fitting1_basis, g.n)) == g.dim
    sp = split_dn(g, seed=seed)
    for i, a in enumerate(sp.d_basis):
        assert is_semisimple(a)
        for b in sp.d_basis[i + 1:]:
            assert a * b == b * a
    assert all(x.is_nilpotent() for x in sp.n_basis)
    assert len(sp.d_basis) + len(sp.n_basis) == g.dim
    assert g.is_ideal(sp.n_basis)


def test_split_examples():
    upper = LieAlgebraQ([E(3, 0, 1), E(3, 0, 2), E(3, 1, 2)])
    sp = split_dn(upper)
    assert sp.d_basis == [] and len(sp.n_basis) == 3
    sp = split_dn(LieAlgebraQ([h, e]))
    assert len(sp.d_basis) == 1 and LieAlgebraQ([h]).contains(sp.d_basis[0])
    assert len(sp.n_basis) == 1 and LieAlgebraQ([e]).contains(sp.n_basis[0])


def test_exp_log_inverse():
    x = E(3, 0, 1) + E(3, 1, 2) * fmpq(1, 2)
    assert log_unipotent(exp_nilpotent(x)) == x


def test_bracket_closure_checked():
    with pytest.raises(ValueError):
        LieAlgebraQ([e, mat([[0, 0], [1, 0]])])
    assert fitting_null(LieAlgebraQ([h, e]), h) == [h] or len(fitting_null(LieAlgebraQ([h, e]), h)) == 1
    assert bracket(h, e) == e * 2
