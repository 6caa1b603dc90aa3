import random

import pytest
from flint import fmpq
from hypothesis import given, settings, strategies as st

from solvarith.errors import Limits, NotIntegral, OrbitCapExceeded
from solvarith.exact_linalg import RatMat
from solvarith.fileformat import read_group
from solvarith.hirsch import hirsch_number
from solvarith.intercept import conjugating_matrix, integral_intercept
from solvarith.integrality import common_denominator
from solvarith.lattice import GroupGens, Lattice, lattice_image

from conftest import corpus, mat, random_word, unimodular

HALF = mat([[1, fmpq(1, 2)], [0, 1]])
T = mat([[1, 1], [0, 1]])


def test_worked_example():
    res = integral_intercept(GroupGens([HALF]), 8)
    assert len(res.orbit) == 2
    assert res.stabilizer_gens == [T]
    assert hirsch_number(GroupGens(res.stabilizer_gens)).h == 1


def test_integral_generators_fix_standard_lattice():
    S = GroupGens([T, mat([[2, 1], [3, 2]])])
    res = integral_intercept(S, 1)
    assert res.orbit == [Lattice.standard(2)]
    assert res.stabilizer_gens == list(S.gens)
    res = integral_intercept(GroupGens([-RatMat.identity(3)]), 1)
    assert len(res.orbit) == 1 and res.stabilizer_gens == [-RatMat.identity(3)]


@pytest.mark.parametrize("path", corpus("int_"), ids=lambda p: p.stem)
def test_orbit_stabilizer_consistency(path):
    S = read_group(path)
    d = common_denominator(S).d
    res = integral_intercept(S, d)
    Zn = Lattice.standard(S.n)
    for L, t in zip(res.orbit, res.transversal_mats):
        assert lattice_image(t, Zn) == L
    for g in res.stabilizer_gens:
        assert g.is_integral() and g.det() in (1, -1)
    # orbit is closed under the generators
    orbit = set(res.orbit)
    for L in res.orbit:
        for s in S.both():
            assert lattice_image(s, L) in orbit


def test_orbit_cap():
    with pytest.raises(OrbitCapExceeded):
        integral_intercept(GroupGens([mat([[1, fmpq(1, 64)], [0, 1]])]), 64 * 64, Limits(orbit_cap=10))


def test_conjugating_matrix_examples():
    g = conjugating_matrix(GroupGens([HALF]))
    assert g == RatMat.diag([1, 2])
    assert g.inv() * HALF * g == T
    assert conjugating_matrix(GroupGens([T])).is_identity()
    with pytest.raises(NotIntegral):
        conjugating_matrix(GroupGens([RatMat.diag([2, fmpq(1, 2)])]))


@pytest.mark.parametrize("path", corpus("int_"), ids=lambda p: p.stem)
def test_conjugating_matrix_corpus(path):
    S = read_group(path)
    g = conjugating_matrix(S)
    gi = g.inv()
    rng = random.Random(3)
    for _ in range(20):
        x = gi * random_word(S, 6, rng) * g
        assert x.is_integral() and x.det() in (1, -1)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_conjugating_matrix_recovers_hidden_integral_group(seed):
    rng = random.Random(seed)
    m = RatMat.diag([rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)]) * unimodular(3, rng, steps=4)
    base = [mat([[2, 1, 0], [3, 2, 0], [0, 0, 1]]), mat([[1, 0, 1], [0, 1, 0], [0, 0, 1]])]
    S = GroupGens([m * b * m.inv() for b in base])
    g = conjugating_matrix(S, seed=seed)
    for s in S.both():
        x = g.inv() * s * g
        assert x.is_integral() and x.det() in (1, -1)
