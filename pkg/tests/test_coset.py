import pytest

from solvarith.coset import enumerate_cosets


@pytest.mark.parametrize("ngens,rels,order", [
    (1, [[1, 1, 1, 1]], 4),
    (2, [[1, 1], [2, 2, 2], [1, 2, 1, 2]], 6),
    (2, [[1, 1], [2, 2], [1, 2, -1, -2]], 4),
    (2, [[1] * 5, [2] * 6, [1, 2, -1, -2]], 30),
    (2, [[1] * 8, [2] * 16, [-2, 1, 2, 1, 1, 1]], 128),
    (1, [], None),
])
def test_orders(ngens, rels, order):
    assert enumerate_cosets(ngens, rels, 2000) == order
