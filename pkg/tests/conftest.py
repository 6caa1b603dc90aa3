import random
from pathlib import Path

import pytest
from flint import fmpq
from hypothesis import settings, strategies as st

from solvarith.exact_linalg import RatMat
from solvarith.lattice import GroupGens

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_int = st.integers(-5, 5)
small_rat = st.builds(lambda p, q: fmpq(p, q), st.integers(-6, 6), st.integers(1, 4))


def mat(rows):
    return RatMat([[fmpq(x) if isinstance(x, int) else x for x in r] for r in rows])


def square_mats(n, entries=small_rat):
    return st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n).map(RatMat)


def unimodular(n, rng, steps=6):
    """Random product of elementary integer matrices."""
    g = RatMat.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        e = RatMat.identity(n) + RatMat.elementary(n, i, j) * rng.choice((-1, 1))
        g = g * e
    return g


def random_word(S: GroupGens, length: int, rng: random.Random) -> RatMat:
    acc = RatMat.identity(S.n)
    both = S.both()
    for _ in range(length):
        acc = acc * rng.choice(both)
    return acc


CORPUS = Path(__file__).parent / "corpus"


def corpus(prefix: str) -> list[Path]:
    """Group files whose name starts with prefix ('int_' or 'non_')."""
    return sorted(CORPUS.glob(prefix + "*.grp"))


def trace_search(S: GroupGens, max_len: int = 8, tries: int = 400, seed: int = 0):
    """A random word of length <= max_len with non-integer trace, or None."""
    rng = random.Random(seed)
    for t in range(tries):
        w = random_word(S, 1 + t % max_len, rng)
        if w.trace().q != 1:
            return w
    return None


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(mod.line(k))
