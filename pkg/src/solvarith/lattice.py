"""Full-rank lattices in Q^n, generator sets, and the closure of d*H*Z^n."""

from __future__ import annotations

from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from flint import fmpq

from .errors import NonIntegralGrowth, SolvArithError
from .exact_linalg import RatMat, hnf_basis


class GroupGens:
    """Generators of H <= GL(n,Q) with cached inverses and the denominator base b."""

    def __init__(self, gens: Sequence[RatMat]):
        gens = [g if isinstance(g, RatMat) else RatMat(g) for g in gens]
        if not gens:
            raise ValueError("need at least one generator")
        self.n = gens[0].n
        for g in gens:
            if g.n != self.n:
                raise ValueError("generators of different sizes")
            if g.det() == 0:
                raise SolvArithError("singular generator")
        self.gens = gens
        self.inverses = [g.inv() for g in gens]
        self.b = reduce(lcm, (x.denominator() for x in self.gens + self.inverses), 1)

    def __len__(self) -> int:
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __getitem__(self, i):
        return self.gens[i]

    def both(self) -> list[RatMat]:
        """Generators followed by their inverses."""
        return self.gens + self.inverses

    def conjugate(self, c: RatMat) -> "GroupGens":
        """Generators c^-1 s c."""
        ci = c.inv()
        return GroupGens([ci * g * c for g in self.gens])

    def word(self, w: Sequence[int]) -> RatMat:
        """Evaluate a word of signed 1-based generator indices."""
        acc = RatMat.identity(self.n)
        for x in w:
            acc = acc * (self.gens[x - 1] if x > 0 else self.inverses[-x - 1])
        return acc


class Lattice:
    """Full-rank Z-lattice in Q^n, stored by its canonical column HNF basis."""

    __slots__ = ("n", "basis", "_key")

    def __init__(self, basis: RatMat):
        self.basis = basis
        self.n = basis.nrows
        self._key = basis.key()

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], n: int) -> "Lattice":
        b, r = hnf_basis(list(vectors), n)
        if r != n:
            raise ValueError(f"lattice has rank {r} < {n}")
        return cls(b)

    @classmethod
    def from_matrix(cls, m: RatMat) -> "Lattice":
        """Lattice spanned by the columns of m."""
        return cls.from_vectors(m.columns(), m.nrows)

    @classmethod
    def standard(cls, n: int, scale=1) -> "Lattice":
        return cls(RatMat.identity(n) * scale)

    @property
    def denominator(self) -> int:
        return self.basis.denominator()

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Lattice({self.basis.columns()})"

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_vectors(self.basis.columns() + other.basis.columns(), self.n)

    def contains(self, other: "Lattice") -> bool:
        """True if other is a sublattice of self."""
        return self + other == self

    def scaled(self, s) -> "Lattice":
        return Lattice(self.basis * s)

    def det(self) -> fmpq:
        return abs(self.basis.det())

    def content(self) -> fmpq:
        """Largest rational q with self inside q Z^n."""
        e = self.basis.entries()
        num = reduce(gcd, (int(x.p) for x in e if x != 0), 0)
        den = reduce(lcm, (int(x.q) for x in e), 1)
        return fmpq(num, den)


def lattice_image(h: RatMat, L: Lattice) -> Lattice:
    """Canonical basis of h L."""
    return Lattice.from_matrix(h * L.basis)


def lattice_index(L1: Lattice, L2: Lattice) -> fmpq:
    """det(L2)/det(L1); equals [L1 : L2] when L2 is inside L1."""
    return L2.det() / L1.det()


def basis_lattice(S: GroupGens, d: int) -> Lattice:
    """The lattice generated by d*H*Z^n, computed by closing d*Z^n under S and S^-1."""
    n = S.n
    L = Lattice.standard(n, d)
    Zn = Lattice.standard(n)
    gens = S.both()
    stable = 0
    i = 0
    # round-robin until a full pass changes nothing
    while stable < len(gens):
        h = gens[i % len(gens)]
        i += 1
        hL = lattice_image(h, L)
        if L.contains(hL):
            stable += 1
            continue
        L = L + hL
        stable = 0
        if not Zn.contains(L):
            raise NonIntegralGrowth(f"closure left Z^{n}; {d} is not a common denominator")
    return L
