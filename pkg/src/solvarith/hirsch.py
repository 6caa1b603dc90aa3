"""Hirsch number of a solvable-by-finite subgroup of GL(n,Q).

Pass to K = ker(phi_p o pi), pi the block diagonal projection.  K is torsion
free and unipotent-by-abelian, so h(H) = h(K) = rank pi(K) + h(U), U = K cap ker pi.
The abelian rank comes from multiplicative relations among eigenvalue tuples,
the unipotent part from the Lie algebra generated by logarithms of a normal
generating set of U.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import DEFAULT_LIMITS, Limits, NotUnipotent
from .etale import EtaleAlgebra, algebra_span, close_under_conjugation
from .exact_linalg import RatMat, Span, bracket, commutator, flatten, unimodular_completion
from .integrality import choose_prime, normal_generators
from .lattice import GroupGens
from .lie import log_unipotent
from .quadfield import QuadElem, multiplicative_rank, relation_lattice_tuples


@dataclass
class HirschCertificate:
    h: int
    abelian_rank: int
    unipotent_rank: int
    p: int


# ---------------------------------------------------------------------------
# unipotent part


def log_span(seeds: Sequence[RatMat], conjugating_gens: Sequence[RatMat]) -> list[RatMat]:
    """Basis of the smallest Ad-stable Lie algebra containing log(seeds)."""
    if not seeds:
        return []
    n = seeds[0].n
    sp = Span(n * n)
    basis: list[RatMat] = []
    queue: list[RatMat] = []

    def push(x: RatMat) -> None:
        if not x.is_zero() and sp.add(flatten(x)):
            basis.append(x)
            queue.append(x)

    for u in seeds:
        if not u.is_unipotent():
            raise NotUnipotent("seed is not unipotent")
        push(log_unipotent(u))
    pairs = [(g, g.inv()) for g in conjugating_gens]
    while queue and len(basis) < n * n:
        x = queue.pop()
        for g, gi in pairs:
            push(g * x * gi)
        for y in list(basis):
            push(bracket(x, y))
    return basis


def unipotent_log_rank(seeds: Sequence[RatMat], conjugating_gens: Sequence[RatMat] = ()) -> int:
    return len(log_span(seeds, conjugating_gens))


# ---------------------------------------------------------------------------
# abelian part


def abelian_mult_rank(diagonal_tuples: Sequence[Sequence[QuadElem]], limits: Limits = DEFAULT_LIMITS) -> int:
    """Torsion-free rank of the group generated by coordinatewise eigenvalue tuples."""
    if not diagonal_tuples:
        return 0
    return multiplicative_rank([tuple(t) for t in diagonal_tuples], limits)


class _AbelianBasis:
    """Elements b_1..b_r of K whose pi-images form a basis of the free abelian group they span."""

    def __init__(self, tup, limits: Limits):
        self.tup = tup
        self.limits = limits
        self.mats: list[RatMat] = []
        self.tuples: list[tuple] = []

    def __len__(self) -> int:
        return len(self.mats)

    def express(self, x: RatMat, t=None):
        """(coefficients c with pi(x) = prod pi(b_i)^c_i, or None, relation vector)."""
        t = self.tup(x) if t is None else t
        rel = relation_lattice_tuples(self.tuples + [t], self.limits)
        if not rel:
            return None, None
        z = rel[0]
        if z[-1] in (1, -1):
            return [-zi * z[-1] for zi in z[:-1]], z
        return None, z

    def product(self, c: Sequence[int]) -> RatMat:
        acc = RatMat.identity(self.mats[0].n) if self.mats else None
        for ci, b in zip(c, self.mats):
            if ci:
                acc = acc * (b ** ci)
        return acc

    def absorb(self, x: RatMat, z) -> None:
        t = self.tup(x)
        if z is None:
            self.mats.append(x)
            self.tuples.append(t)
            return
        # <b_1..b_r, x> / <z> is free of rank r; take a basis of the quotient
        gens = self.mats + [x]
        U = unimodular_completion(z)
        new_mats, new_tuples = [], []
        for col in U[1:]:
            m = RatMat.identity(x.n)
            for e, g in zip(col, gens):
                if e:
                    m = m * (g ** e)
            new_mats.append(m)
            new_tuples.append(self.tup(m))
        self.mats, self.tuples = new_mats, new_tuples


def hirsch_number(S: GroupGens, limits: Limits = DEFAULT_LIMITS, seed: int = 0) -> HirschCertificate:
    p = choose_prime(S, limits)
    ng = normal_generators(S, p, limits, structure="block", seed=seed)
    bs = ng.block
    n = S.n
    conj = [bs.to_blocks(g) for g in S.gens]
    Y = [y for y in ng.block_elements if not y.is_identity()]
    pi_conj = [bs.pi(g) for g in conj]

    piY = [bs.pi(y) for y in Y if not bs.pi(y).is_identity()]
    if piY:
        C = close_under_conjugation(algebra_span(piY, n), pi_conj, n)
        alg = EtaleAlgebra(C, rng=random.Random(seed), limits=limits)
        tup = lambda x: alg.to_tuple(bs.pi(x))
    else:
        tup = lambda x: (QuadElem(1),)

    B = _AbelianBasis(tup, limits)
    pending: list[RatMat] = []
    while True:
        pending = []
        restart = False
        candidates = list(Y) + [g * b * g.inv() for b in B.mats for g in conj]
        for x in candidates:
            c, z = B.express(x)
            if c is None:
                B.absorb(x, z)
                restart = True
                break
            pending.append(x * B.product(c).inv() if B.mats else x)
        if not restart:
            break

    seeds = [commutator(a, b) for i, a in enumerate(B.mats) for b in B.mats[i + 1:]]
    seeds += pending
    seeds = [u for u in seeds if not u.is_identity()]
    urank = unipotent_log_rank(seeds, conj)
    arank = len(B)
    return HirschCertificate(arank + urank, arank, urank, p)
