"""Rational matrix Lie algebras: Jordan decomposition, Cartan subalgebras,
Fitting components and the splitting g = d + n of an algebraic solvable algebra.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from math import ceil, log2
from typing import Sequence

from flint import fmpq, fmpq_mat

from .errors import NotSolvable, ResourceError, SplitVerificationFailed
from .exact_linalg import (
    CoordinateSolver,
    RatMat,
    Span,
    bracket,
    flatten,
    nullspace,
    poly_eval_matrix,
    squarefree_part,
)

log = logging.getLogger(__name__)


class LieAlgebraQ:
    """Lie algebra spanned by linearly independent rational n x n matrices."""

    def __init__(self, basis: Sequence[RatMat], n: int | None = None, check: bool = True):
        basis = list(basis)
        if n is None:
            if not basis:
                raise ValueError("need n for the zero algebra")
            n = basis[0].n
        self.n = n
        sp = Span(n * n)
        for b in basis:
            if not sp.add(flatten(b)):
                raise ValueError("basis is linearly dependent")
        self.basis = basis
        self._solver = CoordinateSolver([flatten(b) for b in basis])
        if check:
            for i, a in enumerate(basis):
                for b in basis[i + 1:]:
                    if not self.contains(bracket(a, b)):
                        raise ValueError("span is not closed under the bracket")

    @classmethod
    def spanned_by(cls, elements: Sequence[RatMat], n: int, check: bool = False) -> "LieAlgebraQ":
        """Subspace spanned by elements (a basis is extracted)."""
        sp = Span(n * n)
        basis = [e for e in elements if sp.add(flatten(e))]
        return cls(basis, n, check=check)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x: RatMat):
        return self._solver.coords(flatten(x))

    def contains(self, x: RatMat) -> bool:
        if not self.basis:
            return x.is_zero()
        return self.coords(x) is not None

    def element(self, coeffs) -> RatMat:
        acc = RatMat.zero(self.n)
        for c, b in zip(coeffs, self.basis):
            if c:
                acc = acc + b * c
        return acc

    def ad_matrix(self, x: RatMat) -> fmpq_mat:
        """Matrix of ad x on this algebra (requires [x, g] inside g)."""
        k = self.dim
        cols = []
        for b in self.basis:
            c = self.coords(bracket(x, b))
            if c is None:
                raise ValueError("ad x does not preserve the algebra")
            cols.append(c)
        return fmpq_mat(k, k, [cols[j][i] for i in range(k) for j in range(k)])

    def is_nilpotent_algebra(self) -> bool:
        """Lower central series reaches 0."""
        current = self.basis
        for _ in range(self.dim + 1):
            if not current:
                return True
            nxt = span_basis_mats([bracket(a, b) for a in self.basis for b in current], self.n)
            if len(nxt) == len(current):
                return False
            current = nxt
        return not current

    def is_solvable(self) -> bool:
        current = self.basis
        while current:
            nxt = span_basis_mats([bracket(a, b) for i, a in enumerate(current)
                                   for b in current[i + 1:]], self.n)
            if len(nxt) == len(current):
                return False
            current = nxt
        return True

    def is_ideal(self, sub: Sequence[RatMat]) -> bool:
        """True if span(sub) is an ideal of this algebra."""
        sol = CoordinateSolver([flatten(s) for s in sub]) if sub else None
        for a in self.basis:
            for s in sub:
                br = bracket(a, s)
                if br.is_zero():
                    continue
                if sol is None or sol.coords(flatten(br)) is None:
                    return False
        return True


def span_basis_mats(mats: Sequence[RatMat], n: int) -> list[RatMat]:
    sp = Span(n * n)
    return [m for m in mats if sp.add(flatten(m))]


# ---------------------------------------------------------------------------
# Jordan decomposition


def jordan_decomposition(a: RatMat) -> tuple[RatMat, RatMat]:
    """a = s + nil with s semisimple, nil nilpotent, both polynomials in a.

    Newton iteration s <- s - f(s) f'(s)^-1 with f the squarefree part of the
    characteristic polynomial.
    """
    n = a.n
    f = squarefree_part(a.charpoly())
    df = f.derivative()
    s = a
    steps = ceil(log2(n)) + 1 if n > 1 else 1
    for _ in range(steps + 1):
        fs = poly_eval_matrix(f, s)
        if fs.is_zero():
            break
        s = s - fs * poly_eval_matrix(df, s).inv()
    nil = a - s
    if not poly_eval_matrix(f, s).is_zero() or not nil.is_nilpotent() or s * nil != nil * s:
        raise SplitVerificationFailed("Jordan decomposition failed to verify")
    return s, nil


def is_semisimple(a: RatMat) -> bool:
    m = a.minpoly()
    return m.gcd(m.derivative()).degree() == 0


# ---------------------------------------------------------------------------
# Cartan subalgebras


@dataclass
class CartanData:
    h_basis: list[RatMat]
    fitting1_basis: list[RatMat]
    draws: list = None


def _matrix_power_kernel(M: fmpq_mat, k: int) -> list[list]:
    P = M
    prev = None
    for _ in range(k):
        ker = nullspace(P)
        if prev is not None and len(ker) == len(prev):
            return ker
        prev = ker
        P = P * M
    return nullspace(P)


def fitting_null(g: LieAlgebraQ, x: RatMat) -> list[RatMat]:
    """Fitting null component of ad x on g."""
    ad = g.ad_matrix(x)
    ker = _matrix_power_kernel(ad, g.dim)
    return [g.element(v) for v in ker]


def normalizer(g: LieAlgebraQ, h: Sequence[RatMat]) -> list[RatMat]:
    """Basis of {y in g : [y, h] in span(h)}."""
    k = g.dim
    if not h:
        return list(g.basis)
    hc = [g.coords(x) for x in h]
    # functionals on g vanishing on span(h)
    ann = nullspace(fmpq_mat(len(hc), k, [c for v in hc for c in v]))
    if not ann:
        return list(g.basis)
    rows = []
    for x in h:
        # y -> coords [y, x] = -ad(x) y
        ad = g.ad_matrix(x)
        for f in ann:
            fm = fmpq_mat(1, k, f) * ad
            rows.append(fm.entries())
    ker = nullspace(fmpq_mat(len(rows), k, [c for r in rows for c in r]))
    return [g.element(v) for v in ker]


def fitting_one(g: LieAlgebraQ, h: Sequence[RatMat]) -> list[RatMat]:
    """Intersection of [h^i, g]: iterate V <- [h, V] from V = g until stable."""
    V = list(g.basis)
    while True:
        nxt = span_basis_mats([bracket(x, v) for x in h for v in V], g.n)
        if len(nxt) == len(V):
            return V
        V = nxt


def _is_cartan(g: LieAlgebraQ, h: list[RatMat]) -> bool:
    sub = LieAlgebraQ(h, g.n, check=False) if h else None
    if sub is not None and not sub.is_nilpotent_algebra():
        return False
    return len(normalizer(g, h)) == len(h)


def cartan_subalgebra(g: LieAlgebraQ, seed: int = 0, tries: int = 60) -> CartanData:
    """Cartan subalgebra via the Fitting null component of a generic element.

    Candidates are drawn first from the span of basis elements that are not
    nilpotent (so a torus spanned by basis vectors is found when it exists),
    then from all of g.  When a null component is not nilpotent the next draws
    perturb inside it.
    """
    if not g.is_solvable():
        raise NotSolvable("Lie algebra is not solvable")
    if g.dim == 0:
        return CartanData([], [], [])
    if g.is_nilpotent_algebra():
        return CartanData(list(g.basis), [], [])
    rng = random.Random(seed)
    draws = []
    toral = [b for b in g.basis if not b.is_nilpotent()]
    inside: list[RatMat] | None = None
    for t in range(tries):
        bound = 2 + t // 5
        if inside is not None and t % 2 == 1:
            pool = inside
        elif t < tries // 3 and toral:
            pool = toral
        else:
            pool = g.basis
        coeffs = [rng.randint(-bound, bound) for _ in pool]
        draws.append(coeffs)
        log.debug("cartan draw %d: %s", t, coeffs)
        x = RatMat.zero(g.n)
        for c, b in zip(coeffs, pool):
            if c:
                x = x + b * c
        if x.is_zero():
            continue
        h = fitting_null(g, x)
        if _is_cartan(g, h):
            return CartanData(h, fitting_one(g, h), draws)
        inside = h
    raise ResourceError("no Cartan subalgebra found within the retry cap")


# ---------------------------------------------------------------------------
# d + n splitting


@dataclass
class DNSplit:
    d_basis: list[RatMat]
    n_basis: list[RatMat]


def split_dn(g: LieAlgebraQ, seed: int = 0) -> DNSplit:
    cd = cartan_subalgebra(g, seed=seed)
    semis, nils = [], []
    for x in cd.h_basis:
        s, nil = jordan_decomposition(x)
        semis.append(s)
        nils.append(nil)
    d_basis = span_basis_mats(semis, g.n)
    n_basis = span_basis_mats(nils + cd.fitting1_basis, g.n)
    verify_split(g, d_basis, n_basis)
    return DNSplit(d_basis, n_basis)


def verify_split(g: LieAlgebraQ, d_basis, n_basis) -> None:
    for x in d_basis + n_basis:
        if not g.contains(x):
            raise SplitVerificationFailed("component element outside g")
    for i, a in enumerate(d_basis):
        if not is_semisimple(a):
            raise SplitVerificationFailed("d element not semisimple")
        for b in d_basis[i + 1:]:
            if a * b != b * a:
                raise SplitVerificationFailed("d elements do not commute")
    for x in n_basis:
        if not x.is_nilpotent():
            raise SplitVerificationFailed("n element not nilpotent")
    if len(span_basis_mats(d_basis + n_basis, g.n)) != g.dim or len(d_basis) + len(n_basis) != g.dim:
        raise SplitVerificationFailed("d and n do not form a direct sum equal to g")
    if not g.is_ideal(n_basis):
        raise SplitVerificationFailed("n is not an ideal")


# ---------------------------------------------------------------------------
# exponential and logarithm of nilpotent / unipotent matrices


def exp_nilpotent(x: RatMat) -> RatMat:
    n = x.n
    acc = RatMat.identity(n)
    term = RatMat.identity(n)
    for j in range(1, n + 1):
        term = term * x * fmpq(1, j)
        if term.is_zero():
            break
        acc = acc + term
    return acc


def log_unipotent(u: RatMat) -> RatMat:
    n = u.n
    x = u - RatMat.identity(n)
    if not x.is_nilpotent():
        raise ValueError("matrix is not unipotent")
    acc = RatMat.zero(n)
    term = RatMat.identity(n)
    for j in range(1, n + 1):
        term = term * x
        if term.is_zero():
            break
        acc = acc + term * fmpq(1 if j % 2 else -1, j)
    return acc
