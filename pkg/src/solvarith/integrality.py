"""Integrality of solvable-by-finite subgroups of GL(n,Q).

Congruence images modulo an odd prime, presentations of the finite image,
normal generators of the congruence kernel, block triangularization with
irreducible diagonal blocks and an explicit common denominator.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import reduce
from math import lcm
from typing import Sequence

from flint import fmpq, fmpq_mat, fmpz_mat, nmod_mat

from .coset import enumerate_cosets
from .errors import (
    DEFAULT_LIMITS,
    BadPrime,
    Limits,
    NotIntegral,
    OrderCapExceeded,
    SplitVerificationFailed,
)
from .etale import algebra_span
from .exact_linalg import (
    RatMat,
    Span,
    factor_rational_poly,
    flatten,
    monic,
    nullspace,
    poly_eval_matrix,
)
from .lattice import GroupGens

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# single matrices and primes


def is_integral_matrix(h: RatMat) -> bool:
    """Characteristic polynomial in Z[X] and determinant +-1."""
    cp = h.charpoly()
    if any(c.q != 1 for c in cp.coeffs()):
        return False
    return h.det() in (1, -1)


def smallest_good_prime(b: int) -> int:
    p = 3
    while b % p == 0:
        p += 2
        while any(p % q == 0 for q in range(3, int(p ** 0.5) + 1, 2)):
            p += 2
    return p


def choose_prime(S: GroupGens, limits: Limits = DEFAULT_LIMITS) -> int:
    p = limits.prime or smallest_good_prime(S.b)
    if p == 2 or S.b % p == 0:
        raise BadPrime(f"p = {p} is 2 or divides b = {S.b}")
    return p


def reduce_mod_p(h: RatMat, p: int) -> nmod_mat:
    n = h.nrows
    vals = []
    for x in h.entries():
        q = int(x.q)
        if q % p == 0:
            raise BadPrime(f"{p} divides a denominator")
        vals.append(int(x.p) * pow(q, -1, p) % p)
    return nmod_mat(n, h.ncols, vals, p)


def _key(m: nmod_mat) -> tuple:
    return tuple(int(x) for x in m.entries())


@dataclass
class CongruenceContext:
    p: int
    images: list
    b: int

    def keys(self) -> list[tuple]:
        return [_key(m) for m in self.images]


def congruence_image(S: GroupGens, p: int | None = None) -> CongruenceContext:
    if p is None:
        p = smallest_good_prime(S.b)
    if p == 2 or S.b % p == 0:
        raise BadPrime(f"p = {p} is 2 or divides b = {S.b}")
    return CongruenceContext(p, [reduce_mod_p(g, p) for g in S.gens], S.b)


# ---------------------------------------------------------------------------
# presentations of the finite image


@dataclass
class FinitePresentation:
    """Presentation on the given generators; words use signed 1-based indices."""

    generator_count: int
    relators: list[list[int]]
    order: int
    # for cheap evaluation: BFS tree words, and per relator either ("edge", g, j, h)
    # meaning word(g) * x_j * word(h)^-1, or ("word",) for the short special relators
    tree_words: list[list[int]] = field(default_factory=list)
    origins: list[tuple] = field(default_factory=list)


def _free_reduce(w: list[int]) -> list[int]:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def finite_presentation(images: Sequence[nmod_mat], limits: Limits = DEFAULT_LIMITS,
                        prune: bool = True) -> FinitePresentation:
    """Presentation of the group generated by ``images`` from a Cayley graph BFS.

    Generators with trivial image get the relator x_i, repeated images the
    relator x_i x_j^-1; the remaining relators come from the non-tree edges of
    a BFS spanning tree.  With ``prune`` the BFS relators are added shortest
    first, in doubling batches, until coset enumeration confirms the order.
    """
    k = len(images)
    if k == 0:
        return FinitePresentation(0, [], 1)
    n = images[0].nrows()
    p = images[0].modulus()
    ident = nmod_mat(n, n, [int(i == j) for i in range(n) for j in range(n)], p)
    id_key = _key(ident)
    special, special_origins = [], []
    distinct: list[int] = []
    seen_img: dict[tuple, int] = {}
    for i, m in enumerate(images):
        key = _key(m)
        if key == id_key:
            special.append([i + 1])
            special_origins.append(("word",))
        elif key in seen_img:
            special.append([i + 1, -(seen_img[key] + 1)])
            special_origins.append(("word",))
        else:
            seen_img[key] = i
            distinct.append(i)

    elems: dict[tuple, int] = {id_key: 0}
    mats = [ident]
    words: list[list[int]] = [[]]
    edge_rels: list[tuple[list[int], tuple]] = []
    head = 0
    while head < len(mats):
        g = mats[head]
        for j in distinct:
            h = g * images[j]
            key = _key(h)
            idx = elems.get(key)
            if idx is None:
                if len(mats) >= limits.order_cap:
                    raise OrderCapExceeded(f"finite image has more than {limits.order_cap} elements")
                elems[key] = len(mats)
                mats.append(h)
                words.append(words[head] + [j + 1])
            else:
                w = _free_reduce(words[head] + [j + 1] + [-x for x in reversed(words[idx])])
                if w:
                    edge_rels.append((w, ("edge", head, j, idx)))
        head += 1
    order = len(mats)

    edge_rels.sort(key=lambda t: (len(t[0]), t[0]))
    chosen = edge_rels
    if prune and edge_rels:
        limit = 50 * order + 100
        m = max(1, len(distinct))
        while m < len(edge_rels):
            trial = special + [w for w, _ in edge_rels[:m]]
            if enumerate_cosets(k, trial, limit) == order:
                chosen = edge_rels[:m]
                break
            m *= 2
    relators = special + [w for w, _ in chosen]
    origins = special_origins + [o for _, o in chosen]
    return FinitePresentation(k, relators, order, words, origins)


# ---------------------------------------------------------------------------
# block triangular form


def _gram(basis: Sequence[RatMat]) -> fmpq_mat:
    m = len(basis)
    G = fmpq_mat(m, m)
    for i in range(m):
        for j in range(i, m):
            t = (basis[i] * basis[j]).trace()
            G[i, j] = t
            G[j, i] = t
    return G


def _column_space(mats: Sequence[RatMat], k: int) -> list[list]:
    sp = Span(k)
    for m in mats:
        for col in m.columns():
            sp.add(col)
    return sp.vectors


def _kernel_vectors(m: RatMat) -> list[list]:
    return nullspace(m)


def _commutant(mats: Sequence[RatMat], k: int) -> list[RatMat]:
    """Basis of {X : X a = a X for all a}."""
    rows = []
    for a in mats:
        e = a.entries()
        for i in range(k):
            for j in range(k):
                # (aX - Xa)_ij = sum_l a_il X_lj - X_il a_lj
                row = [fmpq(0)] * (k * k)
                for l in range(k):
                    row[l * k + j] += e[i * k + l]
                    row[i * k + l] -= e[l * k + j]
                rows.append(row)
    ker = nullspace(fmpq_mat(len(rows), k * k, [x for r in rows for x in r]))
    return [RatMat.from_flat(k, k, v) for v in ker]


def _split_by_element(e: RatMat) -> list[list] | None:
    """Kernel of f(e) for an irreducible factor f of a reducible minimal polynomial."""
    mp = monic(e.minpoly())
    if mp.degree() <= 1:
        return None
    _, facs = mp.factor()
    if len(facs) == 1 and facs[0][1] == 1:
        return None
    f = monic(facs[0][0])
    return _kernel_vectors(poly_eval_matrix(f, e)) or None


def _invariant_subspace(mats: Sequence[RatMat], rng: random.Random, tries: int = 20):
    """A proper nonzero invariant subspace, or None when the module is irreducible.

    Uses the trace-form radical of the enveloping algebra first (rad A * V is
    invariant); for a semisimple module the commutant decides: a commuting
    element with reducible minimal polynomial splits V, and a commutant that is
    a field certifies irreducibility.
    """
    k = mats[0].n
    A = algebra_span(mats, k)
    rad = nullspace(_gram(A))
    if rad:
        R = []
        for v in rad:
            x = RatMat.zero(k)
            for c, a in zip(v, A):
                if c:
                    x = x + a * c
            R.append(x)
        return _column_space(R, k)
    gens = [m for m in _independent(mats, k)]
    E = _commutant(gens, k)
    if len(E) <= 1:
        return None
    commutative = all(a * b == b * a for a in E for b in E)
    for t in range(tries):
        coeffs = [rng.randint(-2 - t, 2 + t) for _ in E]
        log.debug("commutant draw %s", coeffs)
        e = RatMat.zero(k)
        for c, b in zip(coeffs, E):
            if c:
                e = e + b * c
        W = _split_by_element(e)
        if W is not None:
            return W
        if commutative and e.minpoly().degree() == len(E):
            # irreducible minimal polynomial of full degree: the commutant is a field
            return None
    log.debug("treating module of dimension %d as irreducible (noncommutative commutant)", k)
    return None


def _independent(mats: Sequence[RatMat], k: int) -> list[RatMat]:
    sp = Span(k * k)
    return [m for m in mats if sp.add(flatten(m))]


def _flag(mats: Sequence[RatMat], rng: random.Random) -> tuple[RatMat, list[int]]:
    k = mats[0].n
    if k == 1:
        return RatMat.identity(1), [1]
    W = _invariant_subspace(mats, rng)
    if W is None:
        return RatMat.identity(k), [k]
    r = len(W)
    sp = Span(k)
    cols = []
    for w in W:
        if sp.add(w):
            cols.append(w)
    for i in range(k):
        e = [int(i == j) for j in range(k)]
        if sp.add(e):
            cols.append(e)
    Q = RatMat.from_columns(cols)
    Qi = Q.inv()
    conj = [Qi * a * Q for a in mats]
    P1, s1 = _flag([x.submatrix(0, r, 0, r) for x in conj], rng)
    P2, s2 = _flag([x.submatrix(r, k, r, k) for x in conj], rng)
    return Q * RatMat.block_diag([P1, P2]), s1 + s2


def _unimodular_flag_basis(P: RatMat) -> RatMat:
    """Integral unimodular c whose leading column spans agree with those of P."""
    n = P.n
    cols = []
    for col in P.columns():
        den = reduce(lcm, (int(x.q) for x in col), 1)
        cols.append([int((x * den).p) for x in col])
    B = fmpz_mat(n, n, [cols[j][i] for i in range(n) for j in range(n)])
    H = B.hnf()
    c = RatMat(fmpq_mat(B) * fmpq_mat(H).inv())
    if not c.is_integral() or c.det() not in (1, -1):
        raise SplitVerificationFailed("flag basis is not unimodular")
    return c


@dataclass
class BlockStructure:
    conjugator: RatMat
    block_sizes: list[int]
    semisimple: bool  # enveloping algebra has zero radical (H completely reducible)

    @property
    def offsets(self) -> list[int]:
        out, o = [], 0
        for s in self.block_sizes:
            out.append(o)
            o += s
        return out

    def pi(self, x: RatMat) -> RatMat:
        """Block diagonal part of a matrix already in the conjugated coordinates."""
        n = x.n
        m = fmpq_mat(n, n)
        for o, s in zip(self.offsets, self.block_sizes):
            for i in range(o, o + s):
                for j in range(o, o + s):
                    m[i, j] = x[i, j]
        return RatMat(m)

    def to_blocks(self, x: RatMat) -> RatMat:
        """c^-1 x c."""
        return self._ci * x * self.conjugator

    def from_blocks(self, x: RatMat) -> RatMat:
        return self.conjugator * x * self._ci

    def __post_init__(self):
        self._ci = self.conjugator.inv()

    def is_block_upper(self, x: RatMat) -> bool:
        for bi, (o, s) in enumerate(zip(self.offsets, self.block_sizes)):
            for i in range(o, o + s):
                for j in range(0, o):
                    if x[i, j] != 0:
                        return False
        return True


def block_triangularize(S: GroupGens, seed: int = 0) -> BlockStructure:
    """Conjugate to block upper triangular form with irreducible diagonal blocks."""
    rng = random.Random(seed)
    n = S.n
    A = algebra_span(S.gens, n)
    semisimple = not nullspace(_gram(A))
    P, sizes = _flag(S.gens, rng)
    c = _unimodular_flag_basis(P)
    bs = BlockStructure(c, sizes, semisimple)
    for g in S.gens:
        if not bs.is_block_upper(bs.to_blocks(g)):
            raise SplitVerificationFailed("conjugated generator is not block upper triangular")
    return bs


# ---------------------------------------------------------------------------
# normal generators and the integrality test


@dataclass
class NormalGenSet:
    words: list[list[int]]
    elements: list[RatMat]
    p: int = 0
    presentation: FinitePresentation | None = None
    block: BlockStructure | None = None
    # elements in block coordinates (c^-1 y c) when a block structure was used
    block_elements: list[RatMat] = field(default_factory=list)


def _evaluate(pres: FinitePresentation, gens: Sequence[RatMat], invs: Sequence[RatMat]) -> list[RatMat]:
    n = gens[0].n
    tree: list[RatMat] = []
    for w in pres.tree_words:
        if not w:
            tree.append(RatMat.identity(n))
        else:
            # words are built by extending a parent's word by one generator
            parent = pres.tree_words.index(w[:-1]) if len(w) > 1 else 0
            tree.append(tree[parent] * gens[w[-1] - 1])
    tree_inv: dict[int, RatMat] = {}
    out = []
    for w, origin in zip(pres.relators, pres.origins):
        if origin[0] == "edge":
            _, g, j, h = origin
            if h not in tree_inv:
                tree_inv[h] = tree[h].inv()
            out.append(tree[g] * gens[j] * tree_inv[h])
        else:
            acc = RatMat.identity(n)
            for x in w:
                acc = acc * (gens[x - 1] if x > 0 else invs[-x - 1])
            out.append(acc)
    return out


def normal_generators(S: GroupGens, p: int | None = None, limits: Limits = DEFAULT_LIMITS,
                      structure: str = "full", block: BlockStructure | None = None,
                      seed: int = 0, prune: bool = True) -> NormalGenSet:
    """Relators of a presentation of the finite image, evaluated on S.

    With ``structure="full"`` the image is phi_p(H) and the result normally
    generates H_p = ker phi_p.  With ``structure="block"`` the image is
    phi_p(pi(H)) for the block diagonal projection pi; the result normally
    generates the finite-index subgroup ker(phi_p o pi), which is again
    torsion-free and unipotent-by-abelian.
    """
    if p is None:
        p = limits.prime or smallest_good_prime(S.b)
    if p == 2 or S.b % p == 0:
        raise BadPrime(f"p = {p} is 2 or divides b = {S.b}")
    if structure == "full":
        images = [reduce_mod_p(g, p) for g in S.gens]
        pres = finite_presentation(images, limits, prune=prune)
        elems = _evaluate(pres, S.gens, S.inverses)
        return NormalGenSet(pres.relators, elems, p, pres)
    if structure != "block":
        raise ValueError(f"unknown structure {structure!r}")
    bs = block or block_triangularize(S, seed=seed)
    conj = [bs.to_blocks(g) for g in S.gens]
    conj_inv = [bs.to_blocks(g) for g in S.inverses]
    images = [reduce_mod_p(bs.pi(g), p) for g in conj]
    pres = finite_presentation(images, limits, prune=prune)
    belems = _evaluate(pres, conj, conj_inv)
    elems = [bs.from_blocks(y) for y in belems]
    return NormalGenSet(pres.relators, elems, p, pres, bs, belems)


def is_integral_sf(S: GroupGens, limits: Limits = DEFAULT_LIMITS, structure: str = "block",
                   seed: int = 0) -> bool:
    """True iff H = <S> (assumed solvable-by-finite) is conjugate into GL(n,Z)."""
    ng = normal_generators(S, limits=limits, structure=structure, seed=seed)
    return all(is_integral_matrix(y) for y in ng.elements)


# ---------------------------------------------------------------------------
# common denominator


@dataclass
class DenominatorCertificate:
    d: int
    d1: int
    d2: int
    c: int
    e: int
    algebra_basis: list[RatMat]
    gram_det: fmpq
    block: BlockStructure | None = None


def common_denominator(S: GroupGens, seed: int = 0, block: BlockStructure | None = None) -> DenominatorCertificate:
    """d with d*H inside Mat(n,Z), as d1^n * d2 (or d1 when H is completely reducible)."""
    n = S.n
    bs = block or block_triangularize(S, seed=seed)
    if bs.semisimple:
        pis = list(S.gens)
    else:
        pis = [bs.pi(bs.to_blocks(g)) for g in S.gens]
    A = algebra_span(pis, n)
    c = reduce(lcm, (a.denominator() for a in A), 1)
    gram_det = _gram(A).det()
    if gram_det == 0:
        raise SplitVerificationFailed("trace form degenerate on the block diagonal algebra")
    d1_q = abs(gram_det * c)
    if d1_q.q != 1:
        raise NotIntegral("trace form determinant is not integral")
    d1 = int(d1_q.p)
    if bs.semisimple:
        e, d2, d = 1, 1, d1
    else:
        diffs = []
        for g, gi in zip(S.gens, S.inverses):
            gc, gic = bs.to_blocks(g), bs.to_blocks(gi)
            diffs += [gc - bs.pi(gc), gic - bs.pi(gic)]
        e = reduce(lcm, (x.denominator() for x in diffs), 1)
        d2 = e ** (n - 1)
        d = d1 ** n * d2
    for g in S.both():
        if not (g * d).is_integral():
            raise NotIntegral(f"d = {d} does not clear the denominators of a generator")
    return DenominatorCertificate(d, d1, d2, c, e, A, gram_det, bs)


__all__ = [
    "is_integral_matrix", "smallest_good_prime", "reduce_mod_p", "CongruenceContext",
    "congruence_image", "FinitePresentation", "finite_presentation", "BlockStructure",
    "block_triangularize", "NormalGenSet", "normal_generators", "is_integral_sf",
    "DenominatorCertificate", "common_denominator", "factor_rational_poly", "choose_prime",
]
