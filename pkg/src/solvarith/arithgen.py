"""Generators of a finite-index subgroup of G_Z for a solvable algebraic group G
given by its Lie algebra: a unipotent part from exponentials of the nilpotent
ideal and a torus part from units of the fields splitting the torus algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import reduce
from math import ceil, gcd, lcm
from typing import Sequence

from flint import fmpq

from .errors import DEFAULT_LIMITS, Limits, NotNilpotent, ResourceError, SplitVerificationFailed
from .etale import EtaleAlgebra, algebra_span
from .exact_linalg import RatMat, int_kernel, int_kernel_mod, lcm_denominators, lll_reduce
from .lie import LieAlgebraQ, exp_nilpotent, split_dn
from .quadfield import TORSION_MODULUS, QuadElem, factor_int, unit_group, unit_log


@dataclass
class ArithGenResult:
    gens: list[RatMat]
    provenance: list[tuple] = field(default_factory=list)

    @property
    def torus(self) -> list[RatMat]:
        return [g for g, p in zip(self.gens, self.provenance) if p[0] == "torus"]

    @property
    def unipotent(self) -> list[RatMat]:
        return [g for g, p in zip(self.gens, self.provenance) if p[0] == "unipotent"]


# ---------------------------------------------------------------------------
# unipotent part


def exp_scale(b: RatMat) -> int:
    """Least c > 0 with every term c^j b^j / j! of exp(c b) integral."""
    n = b.n
    need: dict[int, int] = {}
    term = RatMat.identity(n)
    for j in range(1, n + 1):
        term = term * b * fmpq(1, j)
        if term.is_zero():
            break
        den = term.denominator()
        if den == 1:
            continue
        for p, e in factor_int(den).items():
            need[p] = max(need.get(p, 0), ceil(e / j))
    c = 1
    for p, e in need.items():
        c *= p ** e
    return c


def gamma_n(n_basis: Sequence[RatMat]) -> list[RatMat]:
    """exp(c_i b_i) with c_i the least scale making the exponential series integral.

    Each b_i is first rescaled to the primitive integral matrix on its line, so
    the result does not depend on how the basis happens to be scaled.
    """
    out = []
    for b in n_basis:
        if not b.is_nilpotent():
            raise NotNilpotent("basis element is not nilpotent")
        b = primitive_multiple(b)
        out.append(exp_nilpotent(b * exp_scale(b)))
    return out


def primitive_multiple(b: RatMat) -> RatMat:
    """The integral matrix with coprime entries on the positive ray through b."""
    e = [x for x in b.entries() if x != 0]
    num = reduce(gcd, (int(x.p) for x in e), 0)
    den = reduce(lcm, (int(x.q) for x in e), 1)
    return b * fmpq(den, num) if num else b


# ---------------------------------------------------------------------------
# torus part


def _torsion_generator(D: int) -> QuadElem:
    if D == -1:
        return QuadElem(0, 1, -1)
    if D == -3:
        return QuadElem(fmpq(1, 2), fmpq(1, 2), -3)
    return QuadElem(-1, 0, D)


def _embeddings(alg: EtaleAlgebra):
    """(component index, conjugate?) pairs: one per complex embedding of A."""
    out = []
    for j, comp in enumerate(alg.components):
        out.append((j, False))
        if comp.degree == 2:
            out.append((j, True))
    return out


def character_lattice(alg: EtaleAlgebra, d_basis: Sequence[RatMat]) -> list[list[int]]:
    """Integer vectors z (one entry per embedding) with sum z * sigma(x) = 0 on d.

    Values sigma(x) live in the span of {1} and {sqrt D}; the conditions are
    split along that Q-basis.
    """
    emb = _embeddings(alg)
    rows: list[list[fmpq]] = []
    for x in d_basis:
        t = alg.to_tuple(x)
        const = [t[j].a for j, _ in emb]
        rows.append(const)
        for D in sorted({alg.components[j].D for j, _ in emb if alg.components[j].D != 1}):
            rows.append([
                (-t[j].b if conj else t[j].b) if alg.components[j].D == D else fmpq(0)
                for j, conj in emb
            ])
    int_rows = []
    for r in rows:
        den = lcm_denominators(r)
        int_rows.append([int((x * den).p) for x in r])
    return int_kernel(int_rows, len(emb))


def _minimal_integral_power(x: RatMat, cap: int) -> tuple[int, RatMat]:
    y = x
    for k in range(1, cap + 1):
        if y.is_integral():
            return k, y
        y = y * x
    raise ResourceError(f"no integral power of a unit lift below {cap}")


def _character_logs(values: Sequence[QuadElem], alg: EtaleAlgebra, z_basis, limits):
    """Per character: per-D unit log sums and the mu_12 exponent of chi_z(x)."""
    emb = _embeddings(alg)
    logs = []
    for j, conj in emb:
        v = values[j].conj() if conj else values[j]
        logs.append(unit_log(v, limits))
    Ds = sorted({alg.components[j].D for j, _ in emb if alg.components[j].D > 1})
    out = []
    for z in z_basis:
        per_D = [sum(zi * logs[i][0] for i, zi in enumerate(z) if alg.components[emb[i][0]].D == D)
                 for D in Ds]
        tors = sum(zi * logs[i][1] for i, zi in enumerate(z)) % TORSION_MODULUS
        out.append((per_D, tors))
    return out


def _close_finite(group: set, g: RatMat) -> set:
    out = set(group)
    frontier = list(group)
    while frontier:
        x = frontier.pop()
        y = x * g
        if y not in out:
            out.add(y)
            frontier.append(y)
    return out


def _canonical_power_sign(g: RatMat) -> RatMat:
    """g or g^-1, whichever has the larger entry sum (ties broken lexicographically)."""
    gi = g.inv()
    key = lambda m: (sum(m.entries()), m.entries())
    return g if key(g) >= key(gi) else gi


def gamma_d(d_basis: Sequence[RatMat], limits: Limits = DEFAULT_LIMITS, seed: int = 0,
            with_provenance: bool = False):
    """Generators of a finite-index subgroup of D_Z, D the torus with Lie algebra span(d_basis)."""
    if not d_basis:
        return ([], []) if with_provenance else []
    n = d_basis[0].n
    alg = EtaleAlgebra(algebra_span(list(d_basis), n), rng=random.Random(seed), limits=limits)
    one = [QuadElem(1, 0, c.D) for c in alg.components]

    # candidate units of the maximal order, one component at a time, plus -1
    cands: list[tuple[tuple, list[QuadElem]]] = []
    for j, comp in enumerate(alg.components):
        tg = _torsion_generator(comp.D)
        vals = list(one)
        vals[j] = tg
        cands.append((("torsion", j, comp.D), vals))
        if comp.D > 1:
            eps = unit_group(comp.D, limits).fundamental_unit
            vals = list(one)
            vals[j] = eps
            cands.append((("unit", j, comp.D), vals))
    cands.append((("minus_identity",), [QuadElem(-1, 0, c.D) for c in alg.components]))

    lifted = []
    for tag, vals in cands:
        x = alg.from_tuple(vals)
        k, xk = _minimal_integral_power(x, limits.power_search_cap)
        lifted.append((tag, k, [v ** k for v in vals], xk))

    z_basis = character_lattice(alg, d_basis)
    Ds = sorted({c.D for c in alg.components if c.D > 1})
    if z_basis:
        data = [_character_logs(vals, alg, z_basis, limits) for _, _, vals, _ in lifted]
        rows, mod_rows = [], []
        for zi in range(len(z_basis)):
            for di in range(len(Ds)):
                rows.append([data[c][zi][0][di] for c in range(len(lifted))])
            mod_rows.append([data[c][zi][1] for c in range(len(lifted))])
        Y = int_kernel_mod(rows, mod_rows, len(lifted), TORSION_MODULUS)
    else:
        Y = [[int(i == j) for j in range(len(lifted))] for i in range(len(lifted))]
    # sign-normalize so that a single unit appears as itself rather than its inverse
    Y = [y if next((v for v in y if v), 0) > 0 else [-v for v in y] for y in lll_reduce(Y)]

    gens, prov, seen = [], [], set()
    ident = RatMat.identity(n)
    torsion = {ident}  # finite group generated by the torsion generators kept so far
    for y in Y:
        g = ident
        for yi, (_, _, _, xk) in zip(y, lifted):
            if yi:
                g = g * (xk ** yi)
        if g == ident:
            continue
        g = _canonical_power_sign(g)
        if g in seen or g in torsion:
            continue
        if (g ** TORSION_MODULUS).is_identity():
            torsion = _close_finite(torsion, g)
        seen.add(g)
        gens.append(g)
        prov.append(("torus", tuple(y), [t for t, *_ in lifted]))
    return (gens, prov) if with_provenance else gens


# ---------------------------------------------------------------------------
# both parts


def generating_arithmetic(g: LieAlgebraQ, limits: Limits = DEFAULT_LIMITS,
                          seed: int = 0) -> ArithGenResult:
    split = split_dn(g, seed=seed)
    tg, tprov = gamma_d(split.d_basis, limits=limits, seed=seed, with_provenance=True)
    ug = gamma_n(split.n_basis)
    uprov = [("unipotent", b) for b in split.n_basis]
    res = ArithGenResult(tg + ug, tprov + uprov)
    verify_arith_gens(g, res.gens)
    return res


def verify_arith_gens(g: LieAlgebraQ, gens: Sequence[RatMat]) -> None:
    for x in gens:
        if not x.is_integral() or x.det() not in (1, -1):
            raise SplitVerificationFailed("generator is not in GL(n,Z)")
        xi = x.inv()
        for b in g.basis:
            if not g.contains(x * b * xi):
                raise SplitVerificationFailed("generator does not normalize g")
