"""Commutative semisimple matrix algebras split into fields of degree <= 2.

An ``EtaleAlgebra`` is given by a basis of a commutative algebra of matrices
with squarefree minimal polynomials.  A primitive element c is chosen, its
minimal polynomial is factored, and every algebra element g(c) is identified
with the tuple (g(alpha_1), ..., g(alpha_r)) of values at one root per factor.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Sequence

from math import gcd, isqrt

from flint import fmpq, fmpq_poly

from .errors import (
    DEFAULT_LIMITS,
    FactorIncomplete,
    FactorizationCapExceeded,
    Limits,
    ResourceError,
    UnsupportedDegree,
)
from .exact_linalg import (
    CoordinateSolver,
    RatMat,
    Span,
    factor_rational_poly,
    flatten,
    monic,
    poly_eval_matrix,
    squarefree_part,
)
from .quadfield import QuadElem, squarefree_decompose

log = logging.getLogger(__name__)


def algebra_span(gens: Sequence[RatMat], n: int, unital: bool = True) -> list[RatMat]:
    """Basis of the associative algebra generated by ``gens``.

    Basis elements are products of generators (words), so when the generators
    are group elements the basis consists of group elements too.
    """
    sp = Span(n * n)
    basis: list[RatMat] = []

    def push(x: RatMat) -> bool:
        if sp.add(flatten(x)):
            basis.append(x)
            return True
        return False

    if unital:
        push(RatMat.identity(n))
    for g in gens:
        push(g)
    i = 0
    while i < len(basis):
        a = basis[i]
        for g in gens:
            push(a * g)
        i += 1
    return basis


def close_under_conjugation(basis: list[RatMat], conj: Sequence[RatMat], n: int) -> list[RatMat]:
    """Smallest unital algebra containing ``basis`` and stable under x -> g x g^-1."""
    invs = [g.inv() for g in conj]
    current = algebra_span(basis, n)
    while True:
        extra = [g * x * gi for g, gi in zip(conj, invs) for x in current]
        grown = algebra_span(current + extra, n)
        if len(grown) == len(current):
            return current
        current = grown


@dataclass(frozen=True)
class Component:
    """One field factor: Q (degree 1) or Q(sqrt D) (degree 2)."""

    poly: fmpq_poly
    D: int
    root: QuadElem  # image of the primitive element

    @property
    def degree(self) -> int:
        return self.poly.degree()


class EtaleAlgebra:
    def __init__(self, basis: Sequence[RatMat], rng: random.Random | None = None,
                 limits: Limits = DEFAULT_LIMITS, tries: int = 200):
        self.basis = list(basis)
        if not self.basis:
            raise ValueError("empty algebra")
        self.n = self.basis[0].n
        self.dim = len(self.basis)
        self.limits = limits
        rng = rng or random.Random(0)
        for a in self.basis:
            for b in self.basis:
                if a * b != b * a:
                    raise ValueError("algebra is not commutative")
        self.c = self._primitive_element(rng, tries)
        powers = [RatMat.identity(self.n)]
        for _ in range(self.dim - 1):
            powers.append(powers[-1] * self.c)
        self._powers = powers
        self._solver = CoordinateSolver([flatten(p) for p in powers])
        f = monic(self.c.minpoly())
        if squarefree_part(f).degree() != f.degree():
            raise ValueError("algebra is not semisimple")
        self.minpoly = f
        factors, residual = factor_rational_poly(f)
        if residual is not None:
            raise UnsupportedDegree(f"field component of degree >= 3: {residual}")
        self.components = [self._component(g) for g, _ in factors]
        self._idempotents = self._crt_basis()

    def _primitive_element(self, rng, tries):
        if self.dim == 1:
            return self.basis[0]
        for t in range(tries):
            bound = 1 + t // 10
            coeffs = [rng.randint(-bound, bound) for _ in self.basis]
            log.debug("primitive element draw %s", coeffs)
            c = RatMat.zero(self.n)
            for k, b in zip(coeffs, self.basis):
                if k:
                    c = c + b * k
            if c.minpoly().degree() == self.dim:
                return c
        raise ResourceError("no primitive element found for the algebra")

    def _component(self, g: fmpq_poly) -> Component:
        if g.degree() == 1:
            r = -g.coeffs()[0]
            return Component(g, 1, QuadElem(r))
        if g.degree() != 2:
            raise FactorIncomplete(f"unexpected factor {g}")
        q, p, _ = g.coeffs()
        disc = p * p - 4 * q
        try:
            D, s = squarefree_decompose(disc, self.limits)
        except FactorizationCapExceeded:
            D, s = self._field_from_basis(g, disc)
        return Component(g, D, QuadElem(-p / 2, s / 2, D))

    def _field_from_basis(self, g: fmpq_poly, disc: fmpq) -> tuple[int, fmpq]:
        """Squarefree D with disc = s^2 D, from the gcd of b^2 disc over the basis.

        Every element of the component is a + b sqrt(disc) with b^2 disc in D * Q^2,
        so the gcd usually has a small cofactor even when disc does not factor.
        """
        acc = int(disc.p * disc.q)
        for x in self.basis:
            h = self.poly_of(x) % g
            co = h.coeffs()
            if len(co) < 2 or co[1] == 0:
                continue
            r = co[1] * co[1] * disc
            acc = gcd(acc, int(r.p * r.q))
        D, _ = squarefree_decompose(acc, self.limits)
        ratio = disc / D
        num, den = isqrt(int(ratio.p)), isqrt(int(ratio.q))
        if ratio < 0 or fmpq(num * num, den * den) != ratio:
            raise FactorIncomplete("could not separate the square part of a discriminant")
        return D, fmpq(num, den)

    def _crt_basis(self) -> list[fmpq_poly]:
        F = self.minpoly
        if len(self.components) == 1:
            return [fmpq_poly(1)]
        out = []
        for comp in self.components:
            cof = F // comp.poly
            g, s, _ = cof.xgcd(comp.poly)
            out.append((s * cof * (1 / g.leading_coefficient())) % F)
        return out

    # -- conversions ----------------------------------------------------------
    def poly_of(self, x: RatMat) -> fmpq_poly | None:
        co = self._solver.coords(flatten(x))
        if co is None:
            return None
        return fmpq_poly(co)

    def contains(self, x: RatMat) -> bool:
        return self._solver.coords(flatten(x)) is not None

    def to_tuple(self, x: RatMat) -> tuple[QuadElem, ...]:
        g = self.poly_of(x)
        if g is None:
            raise ValueError("element not in the algebra")
        return tuple(_eval_poly(g, comp.root) for comp in self.components)

    def from_tuple(self, values: Sequence[QuadElem]) -> RatMat:
        acc = fmpq_poly(0)
        for comp, e, v in zip(self.components, self._idempotents, values):
            if comp.degree == 1:
                local = fmpq_poly([v.a])
            else:
                # sqrt D = (2 X + p) / s at the chosen root
                q, p, _ = comp.poly.coeffs()
                s = comp.root.b * 2
                if v.b != 0 and v.D != comp.D:
                    raise UnsupportedDegree("value from the wrong field")
                local = fmpq_poly([v.a]) + fmpq_poly([p, 2]) * (v.b / s)
            acc += (local * e) % self.minpoly
        return poly_eval_matrix(acc % self.minpoly, self.c)


def _eval_poly(g: fmpq_poly, x: QuadElem) -> QuadElem:
    acc = QuadElem(0, 0, x.D)
    for co in reversed(g.coeffs()):
        acc = acc * x + QuadElem(co, 0, x.D)
    return acc


def eigen_tuple(x: RatMat, limits: Limits = DEFAULT_LIMITS) -> tuple[QuadElem, ...]:
    """Eigenvalue data of a single semisimple matrix: one root per irreducible factor."""
    alg = EtaleAlgebra(algebra_span([x], x.n), limits=limits)
    return alg.to_tuple(x)

