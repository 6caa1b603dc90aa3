"""Exact arithmetic in Q and in quadratic fields Q(sqrt D).

Provides the unit group of the order Z[sqrt D], discrete logarithms of units,
prime-ideal valuations and multiplicative relation lattices.  Only degree <= 2
is supported; anything bigger is the caller's problem (UnsupportedDegree).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import exp, isqrt, log
from typing import Sequence

from flint import fmpq, fmpz

from .errors import (
    DEFAULT_LIMITS,
    FactorizationCapExceeded,
    Limits,
    NotAUnit,
    ResourceError,
    UnsupportedDegree,
)
from .exact_linalg import int_hnf_rows, int_kernel, int_kernel_mod, rat

TORSION_MODULUS = 12


class QuadElem:
    """a + b*sqrt(D) with a, b rational and D squarefree (D = 1 means Q, b = 0)."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D: int = 1):
        a, b = rat(a), rat(b)
        D = int(D)
        if D == 0:
            raise ValueError("D must be nonzero")
        if D == 1:
            if b != 0:
                a = a + b
                b = fmpq(0)
        self.a, self.b, self.D = a, b, D

    # -- arithmetic ------------------------------------------------------------
    def _check(self, other: "QuadElem") -> None:
        if self.D != other.D and self.b and other.b:
            raise UnsupportedDegree(f"mixing Q(sqrt {self.D}) and Q(sqrt {other.D})")

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            self._check(other)
            return other
        return QuadElem(other, 0, self.D)

    def _field(self, other: "QuadElem") -> int:
        if self.b:
            return self.D
        if other.b:
            return other.D
        return self.D if self.D != 1 else other.D

    def __add__(self, other):
        o = self._coerce(other)
        return QuadElem(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        D = self._field(o)
        return QuadElem(self.a * o.a + D * self.b * o.b, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.D)

    def norm(self) -> fmpq:
        return self.a * self.a - self.D * self.b * self.b

    def trace(self) -> fmpq:
        return 2 * self.a

    def inv(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k: int) -> "QuadElem":
        base = self if k >= 0 else self.inv()
        k = abs(k)
        result = QuadElem(1, 0, self.D)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- predicates --------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def in_z_sqrt_d(self) -> bool:
        """True if the element lies in the order Z[sqrt D]."""
        return self.a.q == 1 and self.b.q == 1

    def sign(self) -> int:
        """Sign under the real embedding sqrt D > 0 (D > 0 only)."""
        if self.D < 0 and self.b:
            raise ValueError("no real embedding")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with D b^2
        diff = self.a * self.a - self.D * self.b * self.b
        return sa if diff > 0 else sb

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * (self.D ** 0.5 if self.D > 0 else float("nan"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadElem):
            try:
                other = QuadElem(other, 0, self.D)
            except TypeError:
                return NotImplemented
        if self.b == 0 and other.b == 0:
            return self.a == other.a
        return self.D == other.D and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadElem({self.a})"
        return f"QuadElem({self.a} + {self.b}*sqrt({self.D}))"


# ---------------------------------------------------------------------------
# integer factorization


@lru_cache(maxsize=4)
def _primes_up_to(n: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i in range(n + 1) if sieve[i])


@lru_cache(maxsize=4096)
def _factor_cached(n: int, bound: int) -> tuple[tuple[int, int], ...]:
    out = []
    for p in _primes_up_to(bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.extend(_factor_cofactor(n, bound))
    return tuple(sorted(out))


def _factor_cofactor(n: int, bound: int) -> list[tuple[int, int]]:
    """Cofactor free of primes below ``bound``: a prime or a perfect power of one."""
    if n <= bound * bound or fmpz(n).is_prime():
        return [(n, 1)]
    # perfect powers arise from squared discriminants; detect them exactly
    for k in range(2, n.bit_length() // max(1, bound.bit_length() - 1) + 1):
        r = int(fmpz(n).root(k))
        if r ** k == n:
            merged: dict[int, int] = {}
            for p, e in _factor_cofactor(r, bound):
                merged[p] = merged.get(p, 0) + e * k
            return list(merged.items())
    raise FactorizationCapExceeded(f"cofactor {n} is composite with no prime factor below {bound}")


def factor_int(n: int, limits: Limits = DEFAULT_LIMITS) -> dict[int, int]:
    """Prime factorization of |n| by trial division plus a final primality test."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    return dict(_factor_cached(n, limits.trial_division_bound))


def squarefree_decompose(x, limits: Limits = DEFAULT_LIMITS) -> tuple[int, fmpq]:
    """Write a nonzero rational x as s^2 * D with D a squarefree integer; return (D, s).

    Only the squarefree part is needed, so a cofactor without small prime
    factors is accepted when it is prime or a perfect square.
    """
    x = rat(x)
    if x == 0:
        raise ValueError("zero has no squarefree part")
    num = int(x.p) * int(x.q)
    D, s = (-1 if num < 0 else 1), 1
    n = abs(num)
    bound = limits.trial_division_bound
    for p in _primes_up_to(bound):
        if p * p > n:
            break
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            D *= p
        s *= p ** (e // 2)
    if n > 1:
        r = isqrt(n)
        if r * r == n:
            s *= r
        elif n <= bound * bound or fmpz(n).is_prime():
            D *= n
        else:
            raise FactorizationCapExceeded(f"cofactor {n} is composite with no prime factor below {bound}")
    return D, fmpq(s, int(x.q))


def vp(n, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = int(n)
    if n == 0:
        raise ValueError("valuation of 0")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


# ---------------------------------------------------------------------------
# unit groups


@dataclass(frozen=True)
class UnitGroupData:
    D: int
    torsion_generator: QuadElem
    torsion_order: int
    fundamental_unit: QuadElem | None


def fundamental_unit(D: int, limits: Limits = DEFAULT_LIMITS) -> UnitGroupData:
    """Torsion and fundamental unit of Z[sqrt D] for squarefree D >= 2.

    Walks the continued fraction of sqrt D and returns the first convergent
    p/q with p^2 - D q^2 = +-1, which is the smallest unit > 1.
    """
    D = int(D)
    if D < 2 or not is_squarefree(D, limits):
        raise ValueError(f"D = {D} is not a squarefree integer >= 2")
    a0 = isqrt(D)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    for _ in range(2 * limits.pell_period_cap + 2):
        if p * p - D * q * q in (1, -1):
            return UnitGroupData(D, QuadElem(-1, 0, D), 2, QuadElem(p, q, D))
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    raise ResourceError(f"continued fraction period of sqrt {D} exceeds the cap")


def unit_group(D: int, limits: Limits = DEFAULT_LIMITS) -> UnitGroupData:
    """Unit group data for Z[sqrt D], any squarefree D (D = 1 is Z)."""
    if D == 1:
        return UnitGroupData(1, QuadElem(-1), 2, None)
    if D == -1:
        return UnitGroupData(-1, QuadElem(0, 1, -1), 4, None)
    if D < 0:
        return UnitGroupData(D, QuadElem(-1, 0, D), 2, None)
    return _real_unit_group(D, limits.pell_period_cap, limits.trial_division_bound)


@lru_cache(maxsize=256)
def _real_unit_group(D: int, cap: int, bound: int) -> UnitGroupData:
    return fundamental_unit(D, Limits(pell_period_cap=cap, trial_division_bound=bound))


def is_squarefree(n: int, limits: Limits = DEFAULT_LIMITS) -> bool:
    if n in (1, -1):
        return True
    return all(e == 1 for e in factor_int(n, limits).values())


def _is_unit_of_order(u: QuadElem) -> bool:
    return u.in_z_sqrt_d() and u.norm() in (1, -1)


def unit_decompose(u: QuadElem, data: UnitGroupData) -> tuple[int, int]:
    """(t, m) with u = torsion_generator^t * fundamental_unit^m."""
    if u.b != 0 and u.D != data.D:
        raise UnsupportedDegree("unit from a different field")
    u = QuadElem(u.a, u.b, data.D)
    if not _is_unit_of_order(u):
        raise NotAUnit(f"{u!r} is not a unit of Z[sqrt {data.D}]")
    eps = data.fundamental_unit
    m = 0
    if eps is not None:
        s = u.sign()
        v = u if s > 0 else -u
        # jump close to the answer with floating logs, then finish exactly
        big = v if v.a * v.b >= 0 else v.conj() * v.norm()
        guess = _log_ratio(big, eps)
        if v.a * v.b < 0:
            guess = -guess
        if guess:
            v = v * eps ** (-guess)
            m = guess
        while v > eps or v == eps:
            v = v / eps
            m += 1
        while v < 1:
            v = v * eps
            m -= 1
        if v != 1:
            raise NotAUnit("repeated division did not reach a torsion element")
        return (0 if s > 0 else 1), m
    g = data.torsion_generator
    x = QuadElem(1, 0, data.D)
    for t in range(data.torsion_order):
        if x == u:
            return t, 0
        x = x * g
    raise NotAUnit(f"{u!r} is not a torsion unit")


def _log_ratio(v: QuadElem, eps: QuadElem) -> int:
    # v has a, b of the same sign, so the float value has no cancellation
    try:
        fv = _approx_log(v)
        return int(round(fv / _approx_log(eps)))
    except (ValueError, OverflowError):
        return 0


def _approx_log(v: QuadElem) -> float:
    a = abs(v.a)
    b = abs(v.b)
    la = log(int(a.p)) - log(int(a.q)) if a else float("-inf")
    lb = (log(int(b.p)) - log(int(b.q)) + 0.5 * log(v.D)) if b else float("-inf")
    hi, lo = max(la, lb), min(la, lb)
    if lo == float("-inf"):
        return hi
    return hi + log(1.0 + exp(lo - hi))


# ---------------------------------------------------------------------------
# units of the maximal order: coordinates in Z x Z/12


def _roots_of_unity(D: int) -> list[tuple[int, QuadElem]]:
    """Roots of unity of Q(sqrt D) with their exponent in mu_12."""
    out = [(0, QuadElem(1, 0, D)), (6, QuadElem(-1, 0, D))]
    if D == -1:
        out += [(3, QuadElem(0, 1, -1)), (9, QuadElem(0, -1, -1))]
    elif D == -3:
        half = fmpq(1, 2)
        # (1 + sqrt -3)/2 = exp(i pi/3) = zeta_12^2
        w = QuadElem(half, half, -3)
        x = QuadElem(1, 0, -3)
        out = []
        for t in range(6):
            out.append((2 * t % 12, x))
            x = x * w
    return out


def unit_log(u: QuadElem, limits: Limits = DEFAULT_LIMITS) -> tuple[int, int]:
    """Coordinates (m, t) of a unit u of the maximal order.

    m is the exponent of |u|^3 in the fundamental unit of Z[sqrt D] (the cube
    always lies in Z[sqrt D]); t is the exponent of the torsion part in mu_12.
    The map u -> (m, t mod 12) is an injective homomorphism.
    """
    D = u.D
    if u.b == 0 and D > 1:
        D = 1
    if D == 1 or D < 0:
        for t, z in _roots_of_unity(D):
            if z == u:
                return 0, t
        raise NotAUnit(f"{u!r} is not a unit")
    data = unit_group(D, limits)
    s = u.sign()
    c = (u if s > 0 else -u) ** 3
    _, m = unit_decompose(c, data)
    return m, (0 if s > 0 else 6)


# ---------------------------------------------------------------------------
# prime ideal valuations


def _split_type(D: int, p: int) -> str:
    if p == 2:
        r = D % 8
        if r == 1:
            return "split"
        if r == 5:
            return "inert"
        return "ramified"
    j = fmpz(D % p).jacobi(p)
    return {0: "ramified", 1: "split", -1: "inert"}[int(j)]


def _padic_sqrt(D: int, p: int, k: int) -> int:
    """Canonical square root of D modulo p^k (p split in Q(sqrt D))."""
    if p == 2:
        r = 1
        for j in range(3, k + 1):
            if (r * r - D) % (1 << j):
                r += 1 << (j - 2)
        return r % (1 << k) if k > 0 else 0
    r = int(fmpz(D % p).sqrtmod(p))
    r = min(r, p - r)
    pk = p
    while pk < p ** k:
        pk = min(pk * pk, p ** k)
        r = (r - (r * r - D) * pow(2 * r, -1, pk)) % pk
    return r % p ** k


def valuations(x: QuadElem, limits: Limits = DEFAULT_LIMITS) -> dict[tuple[int, int], int]:
    """Nonzero valuations of x at the prime ideals of the maximal order.

    Keys are (p, j): j = 0 for the unique prime above a nonsplit p, and
    j = +1 / -1 for the two primes above a split p (sqrt D -> +-r p-adically).
    """
    if x.is_zero():
        raise ValueError("valuation of zero")
    # a rational x still lives in Q(sqrt D) when D != 1: primes above p may ramify or split
    D = x.D
    c = int((x.a.q * x.b.q) // fmpz(x.a.q).gcd(x.b.q))
    A = int((x.a * c).p)
    B = int((x.b * c).p)
    if D == 1:
        out = {}
        num, den = int(x.a.p), int(x.a.q)
        for p, e in factor_int(num, limits).items():
            out[(p, 0)] = e
        for p, e in factor_int(den, limits).items():
            out[(p, 0)] = -e
        return out
    N = A * A - D * B * B
    primes = set(factor_int(N, limits)) | set(factor_int(c, limits))
    out = {}
    for p in sorted(primes):
        kind = _split_type(D, p)
        vc = vp(c, p)
        if kind == "inert":
            v = vp(N, p) // 2 - vc
            if v:
                out[(p, 0)] = v
        elif kind == "ramified":
            v = vp(N, p) - 2 * vc
            if v:
                out[(p, 0)] = v
        else:
            # the canonical 2-adic root is only pinned down modulo 2^(k-1)
            k = vp(N, p) + 2
            r = _padic_sqrt(D, p, k)
            pk = p ** k
            for j, rr in ((1, r), (-1, -r)):
                val = (A + B * rr) % pk
                v = (vp(val, p) if val else k) - vc
                if v:
                    out[(p, j)] = v
    return out


# ---------------------------------------------------------------------------
# relation lattices


@dataclass(frozen=True)
class RelationLattice:
    """Lattice of exponent vectors z with prod gamma_j^z_j = 1.

    ``basis`` holds the HNF basis vectors as integer lists (columns of the
    basis matrix).
    """

    k: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def relation_rank(self) -> int:
        return len(self.basis)

    @property
    def group_rank(self) -> int:
        return self.k - len(self.basis)


def power_product(elements: Sequence[QuadElem], z: Sequence[int]) -> QuadElem:
    D = next((e.D for e in elements if e.b != 0), elements[0].D if elements else 1)
    acc = QuadElem(1, 0, D)
    for e, k in zip(elements, z):
        if k:
            acc = acc * e ** int(k)
    return acc


def relation_lattice_tuples(columns: Sequence[Sequence[QuadElem]],
                            limits: Limits = DEFAULT_LIMITS) -> list[list[int]]:
    """Relation lattice for tuples of field elements, coordinatewise.

    Each column is a tuple (x_1, ..., x_r) with x_c in a fixed field for every
    coordinate c.  Returns an integer basis of {z : prod_j col_j^z_j = 1}.
    """
    k = len(columns)
    if k == 0:
        return []
    r = len(columns[0])
    if any(x.is_zero() for col in columns for x in col):
        raise ValueError("zero element in relation lattice input")
    # one field per coordinate
    fields = []
    for c in range(r):
        Ds = {col[c].D for col in columns if col[c].D != 1}
        if len(Ds) > 1:
            raise UnsupportedDegree(f"coordinate {c} mixes quadratic fields {sorted(Ds)}")
        fields.append(Ds.pop() if Ds else 1)
    columns = [tuple(QuadElem(x.a, x.b, D) for x, D in zip(col, fields)) for col in columns]
    # stage 1: valuations force the product to be a unit
    rows = []
    for c in range(r):
        vals = [valuations(col[c], limits) for col in columns]
        keys = sorted(set().union(*vals))
        rows.extend([v.get(key, 0) for v in vals] for key in keys)
    K1 = int_kernel(rows, k)
    if not K1:
        return []
    # stage 2: unit logs of the products along a basis of stage 1
    logs = []
    for w in K1:
        logs.append([unit_log(power_product([col[c] for col in columns], w), limits)
                     for c in range(r)])
    m_rows = [[logs[i][c][0] for i in range(len(K1))] for c in range(r)]
    t_rows = [[logs[i][c][1] for i in range(len(K1))] for c in range(r)]
    Y = int_kernel_mod(m_rows, t_rows, len(K1), TORSION_MODULUS)
    rels = [[sum(y[i] * K1[i][j] for i in range(len(K1))) for j in range(k)] for y in Y]
    return int_hnf_rows(rels, k)


def mult_relation_lattice(elements: Sequence[QuadElem],
                          limits: Limits = DEFAULT_LIMITS) -> RelationLattice:
    """Relation lattice of nonzero elements of Q or of a single quadratic field."""
    Ds = {e.D for e in elements if e.b != 0}
    if len(Ds) > 1:
        raise UnsupportedDegree("elements from more than one quadratic field")
    D = Ds.pop() if Ds else 1
    elems = [QuadElem(e.a, e.b, D) for e in elements]
    basis = relation_lattice_tuples([(e,) for e in elems], limits)
    return RelationLattice(len(elems), tuple(tuple(v) for v in basis))


def multiplicative_rank(columns: Sequence[Sequence[QuadElem]],
                        limits: Limits = DEFAULT_LIMITS) -> int:
    """Torsion-free rank of the group generated by the given tuples."""
    return len(columns) - len(relation_lattice_tuples(columns, limits))
