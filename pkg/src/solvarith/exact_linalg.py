"""Exact rational scalars, matrices and polynomials.

Everything is backed by FLINT (``python-flint``): ``fmpq`` for scalars,
``fmpq_mat`` for matrices and ``fmpq_poly`` for polynomials.  ``RatMat`` is a
thin immutable, hashable wrapper so that matrices can be used as dictionary
keys and compared structurally.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat, fmpq_poly, fmpz, fmpz_mat

Rat = fmpq
RatPoly = fmpq_poly


def rat(x) -> fmpq:
    """Coerce ints, strings like ``"-3/4"``, Fractions and fmpz/fmpq to fmpq."""
    if isinstance(x, fmpq):
        return x
    if isinstance(x, (int, fmpz)):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/")
            return fmpq(int(p), int(q))
        return fmpq(int(s))
    raise TypeError(f"cannot convert {x!r} to a rational")


def denom(x: fmpq) -> int:
    return int(x.q)


def numer(x: fmpq) -> int:
    return int(x.p)


class RatMat:
    """Immutable matrix over Q.

    Mostly square (group and Lie algebra elements), but rectangular shapes
    are allowed for bases and coordinate blocks.
    """

    __slots__ = ("_m", "_key")

    def __init__(self, data, ncols: int | None = None):
        if isinstance(data, fmpq_mat):
            self._m = data
        elif isinstance(data, RatMat):
            self._m = data._m
        else:
            rows = [[rat(x) for x in row] for row in data]
            r = len(rows)
            c = len(rows[0]) if rows else (ncols or 0)
            if any(len(row) != c for row in rows):
                raise ValueError("ragged rows")
            self._m = fmpq_mat(r, c, [x for row in rows for x in row])
        self._key = None

    # -- constructors -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "RatMat":
        m = fmpq_mat(n, n)
        for i in range(n):
            m[i, i] = 1
        return cls(m)

    @classmethod
    def zero(cls, r: int, c: int | None = None) -> "RatMat":
        return cls(fmpq_mat(r, r if c is None else c))

    @classmethod
    def diag(cls, entries: Sequence) -> "RatMat":
        n = len(entries)
        m = fmpq_mat(n, n)
        for i, x in enumerate(entries):
            m[i, i] = rat(x)
        return cls(m)

    @classmethod
    def from_flat(cls, r: int, c: int, flat: Sequence) -> "RatMat":
        return cls(fmpq_mat(r, c, [rat(x) for x in flat]))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "RatMat":
        if not cols:
            raise ValueError("need at least one column")
        n = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["RatMat"]) -> "RatMat":
        n = sum(b.nrows for b in blocks)
        m = fmpq_mat(n, n)
        off = 0
        for b in blocks:
            k = b.nrows
            for i in range(k):
                for j in range(k):
                    m[off + i, off + j] = b._m[i, j]
            off += k
        return cls(m)

    @classmethod
    def elementary(cls, n: int, i: int, j: int) -> "RatMat":
        m = fmpq_mat(n, n)
        m[i, j] = 1
        return cls(m)

    # -- shape and access ----------------------------------------------
    @property
    def flint(self) -> fmpq_mat:
        return self._m

    @property
    def nrows(self) -> int:
        return self._m.nrows()

    @property
    def ncols(self) -> int:
        return self._m.ncols()

    @property
    def n(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    def __getitem__(self, ij):
        return self._m[ij]

    def entries(self) -> list:
        return self._m.entries()

    def rows(self) -> list[list]:
        c = self.ncols
        e = self.entries()
        return [e[i * c:(i + 1) * c] for i in range(self.nrows)]

    def columns(self) -> list[list]:
        return self.transpose().rows()

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "RatMat":
        m = fmpq_mat(r1 - r0, c1 - c0)
        for i in range(r0, r1):
            for j in range(c0, c1):
                m[i - r0, j - c0] = self._m[i, j]
        return RatMat(m)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "RatMat") -> "RatMat":
        return RatMat(self._m + other._m)

    def __sub__(self, other: "RatMat") -> "RatMat":
        return RatMat(self._m - other._m)

    def __neg__(self) -> "RatMat":
        return RatMat(-self._m)

    def __mul__(self, other):
        if isinstance(other, RatMat):
            return RatMat(self._m * other._m)
        return RatMat(self._m * rat(other))

    def __rmul__(self, other):
        return RatMat(self._m * rat(other))

    def __matmul__(self, other: "RatMat") -> "RatMat":
        return RatMat(self._m * other._m)

    def __pow__(self, k: int) -> "RatMat":
        if k < 0:
            return self.inv() ** (-k)
        result = RatMat.identity(self.n)._m
        base = self._m
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return RatMat(result)

    def inv(self) -> "RatMat":
        return RatMat(self._m.inv())

    def det(self) -> fmpq:
        return self._m.det()

    def trace(self) -> fmpq:
        n = self.n
        return sum((self._m[i, i] for i in range(n)), fmpq(0))

    def transpose(self) -> "RatMat":
        return RatMat(self._m.transpose())

    @property
    def T(self) -> "RatMat":
        return self.transpose()

    def conj(self, g: "RatMat") -> "RatMat":
        """Return g * self * g^-1."""
        return RatMat(g._m * self._m * g._m.inv())

    def charpoly(self) -> fmpq_poly:
        return self._m.charpoly()

    def minpoly(self) -> fmpq_poly:
        return self._m.minpoly()

    def rank(self) -> int:
        return self._m.rank()

    # -- predicates ---------------------------------------------------------
    def denominator(self) -> int:
        """Least common multiple of the entry denominators."""
        return int(self._m.numer_denom()[1])

    def numer_denom(self) -> tuple[fmpz_mat, int]:
        num, d = self._m.numer_denom()
        return num, int(d)

    def is_integral(self) -> bool:
        return self.denominator() == 1

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries())

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == RatMat.identity(self.nrows)

    def is_nilpotent(self) -> bool:
        n = self.n
        return (self ** n).is_zero()

    def is_unipotent(self) -> bool:
        return (self - RatMat.identity(self.n)).is_nilpotent()

    # -- identity -------------------------------------------------------------
    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.nrows, self.ncols, tuple(self.entries()))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMat):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"RatMat({[[str(x) for x in row] for row in self.rows()]})"

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows())


def bracket(a: RatMat, b: RatMat) -> RatMat:
    return RatMat(a.flint * b.flint - b.flint * a.flint)


def commutator(a: RatMat, b: RatMat) -> RatMat:
    """Group commutator a^-1 b^-1 a b."""
    return a.inv() * b.inv() * a * b


def flatten(m: RatMat) -> list:
    return m.entries()


def unflatten(v: Sequence, n: int) -> RatMat:
    return RatMat.from_flat(n, n, v)


# ---------------------------------------------------------------------------
# polynomials


def poly_eval_matrix(p: fmpq_poly, m: RatMat) -> RatMat:
    """Horner evaluation of p at a square matrix."""
    n = m.n
    coeffs = p.coeffs()
    ident = RatMat.identity(n).flint
    acc = fmpq_mat(n, n)
    for c in reversed(coeffs):
        acc = acc * m.flint + ident * c
    return RatMat(acc)


def monic(p: fmpq_poly) -> fmpq_poly:
    return p / p.leading_coefficient()


def char_min_poly(m: RatMat) -> tuple[fmpq_poly, fmpq_poly]:
    return m.charpoly(), m.minpoly()


def squarefree_part(p: fmpq_poly) -> fmpq_poly:
    return monic(p / p.gcd(p.derivative()))


def factor_rational_poly(p) -> tuple[list[tuple[fmpq_poly, int]], fmpq_poly | None]:
    """Split p into monic linear and quadratic irreducible factors.

    Irreducible factors of degree >= 3 are multiplied together (with their
    multiplicities) into ``residual``; ``residual`` is None when there are none.
    The product of the factors and the residual equals p up to a constant.
    """
    p = fmpq_poly(p)
    if p == 0:
        raise ValueError("cannot factor the zero polynomial")
    factors: list[tuple[fmpq_poly, int]] = []
    residual = fmpq_poly(1)
    _, irreducibles = p.factor()
    for f, e in irreducibles:
        f = monic(f)
        if f.degree() <= 2:
            factors.append((f, e))
        else:
            residual *= f ** e
    factors.sort(key=lambda fe: (fe[0].degree(), [str(c) for c in fe[0].coeffs()]))
    return factors, (residual if residual.degree() > 0 else None)


# ---------------------------------------------------------------------------
# rational linear algebra


class Span:
    """Incremental echelon basis of a subspace of Q^N.

    Rows are stored sparsely; each stored row has a leading 1 at its pivot
    and zeros at all earlier pivots, so a single forward pass reduces.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: list[tuple[int, list[tuple[int, fmpq]]]] = []
        self.vectors: list[list] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: Sequence) -> list:
        v = list(v)
        for piv, row in self._rows:
            a = v[piv]
            if a:
                for j, x in row:
                    v[j] -= a * x
        return v

    def add(self, v: Sequence) -> bool:
        """Add v; return True if the span grew."""
        r = self.reduce(v)
        for piv, x in enumerate(r):
            if x:
                break
        else:
            return False
        inv = 1 / r[piv]
        row = [(j, y * inv) for j, y in enumerate(r) if j >= piv and y]
        self._rows.append((piv, row))
        self.vectors.append(list(v))
        return True

    def __contains__(self, v) -> bool:
        return not any(self.reduce(v))


class CoordinateSolver:
    """Coordinates with respect to a fixed list of linearly independent vectors."""

    def __init__(self, vectors: Sequence[Sequence]):
        self.k = len(vectors)
        self.vectors = [list(map(rat, v)) for v in vectors]
        if self.k == 0:
            self.dim = 0
            return
        self.dim = len(self.vectors[0])
        self._B = fmpq_mat(self.k, self.dim, [x for v in self.vectors for x in v])
        R, rank = self._B.rref()
        if rank != self.k:
            raise ValueError("vectors are linearly dependent")
        pivots = []
        for i in range(self.k):
            for j in range(self.dim):
                if R[i, j] != 0:
                    pivots.append(j)
                    break
        self.pivots = pivots
        sub = fmpq_mat(self.k, self.k, [self._B[i, j] for i in range(self.k) for j in pivots])
        self._inv = sub.inv()

    def coords(self, v: Sequence) -> list | None:
        """Coordinates of v, or None if v is not in the span."""
        if self.k == 0:
            return [] if not any(v) else None
        row = fmpq_mat(1, self.k, [rat(v[j]) for j in self.pivots])
        c = row * self._inv
        if (c * self._B).entries() != [rat(x) for x in v]:
            return None
        return c.entries()


def nullspace(m: fmpq_mat | RatMat) -> list[list]:
    """Basis of {x : m x = 0}."""
    if isinstance(m, RatMat):
        m = m.flint
    r, c = m.nrows(), m.ncols()
    if r == 0:
        return [[fmpq(int(i == j)) for i in range(c)] for j in range(c)]
    R, rank = m.rref()
    pivots = []
    for i in range(rank):
        for j in range(c):
            if R[i, j] != 0:
                pivots.append(j)
                break
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [fmpq(0)] * c
        v[f] = fmpq(1)
        for i, pj in enumerate(pivots):
            v[pj] = -R[i, f]
        basis.append(v)
    return basis


def span_basis(vectors: Iterable[Sequence], dim: int) -> list[list]:
    """A sub-list of ``vectors`` forming a basis of their span."""
    sp = Span(dim)
    for v in vectors:
        sp.add(v)
    return sp.vectors


# ---------------------------------------------------------------------------
# integer lattices


def lcm_denominators(xs: Iterable) -> int:
    return reduce(lcm, (denom(rat(x)) for x in xs), 1)


def hnf_basis(vectors: Sequence[Sequence], n: int | None = None) -> tuple[RatMat, int]:
    """Column Hermite normal form basis of the Z-span of rational vectors.

    Returns an n x r matrix whose columns are the canonical basis (pivots
    positive, off-pivot entries reduced) and the rank r.
    """
    vectors = [list(map(rat, v)) for v in vectors]
    if n is None:
        if not vectors:
            raise ValueError("dimension needed for an empty vector list")
        n = len(vectors[0])
    if not vectors:
        return RatMat(fmpq_mat(n, 0)), 0
    scale = lcm_denominators(x for v in vectors for x in v)
    ints = fmpz_mat(len(vectors), n, [int(x * scale) for v in vectors for x in v])
    h = ints.hnf()
    rows = [[h[i, j] for j in range(n)] for i in range(h.nrows())]
    rows = [r for r in rows if any(r)]
    r = len(rows)
    if r == 0:
        return RatMat(fmpq_mat(n, 0)), 0
    basis = fmpq_mat(n, r, [fmpq(rows[j][i], scale) for i in range(n) for j in range(r)])
    return RatMat(basis), r


def int_hnf_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Nonzero rows of the row Hermite normal form of an integer matrix."""
    if not rows:
        return []
    h = fmpz_mat(len(rows), ncols, [int(x) for r in rows for x in r]).hnf()
    out = [[int(h[i, j]) for j in range(ncols)] for i in range(h.nrows())]
    return [r for r in out if any(r)]


def int_kernel(rows: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    """Z-basis of {z in Z^k : A z = 0} for the integer matrix A with given rows."""
    rows = [list(map(int, r)) for r in rows if any(r)]
    if not rows:
        return [[int(i == j) for i in range(k)] for j in range(k)]
    m = len(rows)
    aug = [[rows[i][j] for i in range(m)] + [int(j == t) for t in range(k)] for j in range(k)]
    h = int_hnf_rows(aug, m + k)
    kernel = [r[m:] for r in h if not any(r[:m])]
    return lll_reduce(kernel)


def int_kernel_mod(rows: Sequence[Sequence[int]], mod_rows: Sequence[Sequence[int]], k: int,
                   modulus: int) -> list[list[int]]:
    """Z-basis of {y in Z^k : rows y = 0 and mod_rows y = 0 mod modulus}."""
    s = len(mod_rows)
    full = [list(r) + [0] * s for r in rows]
    for i, r in enumerate(mod_rows):
        full.append(list(r) + [modulus * int(i == j) for j in range(s)])
    return lll_reduce([v[:k] for v in int_kernel(full, k + s)])


def lll_reduce(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """LLL-reduced basis of the lattice spanned by the given integer rows."""
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return []
    k = len(rows[0])
    red = fmpz_mat(len(rows), k, [x for r in rows for x in r]).lll()
    out = [[int(red[i, j]) for j in range(k)] for i in range(red.nrows())]
    return [r for r in out if any(r)]


def unimodular_completion(z: Sequence[int]) -> list[list[int]]:
    """Columns of a unimodular matrix whose first column is the primitive vector z."""
    z = [int(x) for x in z]
    k = len(z)
    if reduce(gcd, z, 0) != 1:
        raise ValueError("vector is not primitive")
    # U starts as identity; row operations on (v | U) bring v to +-e_1.
    v = list(z)
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    for i in range(k - 1, 0, -1):
        a, b = v[i - 1], v[i]
        if b == 0:
            continue
        g, s, t = _xgcd(a, b)
        ra, rb = U[i - 1], U[i]
        U[i - 1] = [s * x + t * y for x, y in zip(ra, rb)]
        U[i] = [(-b // g) * x + (a // g) * y for x, y in zip(ra, rb)]
        v[i - 1], v[i] = g, 0
    if v[0] < 0:
        U[0] = [-x for x in U[0]]
    inv = fmpz_mat(k, k, [x for r in U for x in r]).inv()
    cols = [[int(inv[i, j]) for i in range(k)] for j in range(k)]
    return cols


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0
