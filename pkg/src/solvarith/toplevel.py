"""Deciding arithmeticity of solvable matrix groups, and the benchmark family g(n)."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from math import comb

from flint import fmpq_mat

from .arithgen import generating_arithmetic
from .errors import DEFAULT_LIMITS, Limits, ResourceExhausted
from .exact_linalg import RatMat
from .hirsch import hirsch_number
from .integrality import is_integral_sf
from .lattice import GroupGens
from .lie import LieAlgebraQ

STAGES = ("IsIntegralSF", "GeneratingArithmetic", "HirschNumber(S)", "HirschNumber(T)")


@dataclass
class ArithDecision:
    verdict: bool
    integrality: bool | None  # None when the integrality test was skipped
    h_input: int | None = None
    h_arith: int | None = None
    timings: dict = field(default_factory=dict)
    arith_gens: list = field(default_factory=list, repr=False)
    max_entry_digits: int = 0


def is_arithmetic_solvable(S: GroupGens, g: LieAlgebraQ, skip_integrality: bool = False,
                           limits: Limits = DEFAULT_LIMITS, seed: int = 0) -> ArithDecision:
    """Integrality test, then compare h(<S>) with h of generators T of G_Z.

    With ``skip_integrality`` step one is omitted, which is valid when G is unipotent.
    """
    timings = {}
    integral = None
    if not skip_integrality:
        t0 = time.perf_counter()
        integral = is_integral_sf(S, limits=limits, seed=seed)
        timings[STAGES[0]] = time.perf_counter() - t0
        if not integral:
            return ArithDecision(False, False, timings=timings)

    t0 = time.perf_counter()
    T = generating_arithmetic(g, limits=limits, seed=seed).gens
    timings[STAGES[1]] = time.perf_counter() - t0

    t0 = time.perf_counter()
    h_s = hirsch_number(S, limits=limits, seed=seed).h
    timings[STAGES[2]] = time.perf_counter() - t0

    t0 = time.perf_counter()
    h_t = hirsch_number(GroupGens(T), limits=limits, seed=seed).h if T else 0
    timings[STAGES[3]] = time.perf_counter() - t0

    digits = max((len(str(abs(int(x.p)))) for t in T for x in t.entries()), default=0)
    return ArithDecision(h_s == h_t, integral, h_s, h_t, timings, T, digits)


# ---------------------------------------------------------------------------
# benchmark family


def lie_gn(n: int) -> list[RatMat]:
    """Basis of g(n) in gl(2n,Q): torus blocks [[0,1],[2i-1,0]] and the strictly block upper part."""
    N = 2 * n
    basis = []
    for i in range(n):
        m = fmpq_mat(N, N)
        m[2 * i, 2 * i + 1] = 1
        m[2 * i + 1, 2 * i] = 2 * i + 1
        basis.append(RatMat(m))
    for I in range(n):
        for J in range(I + 1, n):
            for a in range(2):
                for b in range(2):
                    basis.append(RatMat.elementary(N, 2 * I + a, 2 * J + b))
    return basis


def gn_dim(n: int) -> int:
    return n + 4 * comb(n, 2)


@dataclass
class BenchInstance:
    n: int
    lie_basis: list[RatMat]
    conjugator_m: RatMat
    S: GroupGens
    seed: int
    exponents: list[int]
    kinds: list[str] = field(default_factory=list)  # "torus" or "unipotent" per generator

    @property
    def lie(self) -> LieAlgebraQ:
        return LieAlgebraQ(self.lie_basis, check=False)


def random_conjugator(N: int, rng: random.Random, cap: int = 10 ** 4) -> RatMat:
    """Entries uniform from [0,0,1] until the determinant is not 0 or +-1."""
    for _ in range(cap):
        m = RatMat([[rng.choice((0, 0, 1)) for _ in range(N)] for _ in range(N)])
        if m.det() not in (0, 1, -1):
            return m
    raise ResourceExhausted(f"no suitable conjugator after {cap} draws")


def bench_instance(n: int, seed: int = 0, limits: Limits = DEFAULT_LIMITS) -> BenchInstance:
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = random.Random(seed)
    basis = lie_gn(n)
    m = random_conjugator(2 * n, rng)
    mi = m.inv()
    res = generating_arithmetic(LieAlgebraQ(basis), limits=limits, seed=seed)
    ks = [rng.choice((1, 2)) for _ in res.gens]
    S = GroupGens([(m * g * mi) ** k for g, k in zip(res.gens, ks)])
    kinds = [p[0] for p in res.provenance]
    return BenchInstance(n, [m * b * mi for b in basis], m, S, seed, ks, kinds)


@dataclass
class HarnessRow:
    n: int
    dim: int
    h: int | None
    runs: int
    all_ok: bool
    avg: dict
    verdicts: list = field(default_factory=list)
    max_entry_digits: int = 0


def table1_harness(n_values, runs: int = 1, seed: int = 0, limits: Limits = DEFAULT_LIMITS) -> list[HarnessRow]:
    """Bench instances for each n and run; per-stage average timings."""
    rows = []
    for n in n_values:
        dim = gn_dim(n)
        sums = {s: 0.0 for s in STAGES}
        verdicts, hs, digits = [], set(), 0
        for r in range(runs):
            inst = bench_instance(n, seed + r, limits)
            dec = is_arithmetic_solvable(inst.S, inst.lie, limits=limits, seed=seed + r)
            for s, t in dec.timings.items():
                sums[s] += t
            verdicts.append(dec.verdict)
            hs.add(dec.h_input)
            digits = max(digits, dec.max_entry_digits)
        h = hs.pop() if len(hs) == 1 else None
        ok = all(verdicts) and h == dim - 1
        rows.append(HarnessRow(n, dim, h, runs, ok, {s: v / runs for s, v in sums.items()}, verdicts, digits))
    return rows


def format_table(rows: list[HarnessRow]) -> str:
    head = f"{'n':>3} {'dim':>4} {'h':>4} " + " ".join(f"{s:>20}" for s in STAGES)
    lines = [head]
    for r in rows:
        h = "?" if r.h is None else str(r.h)
        lines.append(f"{r.n:>3} {r.dim:>4} {h:>4} " + " ".join(f"{r.avg[s]:>20.3f}" for s in STAGES))
    return "\n".join(lines)
