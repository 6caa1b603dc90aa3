"""H intersected with GL(n,Z): orbit of Z^n under H and Schreier generators of its stabilizer."""

from __future__ import annotations

from dataclasses import dataclass, field

from flint import fmpq

from .errors import DEFAULT_LIMITS, Limits, NonIntegralGrowth, NotIntegral, OrbitCapExceeded
from .exact_linalg import RatMat
from .integrality import common_denominator, is_integral_sf
from .lattice import GroupGens, Lattice, basis_lattice, lattice_image


@dataclass
class OrbitStabilizer:
    orbit: list[Lattice]
    transversal: list[list[int]]
    stabilizer_gens: list[RatMat]
    transversal_mats: list[RatMat] = field(default_factory=list, repr=False)


def integral_intercept(S: GroupGens, d: int, limits: Limits = DEFAULT_LIMITS) -> OrbitStabilizer:
    """Orbit of Z^n under <S> and Schreier generators of the stabilizer of Z^n.

    Each orbit lattice L is checked against the bounds calL <= L <= (1/d) calL,
    calL the lattice generated by d H Z^n.
    """
    n = S.n
    try:
        low = basis_lattice(S, d)
    except NonIntegralGrowth as exc:
        raise NotIntegral(str(exc)) from exc
    high = low.scaled(fmpq(1, d))
    Zn = Lattice.standard(n)
    orbit = [Zn]
    index = {Zn: 0}
    words: list[list[int]] = [[]]
    reps = [RatMat.identity(n)]
    rep_inv: dict[int, RatMat] = {0: RatMat.identity(n)}
    stab: list[RatMat] = []
    seen_stab = set()
    i = 0
    while i < len(orbit):
        L = orbit[i]
        for j, s in enumerate(S.gens):
            M = lattice_image(s, L)
            k = index.get(M)
            if k is None:
                if not (M.contains(low) and high.contains(M)):
                    raise NotIntegral("orbit lattice escapes the bounds given by d")
                if len(orbit) >= limits.orbit_cap:
                    raise OrbitCapExceeded(f"orbit of Z^{n} exceeds {limits.orbit_cap}")
                index[M] = len(orbit)
                orbit.append(M)
                words.append([j + 1] + words[i])
                reps.append(s * reps[i])
                continue
            if k not in rep_inv:
                rep_inv[k] = reps[k].inv()
            g = rep_inv[k] * s * reps[i]
            if g.is_identity() or g in seen_stab:
                continue
            seen_stab.add(g)
            stab.append(g)
        i += 1
    return OrbitStabilizer(orbit, words, stab, reps)


def conjugating_matrix(S: GroupGens, limits: Limits = DEFAULT_LIMITS, seed: int = 0) -> RatMat:
    """g with g^-1 h g in GL(n,Z) for all h in <S>; columns a basis of the lattice d H Z^n."""
    if not is_integral_sf(S, limits=limits, seed=seed):
        raise NotIntegral("group is not integral")
    d = common_denominator(S, seed=seed).d
    try:
        L = basis_lattice(S, d)
    except NonIntegralGrowth as exc:
        raise NotIntegral(str(exc)) from exc
    g = L.basis * (1 / L.content())
    gi = g.inv()
    for s in S.gens:
        x = gi * s * g
        if not x.is_integral() or x.det() not in (1, -1):
            raise NotIntegral("conjugated generator is not in GL(n,Z)")
    return g
