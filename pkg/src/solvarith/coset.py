"""Todd-Coxeter coset enumeration (HLT strategy) for small finite presentations.

Used only to check that a subset of relators still presents a group of the
expected order, so that fewer relators need to be evaluated downstream.
"""

from __future__ import annotations

from typing import Sequence


class CosetTable:
    def __init__(self, ngens: int, limit: int):
        self.ncols = 2 * ngens
        self.limit = limit
        self.table: list[list[int]] = [[-1] * self.ncols]
        self.parent = [0]
        self.alive_count = 1
        self._queue: list[int] = []

    @staticmethod
    def col(x: int) -> int:
        """Column of a signed 1-based generator index."""
        return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> int:
        if len(self.table) >= self.limit:
            raise OverflowError
        d = len(self.table)
        self.table.append([-1] * self.ncols)
        self.parent.append(d)
        self.alive_count += 1
        self.table[c][x] = d
        self.table[d][x ^ 1] = c
        return d

    def _merge(self, a: int, b: int) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        self.parent[hi] = lo
        self.alive_count -= 1
        self._queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        self._queue = []
        self._merge(a, b)
        i = 0
        while i < len(self._queue):
            g = self._queue[i]
            i += 1
            row = self.table[g]
            for x in range(self.ncols):
                d = row[x]
                if d < 0:
                    continue
                xi = x ^ 1
                if self.table[d][xi] == g:
                    self.table[d][xi] = -1
                mu, nu = self.rep(g), self.rep(d)
                if self.table[mu][x] >= 0:
                    self._merge(nu, self.table[mu][x])
                elif self.table[nu][xi] >= 0:
                    self._merge(mu, self.table[nu][xi])
                else:
                    self.table[mu][x] = nu
                    self.table[nu][xi] = mu

    def scan_and_fill(self, c: int, word: Sequence[int]) -> None:
        t = self.table
        f = b = c
        i, j = 0, len(word) - 1
        while True:
            while i <= j and t[f][word[i]] >= 0:
                f = t[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][word[j] ^ 1] >= 0:
                b = t[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][word[i]] = b
                t[b][word[i] ^ 1] = f
                return
            self.define(f, word[i])


def enumerate_cosets(ngens: int, relators: Sequence[Sequence[int]], limit: int) -> int | None:
    """Order of the finitely presented group, or None if ``limit`` cosets are exceeded.

    Relators are words of signed 1-based generator indices; the subgroup is trivial.
    """
    if ngens == 0:
        return 1
    words = [[CosetTable.col(x) for x in r] for r in relators if r]
    ct = CosetTable(ngens, limit)
    c = 0
    try:
        while c < len(ct.table):
            if ct.alive(c):
                for w in words:
                    ct.scan_and_fill(c, w)
                    if not ct.alive(c):
                        break
                if ct.alive(c):
                    for x in range(ct.ncols):
                        if ct.table[c][x] < 0:
                            ct.define(c, x)
            c += 1
    except OverflowError:
        return None
    return ct.alive_count
