"""Plain-text group and Lie algebra files.

    group <n> <k>        (or: lie <n> <k>)
    matrix
    <n rows of n entries: integers or p/q in lowest terms, q > 0>
    ...

Blank lines are ignored and ``#`` starts a comment.  Lines starting with ``@``
(machine-readable result lines written by the CLI) are ignored as well, so CLI
output can be fed back in.
"""

from __future__ import annotations

import re
from math import gcd
from typing import Sequence

from flint import fmpq

from .errors import ParseError
from .exact_linalg import RatMat
from .lattice import GroupGens
from .lie import LieAlgebraQ

_ENTRY = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def parse_entry(tok: str) -> fmpq:
    m = _ENTRY.match(tok)
    if not m:
        raise ParseError(f"bad entry {tok!r}")
    p = int(m.group(1))
    if m.group(2) is None:
        return fmpq(p)
    q = int(m.group(2))
    if q == 0 or gcd(p, q) != 1:
        raise ParseError(f"entry {tok!r} is not a reduced fraction with positive denominator")
    return fmpq(p, q)


def format_entry(x: fmpq) -> str:
    return str(x.p) if x.q == 1 else f"{x.p}/{x.q}"


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line and not line.startswith("@"):
            out.append(line)
    return out


def parse_matrices(text: str) -> tuple[str, int, list[RatMat]]:
    """(kind, n, matrices) from file text; kind is 'group' or 'lie'."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty file")
    head = lines[0].split()
    if len(head) != 3 or head[0] not in ("group", "lie"):
        raise ParseError(f"bad header {lines[0]!r}")
    kind = head[0]
    try:
        n, k = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}") from None
    if n < 1 or k < 0:
        raise ParseError("header needs n >= 1 and k >= 0")
    if len(lines) != 1 + k * (n + 1):
        raise ParseError(f"expected {k} matrices of size {n}, found {len(lines) - 1} content lines")
    mats = []
    pos = 1
    for _ in range(k):
        if lines[pos] != "matrix":
            raise ParseError(f"expected 'matrix', got {lines[pos]!r}")
        rows = []
        for i in range(n):
            toks = lines[pos + 1 + i].split()
            if len(toks) != n:
                raise ParseError(f"row {toks} does not have {n} entries")
            rows.append([parse_entry(t) for t in toks])
        mats.append(RatMat(rows))
        pos += n + 1
    return kind, n, mats


def format_matrices(kind: str, mats: Sequence[RatMat], n: int | None = None) -> str:
    if n is None:
        n = mats[0].n
    out = [f"{kind} {n} {len(mats)}"]
    for m in mats:
        out.append("matrix")
        for row in m.rows():
            out.append(" ".join(format_entry(x) for x in row))
    return "\n".join(out) + "\n"


def parse_group(text: str) -> GroupGens:
    kind, n, mats = parse_matrices(text)
    if kind != "group":
        raise ParseError("expected a group file")
    if not mats:
        raise ParseError("a group file needs at least one generator")
    try:
        return GroupGens(mats)
    except Exception as exc:
        raise ParseError(str(exc)) from exc


def parse_lie(text: str) -> LieAlgebraQ:
    kind, n, mats = parse_matrices(text)
    if kind != "lie":
        raise ParseError("expected a lie file")
    try:
        return LieAlgebraQ(mats, n, check=True)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_group(S: GroupGens | Sequence[RatMat]) -> str:
    mats = S.gens if isinstance(S, GroupGens) else list(S)
    return format_matrices("group", mats)


def format_lie(g: LieAlgebraQ) -> str:
    return format_matrices("lie", g.basis, g.n)


def read_group(path: str) -> GroupGens:
    with open(path, encoding="utf-8") as fh:
        return parse_group(fh.read())


def read_lie(path: str) -> LieAlgebraQ:
    with open(path, encoding="utf-8") as fh:
        return parse_lie(fh.read())
