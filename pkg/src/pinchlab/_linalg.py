"""Exact rational linear algebra: RREF nullspaces and a union-find blocked solver.

The constraint matrices that arise here (top-harmonic-part conditions) are
block diagonal once columns are grouped by the parity class of the monomials
they touch.  Rather than hard-coding the parity bookkeeping, columns are
clustered by shared row keys with a union-find, and an exact dense nullspace
is computed per cluster.  Clusters stay small (tens of columns), which keeps
Fraction arithmetic cheap.
"""

from __future__ import annotations

import math
from fractions import Fraction


def rref_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[int]]:
    """Nullspace basis of a dense rational matrix, as primitive integer vectors."""
    mat = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(integerize(v))
    return basis


def integerize(vec: list[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for x in vec:
        d = x.denominator if isinstance(x, Fraction) else 1
        den = den * d // math.gcd(den, d)
    iv = [int(x * den) for x in vec]
    g = 0
    for x in iv:
        g = math.gcd(g, abs(x))
    if g > 1:
        iv = [x // g for x in iv]
    return iv


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def blocked_nullspace(columns: list[dict]) -> list[list[int]]:
    """Nullspace of a sparse column-wise matrix {row key: value}, block by block.

    Columns that never share a row key live in independent blocks; the result
    is the concatenation of per-block nullspace bases, padded with zeros.
    """
    ncols = len(columns)
    dsu = _DSU(ncols)
    row_owner: dict = {}
    for j, col in enumerate(columns):
        for rk in col:
            if rk in row_owner:
                dsu.union(j, row_owner[rk])
            else:
                row_owner[rk] = j
    groups: dict[int, list[int]] = {}
    for j in range(ncols):
        groups.setdefault(dsu.find(j), []).append(j)
    basis: list[list[int]] = []
    for js in groups.values():
        rowkeys: dict = {}
        for j in js:
            for rk in columns[j]:
                rowkeys.setdefault(rk, len(rowkeys))
        if not rowkeys:
            for j in js:
                v = [0] * ncols
                v[j] = 1
                basis.append(v)
            continue
        dense = [[Fraction(0)] * len(js) for _ in range(len(rowkeys))]
        for jj, j in enumerate(js):
            for rk, val in columns[j].items():
                dense[rowkeys[rk]][jj] = Fraction(val)
        for v in rref_nullspace(dense, len(js)):
            out = [0] * ncols
            for jj, j in enumerate(js):
                out[j] = v[jj]
            basis.append(out)
    return basis
