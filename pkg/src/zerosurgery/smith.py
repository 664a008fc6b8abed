"""Smith normal form over the integers.

Two entry points: :func:`smith_normal_form` works on a dense matrix and can
record the unimodular transforms, :func:`invariant_factors` accepts sparse
rows and first eliminates unit pivots, which keeps the large relation
matrices produced by subgroup rewriting cheap.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd
from typing import Sequence


@dataclass
class SmithForm:
    diagonal: list[int]  # nonzero invariant factors, d_i | d_{i+1}
    rows: int
    cols: int
    left: list[list[int]] | None = None  # U with U @ M @ V = D
    right: list[list[int]] | None = None


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Sequence[Sequence[int]], ncols: int | None = None,
                      transforms: bool = False) -> SmithForm:
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    U = _identity(m) if transforms else None
    V = _identity(n) if transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        if k:
            rs, rd = a[src], a[dst]
            for c in range(n):
                if rs[c]:
                    rd[c] += k * rs[c]
            if U is not None:
                us, ud = U[src], U[dst]
                for c in range(m):
                    ud[c] += k * us[c]

    def add_col(src, dst, k):  # col dst += k * col src
        if k:
            for row in a:
                if row[src]:
                    row[dst] += k * row[src]
            if V is not None:
                for row in V:
                    row[dst] += k * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # pivot: nonzero entry of least absolute value in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the whole trailing block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move a smaller remainder into the pivot position
            best = (abs(p), t, t)
            for i in range(t + 1, m):
                if a[i][t] and abs(a[i][t]) < best[0]:
                    best = (abs(a[i][t]), i, t)
            for j in range(t + 1, n):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    diag = [a[i][i] for i in range(t)]
    return SmithForm(diag, m, n, U, V)


def invariant_factors(rows: Sequence[dict[int, int]], ncols: int) -> tuple[int, list[int]]:
    """Free rank and torsion of Z^ncols modulo the span of sparse rows."""
    rows = [dict((c, v) for c, v in r.items() if v) for r in rows]
    rows = [r for r in rows if r]
    alive_cols = set(range(ncols))
    by_col: dict[int, set[int]] = {c: set() for c in alive_cols}
    for i, r in enumerate(rows):
        for c in r:
            by_col[c].add(i)
    alive_rows = set(range(len(rows)))

    # shortest rows first; entries go stale when a row changes and is re-pushed
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    while heap:
        length, i = heapq.heappop(heap)
        r = rows[i]
        if i not in alive_rows or len(r) != length:
            continue
        units = [c for c, v in r.items() if v in (1, -1)]
        if not units:
            continue
        c = min(units, key=lambda c: (len(by_col[c]), c))
        v = r[c]
        for k in sorted(by_col[c]):
            if k == i:
                continue
            rk = rows[k]
            f = rk[c] * v  # v is a unit, so v == 1/v
            for cc, vv in r.items():
                nv = rk.get(cc, 0) - f * vv
                if nv:
                    if cc not in rk:
                        by_col[cc].add(k)
                    rk[cc] = nv
                elif cc in rk:
                    del rk[cc]
                    by_col[cc].discard(k)
            if rk:
                heapq.heappush(heap, (len(rk), k))
            else:
                alive_rows.discard(k)
        for cc in r:
            by_col[cc].discard(i)
        alive_rows.discard(i)
        alive_cols.discard(c)
        del by_col[c]
    cols = sorted(alive_cols)
    index = {c: j for j, c in enumerate(cols)}
    dense = []
    for i in sorted(alive_rows):
        row = [0] * len(cols)
        for c, v in rows[i].items():
            row[index[c]] = v
        dense.append(row)
    diag = smith_normal_form(dense, ncols=len(cols)).diagonal if dense else []
    rank = len(cols) - len(diag)
    return rank, [d for d in diag if d != 1]


def is_divisibility_chain(factors: Sequence[int]) -> bool:
    return all(b % a == 0 for a, b in zip(factors, factors[1:]))


def gcd_all(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
