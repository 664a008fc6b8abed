"""Coset enumeration, low-index subgroups and subgroup fingerprints.

Columns of a coset table are indexed by letters: generator ``g`` (1-based)
uses column ``2(g-1)`` and its inverse column ``2(g-1)+1``, so the inverse
column of ``x`` is ``x ^ 1``.  Undefined entries are ``-1``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .groups import AbelianGroup, GroupPresentation, Word, inverse, reduce_word
from .smith import invariant_factors

UNDEF = -1


class VerificationError(RuntimeError):
    """Coset enumeration disagrees with the low-index search."""


class BudgetExhausted(RuntimeError):
    """Coset enumeration ran out of room; the index is unknown, not infinite."""


def _col(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (letter < 0)


def _letter(col: int) -> int:
    g = col // 2 + 1
    return -g if col & 1 else g


@dataclass(frozen=True)
class CosetTable:
    generators: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    @property
    def complete(self) -> bool:
        return all(x != UNDEF for row in self.rows for x in row)

    def action(self, g: int) -> tuple[int, ...]:
        """Permutation of the cosets induced by generator g (1-based), right action."""
        col = 2 * (g - 1)
        return tuple(row[col] for row in self.rows)

    def actions(self) -> list[tuple[int, ...]]:
        return [self.action(g) for g in range(1, self.generators + 1)]

    def trace(self, word: Sequence[int], start: int = 0) -> int:
        c = start
        for x in word:
            c = self.rows[c][_col(x)]
        return c

    def to_json(self) -> dict:
        return {"generators": self.generators, "rows": [list(r) for r in self.rows]}


def _standardize(gens: int, rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    """Renumber cosets in order of first appearance scanning rows from coset 0."""
    order = [0]
    label = {0: 0}
    k = 0
    while k < len(order):
        for x in rows[order[k]]:
            if x != UNDEF and x not in label:
                label[x] = len(order)
                order.append(x)
        k += 1
    return tuple(tuple(label[x] if x != UNDEF else UNDEF for x in rows[c]) for c in order)


# -- coset enumeration ---------------------------------------------------------

class _Enumerator:
    """HLT coset enumeration with coincidence processing and lookahead."""

    def __init__(self, p: GroupPresentation, max_cosets: int) -> None:
        self.ncols = 2 * p.generators
        self.max_cosets = max_cosets
        self.rels = [tuple(_col(x) for x in r) for r in p.relators if r]
        rots: list[list[tuple[int, ...]]] = [[] for _ in range(self.ncols)]
        for r in p.relators:
            if not r:
                continue
            for w in (r, inverse(r)):
                cw = tuple(_col(x) for x in w)
                for i in range(len(cw)):
                    rot = cw[i:] + cw[:i]
                    if rot not in rots[rot[0]]:
                        rots[rot[0]].append(rot)
        self.rots = rots
        self.table: list[list[int]] = [[UNDEF] * self.ncols]
        self.parent = [0]
        self.live = 1
        self.deductions: list[tuple[int, int]] = []

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def define(self, c: int, x: int) -> None:
        if self.live >= self.max_cosets:
            self.lookahead()
            if self.live >= self.max_cosets:
                raise BudgetExhausted(f"more than {self.max_cosets} live cosets needed")
            if self.table[c][x] != UNDEF or not self.alive(c):
                return
        n = len(self.table)
        self.table.append([UNDEF] * self.ncols)
        self.parent.append(n)
        self.live += 1
        self.table[c][x] = n
        self.table[n][x ^ 1] = c
        self.deductions.append((c, x))

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []

        def merge(k: int, l: int) -> None:
            k, l = self.find(k), self.find(l)
            if k == l:
                return
            if l < k:
                k, l = l, k
            self.parent[l] = k
            self.live -= 1
            queue.append(l)

        merge(a, b)
        i = 0
        T = self.table
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(self.ncols):
                d = T[g][x]
                if d == UNDEF:
                    continue
                if T[d][x ^ 1] == g:
                    T[d][x ^ 1] = UNDEF
                mu, nu = self.find(g), self.find(d)
                if T[mu][x] != UNDEF:
                    merge(nu, T[mu][x])
                elif T[nu][x ^ 1] != UNDEF:
                    merge(mu, T[nu][x ^ 1])
                else:
                    T[mu][x] = nu
                    T[nu][x ^ 1] = mu
                    self.deductions.append((mu, x))

    def scan(self, a: int, w: Sequence[int], fill: bool) -> None:
        T = self.table
        f, b = a, a
        i, j = 0, len(w) - 1
        while True:
            while i <= j and T[f][w[i]] != UNDEF:
                f = T[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and T[b][w[j] ^ 1] != UNDEF:
                b = T[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                T[f][w[i]] = b
                T[b][w[i] ^ 1] = f
                self.deductions.append((f, w[i]))
                return
            if not fill:
                return
            self.define(f, w[i])
            if not self.alive(a):
                return
            f, b = self.find(f), self.find(b)

    def process_deductions(self) -> None:
        while self.deductions:
            c, x = self.deductions.pop()
            if not self.alive(c):
                continue
            for w in self.rots[x]:
                self.scan(c, w, fill=False)
                if not self.alive(c):
                    break
            d = self.table[c][x]
            if d != UNDEF and self.alive(d):
                for w in self.rots[x ^ 1]:
                    self.scan(d, w, fill=False)
                    if not self.alive(d):
                        break

    def lookahead(self) -> None:
        self.deductions.clear()
        for c in range(len(self.table)):
            if not self.alive(c):
                continue
            for w in self.rels:
                self.scan(c, w, fill=False)
                if not self.alive(c):
                    break
            self.process_deductions()

    def run(self, subgens: Sequence[Word]) -> CosetTable:
        for w in subgens:
            w = reduce_word(w)
            if w:
                self.scan(0, tuple(_col(x) for x in w), fill=True)
                self.process_deductions()
        c = 0
        while c < len(self.table):
            if self.alive(c):
                for w in self.rels:
                    self.scan(c, w, fill=True)
                    self.process_deductions()
                    if not self.alive(c):
                        break
                if self.alive(c):
                    for x in range(self.ncols):
                        if self.table[c][x] == UNDEF:
                            self.define(c, x)
                            self.process_deductions()
                        if not self.alive(c):
                            break
            c += 1
        live = [c for c in range(len(self.table)) if self.alive(c)]
        index = {c: i for i, c in enumerate(live)}
        rows = [[index[self.find(x)] for x in self.table[c]] for c in live]
        return CosetTable(self.ncols // 2, _standardize(self.ncols // 2, rows))


def coset_enumerate(p: GroupPresentation, subgens: Sequence[Word] = (),
                    max_cosets: int = 10**6) -> CosetTable:
    """Complete coset table of the subgroup generated by subgens."""
    if p.generators == 0:
        return CosetTable(0, ((),))
    return _Enumerator(p, max_cosets).run(subgens)


# -- low-index subgroups -------------------------------------------------------

@dataclass(frozen=True)
class SubgroupClass:
    index: int
    table: CosetTable
    core_index: int


def _rotations(p: GroupPresentation) -> list[list[tuple[int, ...]]]:
    ncols = 2 * p.generators
    rots: list[list[tuple[int, ...]]] = [[] for _ in range(ncols)]
    for r in p.relators:
        if not r:
            continue
        for w in (r, inverse(r)):
            cw = tuple(_col(x) for x in w)
            for i in range(len(cw)):
                rot = cw[i:] + cw[:i]
                if rot not in rots[rot[0]]:
                    rots[rot[0]].append(rot)
    return rots


def low_index_subgroups(p: GroupPresentation, max_index: int) -> list[SubgroupClass]:
    """One coset table per conjugacy class of subgroups of index at most max_index.

    Backtracking over standardized partial tables, pruned by Felsch-style
    relator scanning and by rejecting tables that are not the least in
    their conjugacy orbit.
    """
    if max_index < 1:
        raise ValueError("max_index must be positive")
    gens = p.generators
    ncols = 2 * gens
    if gens == 0:
        return [SubgroupClass(1, CosetTable(0, ((),)), 1)]
    rots = _rotations(p)
    T = [[UNDEF] * ncols for _ in range(max_index)]
    state = {"n": 1}
    found: list[SubgroupClass] = []

    def assign(c: int, x: int, d: int, trail: list[tuple[int, int]]) -> None:
        T[c][x] = d
        T[d][x ^ 1] = c
        trail.append((c, x))
        trail.append((d, x ^ 1))

    def deduce(queue, trail) -> bool:
        """Scan relator cycles through every new entry; False on a contradiction."""
        while queue:
            c0, x0 = queue.pop()
            for a, words in ((c0, rots[x0]), (T[c0][x0], rots[x0 ^ 1])):
                for w in words:
                    f, i, L = a, 0, len(w)
                    while i < L:
                        nf = T[f][w[i]]
                        if nf == UNDEF:
                            break
                        f = nf
                        i += 1
                    if i == L:
                        if f != a:
                            return False
                        continue
                    b, j = a, L - 1
                    while j >= i:
                        nb = T[b][w[j] ^ 1]
                        if nb == UNDEF:
                            break
                        b = nb
                        j -= 1
                    if j < i:
                        if f != b:
                            return False
                    elif j == i:
                        x = w[i]
                        if T[b][x ^ 1] != UNDEF:
                            return False
                        T[f][x] = b
                        T[b][x ^ 1] = f
                        trail.append((f, x))
                        trail.append((b, x ^ 1))
                        queue.append((f, x))
        return True

    def canonical() -> bool:
        n = state["n"]
        for base in range(1, n):
            label = {base: 0}
            order = [base]
            k = 0
            decided = False
            while k < len(order) and not decided:
                src, ref = T[order[k]], T[k]
                for x in range(ncols):
                    u, v = src[x], ref[x]
                    if u == UNDEF or v == UNDEF:
                        decided = True
                        break
                    if u not in label:
                        label[u] = len(order)
                        order.append(u)
                    u = label[u]
                    if u < v:
                        return False
                    if u > v:
                        decided = True
                        break
                k += 1
        return True

    def first_gap() -> tuple[int, int] | None:
        for c in range(state["n"]):
            row = T[c]
            for x in range(ncols):
                if row[x] == UNDEF:
                    return c, x
        return None

    def search() -> None:
        gap = first_gap()
        n = state["n"]
        if gap is None:
            rows = tuple(tuple(T[c]) for c in range(n))
            table = CosetTable(gens, rows)
            found.append(SubgroupClass(n, table, core_index_of(table)))
            return
        c, x = gap
        targets = [d for d in range(n) if T[d][x ^ 1] == UNDEF]
        if n < max_index:
            targets.append(n)
        for d in targets:
            trail: list[tuple[int, int]] = []
            if d == n:
                state["n"] = n + 1
            assign(c, x, d, trail)
            if deduce([(c, x)], trail) and canonical():
                search()
            for cc, xx in trail:
                T[cc][xx] = UNDEF
            state["n"] = n

    search()
    found.sort(key=lambda s: (s.index, s.table.rows))
    return found


def _closure(perms: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Elements of the permutation group generated by perms, in BFS order."""
    if not perms:
        return [()]
    ident = tuple(range(len(perms[0])))
    seen = {ident}
    order = [ident]
    k = 0
    while k < len(order):
        x = order[k]
        k += 1
        for g in perms:
            y = tuple(g[i] for i in x)  # x then g
            if y not in seen:
                seen.add(y)
                order.append(y)
    return order


def core_index_of(table: CosetTable) -> int:
    return len(_closure(table.actions()))


def core_index(s: SubgroupClass) -> int:
    """Index of the core, i.e. the order of the image in Sym(cosets)."""
    return core_index_of(s.table)


# -- subgroup presentations ----------------------------------------------------

def _schreier_data(table: CosetTable):
    """Spanning tree of the coset graph and the numbering of Schreier generators."""
    n, gens = table.index, table.generators
    tree: set[tuple[int, int]] = set()  # (coset, generator) edges with trivial label
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(2 * gens):
            d = table.rows[c][x]
            if not seen[d]:
                seen[d] = True
                queue.append(d)
                tree.add((c, x // 2) if x % 2 == 0 else (d, x // 2))
    label: dict[tuple[int, int], int] = {}
    for c in range(n):
        for g in range(gens):
            if (c, g) not in tree:
                label[c, g] = len(label) + 1
    return label


def _rewrite(table: CosetTable, label, word: Sequence[int], start: int) -> Word:
    out = []
    c = start
    for x in word:
        g = abs(x) - 1
        if x > 0:
            s = label.get((c, g))
            if s:
                out.append(s)
            c = table.rows[c][2 * g]
        else:
            c = table.rows[c][2 * g + 1]
            s = label.get((c, g))
            if s:
                out.append(-s)
    return reduce_word(out)


def schreier_presentation(p: GroupPresentation, table: CosetTable) -> GroupPresentation:
    """Reidemeister-Schreier presentation of the stabilizer of coset 0."""
    label = _schreier_data(table)
    rels = []
    for c in range(table.index):
        for r in p.relators:
            w = _rewrite(table, label, r, c)
            if w:
                rels.append(w)
    return GroupPresentation(len(label), tuple(rels))


def _stabilizer_abelianization(p: GroupPresentation, table: CosetTable) -> AbelianGroup:
    """Abelianized Reidemeister-Schreier, without building the words."""
    label = _schreier_data(table)
    rows = []
    for c in range(table.index):
        for r in p.relators:
            row: dict[int, int] = {}
            cc = c
            for x in r:
                g = abs(x) - 1
                if x > 0:
                    s = label.get((cc, g))
                    if s:
                        row[s - 1] = row.get(s - 1, 0) + 1
                    cc = table.rows[cc][2 * g]
                else:
                    cc = table.rows[cc][2 * g + 1]
                    s = label.get((cc, g))
                    if s:
                        row[s - 1] = row.get(s - 1, 0) - 1
            rows.append(row)
    rank, torsion = invariant_factors(rows, len(label))
    return AbelianGroup(rank, tuple(torsion))


def _regular_table(table: CosetTable) -> CosetTable:
    """Coset table of the core: the regular action of the image permutation group."""
    perms = table.actions()
    elements = _closure(perms)
    index = {e: i for i, e in enumerate(elements)}
    inv = []
    for g in perms:
        h = [0] * len(g)
        for i, j in enumerate(g):
            h[j] = i
        inv.append(tuple(h))
    rows = []
    for e in elements:
        row = []
        for g, h in zip(perms, inv):
            row.append(index[tuple(g[i] for i in e)])
            row.append(index[tuple(h[i] for i in e)])
        rows.append(tuple(row))
    return CosetTable(table.generators, tuple(rows))


# -- fingerprints --------------------------------------------------------------

SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class FingerprintEntry:
    index: int
    core_index: int
    hab: AbelianGroup
    nab: AbelianGroup | None  # None when the core was too large to abelianize

    def sort_key(self):
        nab = (1, ()) if self.nab is None else (0, self.nab.key())
        return (self.index, self.core_index, self.hab.key(), nab)

    def to_json(self) -> list:
        return [self.index, self.core_index, self.hab.to_json(),
                SKIPPED if self.nab is None else self.nab.to_json()]

    @classmethod
    def from_json(cls, obj) -> FingerprintEntry:
        idx, core, hab, nab = obj
        hab_g = AbelianGroup(hab[0], tuple(hab[1]))
        nab_g = None if nab == SKIPPED else AbelianGroup(nab[0], tuple(nab[1]))
        return cls(int(idx), int(core), hab_g, nab_g)


@dataclass(frozen=True)
class Fingerprint:
    max_index: int
    core_cap: int
    entries: tuple[FingerprintEntry, ...]

    def restrict(self, k: int) -> Fingerprint:
        """The fingerprint at a smaller index bound."""
        if k > self.max_index:
            raise ValueError(f"fingerprint only covers index <= {self.max_index}")
        return Fingerprint(k, self.core_cap, tuple(e for e in self.entries if e.index <= k))

    def to_json(self) -> dict:
        return {"maxIndex": self.max_index, "coreCap": self.core_cap,
                "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> Fingerprint:
        entries = tuple(FingerprintEntry.from_json(e) for e in obj["entries"])
        return cls(int(obj["maxIndex"]), int(obj["coreCap"]), entries)


def subgroup_invariants(p: GroupPresentation, s: SubgroupClass,
                        core_cap: int = 720) -> FingerprintEntry:
    hab = _stabilizer_abelianization(p, s.table)
    if s.core_index > core_cap:
        nab = None
    elif s.core_index == s.index:
        nab = hab  # H is normal, so it is its own core
    else:
        nab = _stabilizer_abelianization(p, _regular_table(s.table))
    return FingerprintEntry(s.index, s.core_index, hab, nab)


def fingerprint(p: GroupPresentation, max_index: int = 7, core_cap: int = 720,
                max_cosets: int | None = None) -> Fingerprint:
    """Sorted tuples ([G:H], [G:N], H^ab, N^ab) over subgroup classes of index <= max_index.

    With ``max_cosets`` set, every subgroup found is re-checked by enumerating
    its cosets from Schreier generators within that budget.
    """
    classes = low_index_subgroups(p, max_index)
    entries = []
    for s in classes:
        if max_cosets is not None:
            verify_class(p, s, max_cosets)
        entries.append(subgroup_invariants(p, s, core_cap))
    entries.sort(key=FingerprintEntry.sort_key)
    return Fingerprint(max_index, core_cap, tuple(entries))


def subgroup_generators(s: SubgroupClass) -> list[Word]:
    """Schreier generators u_c g u_d^-1 of the stabilizer of coset 0."""
    table = s.table
    label = _schreier_data(table)
    # transversal words from the BFS tree
    words: dict[int, Word] = {0: ()}
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(2 * table.generators):
            d = table.rows[c][x]
            if d not in words:
                words[d] = words[c] + (_letter(x),)
                queue.append(d)
    out = []
    for (c, g), _ in sorted(label.items(), key=lambda t: t[1]):
        d = table.rows[c][2 * g]
        out.append(reduce_word(words[c] + (g + 1,) + inverse(words[d])))
    return out


def verify_class(p: GroupPresentation, s: SubgroupClass, max_cosets: int) -> None:
    """Re-derive the index of a subgroup by coset enumeration; raises on mismatch."""
    t = coset_enumerate(p, subgroup_generators(s), max_cosets)
    if t.index != s.index:
        raise VerificationError(f"coset enumeration gives index {t.index}, expected {s.index}")
