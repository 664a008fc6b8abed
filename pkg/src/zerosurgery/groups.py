"""Finitely presented groups: knot groups, 0-surgery groups, abelianization.

Words are tuples of nonzero integers: ``k`` stands for generator ``k``
(1-based) and ``-k`` for its inverse.
"""
from __future__ import annotations

import collections
import itertools
import operator
import re
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagram import KnotDiagram
from .smith import invariant_factors, smith_normal_form

Word = tuple[int, ...]


class GroupError(ValueError):
    pass


class MissingLongitude(GroupError):
    pass


def reduce_word(letters: Iterable[int]) -> Word:
    out: list[int] = []
    push, pop = out.append, out.pop
    for x in letters:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(map(operator.neg, reversed(w)))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def exponent_sums(w: Sequence[int], gens: int) -> list[int]:
    v = [0] * gens
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def _canonical_relator(w: Word) -> Word:
    """Least rotation of w or its inverse; relators equal up to this are redundant."""
    if not w:
        return w
    best = None
    for cand in (w, inverse(w)):
        first = min(cand)
        for i, x in enumerate(cand):
            if x == first:
                r = cand[i:] + cand[:i]
                if best is None or r < best:
                    best = r
    return best


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        t = tuple(int(x) for x in self.torsion)
        object.__setattr__(self, "torsion", t)
        if self.rank < 0 or any(x < 2 for x in t):
            raise GroupError(f"invalid abelian group {self.rank} {t}")
        if any(b % a for a, b in zip(t, t[1:])):
            raise GroupError(f"torsion {t} is not a divisibility chain")

    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.rank, self.torsion)

    def to_json(self) -> list:
        return [self.rank, list(self.torsion)]

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.rank
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupPresentation:
    generators: int
    relators: tuple[Word, ...]
    meridian: Word | None = None
    longitude: Word | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "relators",
                           tuple(reduce_word(r) for r in self.relators))
        for name in ("meridian", "longitude"):
            w = getattr(self, name)
            if w is not None:
                object.__setattr__(self, name, reduce_word(w))
        for w in self.words():
            if any(x == 0 or abs(x) > self.generators for x in w):
                raise GroupError(f"word {w} uses an unknown generator")
        if self.meridian is not None and self.longitude is not None:
            if not self.is_null_homologous(self.longitude):
                raise GroupError("longitude is not null-homologous")

    def words(self) -> Iterable[Word]:
        yield from self.relators
        if self.meridian is not None:
            yield self.meridian
        if self.longitude is not None:
            yield self.longitude

    def relation_matrix(self) -> list[list[int]]:
        return [exponent_sums(r, self.generators) for r in self.relators]

    def is_null_homologous(self, w: Sequence[int]) -> bool:
        """Whether w maps to zero in the abelianization."""
        v = exponent_sums(w, self.generators)
        if not any(v):
            return True
        snf = smith_normal_form(self.relation_matrix(), ncols=self.generators,
                                transforms=True)
        # v is in the row space iff v @ V lies in the row space of D
        x = [sum(v[i] * snf.right[i][j] for i in range(self.generators))
             for j in range(self.generators)]
        for j, xj in enumerate(x):
            d = snf.diagonal[j] if j < len(snf.diagonal) else 0
            if (d == 0 and xj) or (d and xj % d):
                return False
        return True

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)


def abelianization(p: GroupPresentation) -> AbelianGroup:
    rows = []
    for r in p.relators:
        row: dict[int, int] = {}
        for x in r:
            c = abs(x) - 1
            row[c] = row.get(c, 0) + (1 if x > 0 else -1)
        rows.append(row)
    rank, torsion = invariant_factors(rows, p.generators)
    return AbelianGroup(rank, tuple(torsion))


# -- text format -----------------------------------------------------------

_LETTERS = string.ascii_lowercase


def format_word(w: Sequence[int]) -> str:
    if len(_LETTERS) < max((abs(x) for x in w), default=0):
        raise GroupError("text format supports at most 26 generators")
    return "".join(_LETTERS[x - 1] if x > 0 else _LETTERS[-x - 1].upper() for x in w)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    if not re.fullmatch(r"[a-zA-Z]+", text):
        raise GroupError(f"bad word {text!r}")
    return tuple(ord(ch) - 96 if ch.islower() else -(ord(ch) - 64) for ch in text)


def format_presentation(p: GroupPresentation) -> str:
    parts = [f"gens: {p.generators}"]
    parts += [f"rel: {format_word(r) or '1'}" for r in p.relators]
    if p.meridian is not None:
        parts.append(f"mer: {format_word(p.meridian)}")
    if p.longitude is not None:
        parts.append(f"lon: {format_word(p.longitude) or '1'}")
    return "; ".join(parts)


def parse_presentation(text: str) -> GroupPresentation:
    gens = None
    rels: list[Word] = []
    mer = lon = None
    for field in text.split(";"):
        field = field.strip()
        if not field:
            continue
        key, sep, value = field.partition(":")
        if not sep:
            raise GroupError(f"bad presentation field {field!r}")
        key = key.strip().lower()
        if key == "gens":
            gens = int(value)
        elif key == "rel":
            rels.append(parse_word(value))
        elif key == "mer":
            mer = parse_word(value)
        elif key == "lon":
            lon = parse_word(value)
        else:
            raise GroupError(f"unknown presentation field {key!r}")
    if gens is None or gens < 0:
        raise GroupError("presentation needs 'gens: n'")
    return GroupPresentation(gens, tuple(rels), mer, lon)


# -- knot groups -------------------------------------------------------------

def wirtinger(d: KnotDiagram, drop_redundant: bool = False) -> GroupPresentation:
    """Wirtinger presentation with meridian and null-homologous longitude.

    Generator ``j + 1`` is the meridian of arc ``j``; arc 0 starts at the
    first undercrossing passage of the traversal.  One relator per crossing,
    unless ``drop_redundant`` removes the last one (it follows from the rest).
    """
    if d.n == 0:
        return GroupPresentation(1, (), (1,), ())
    m = 2 * d.n
    unders = [a[0] for a in d.arcs]
    arc_at = [0] * m  # arc that contains each position (arc starting there for unders)
    j = -1
    start = unders[0]
    for k in range(m):
        pos = (start + k) % m
        if not d.is_over(pos):
            j += 1
        arc_at[pos] = j
    gen = [a + 1 for a in arc_at]
    relators = []
    for x in d.crossings:
        k = gen[x.over]
        i = gen[(x.under - 1) % m]  # incoming under arc ends at the passage
        o = gen[x.under]
        if x.sign > 0:
            relators.append((k, i, -k, -o))
        else:
            relators.append((-k, i, k, -o))
    if drop_redundant and relators:
        relators = relators[:-1]
    letters = []
    for k in range(1, m + 1):
        pos = (start + k) % m
        if not d.is_over(pos):
            x = d.crossings[d.traversal[pos]]
            letters.append(gen[x.over] * x.sign)
    # passing under arc k turns x_i into x_k^e x_i x_k^-e, so the product of
    # the conjugators in reverse order centralizes the meridian
    w = sum(x.sign for x in d.crossings)
    longitude = reduce_word(letters[::-1] + [-1 if w > 0 else 1] * abs(w))
    return GroupPresentation(len(unders), tuple(relators), (1,), longitude)


def zero_surgery_group(p: GroupPresentation) -> GroupPresentation:
    if p.longitude is None:
        raise MissingLongitude("presentation has no longitude")
    rels = p.relators + ((p.longitude,) if p.longitude else ())
    return GroupPresentation(p.generators, rels, p.meridian, p.longitude)


# -- Tietze transformations ----------------------------------------------------

def _substitute(w: Sequence[int], g: int, image: Word) -> Word:
    if g not in w and -g not in w:
        return reduce_word(w)
    inv = inverse(image)
    out: list[int] = []
    push, pop = out.append, out.pop
    for x in w:
        for y in (image if x == g else inv if x == -g else (x,)):
            if out and out[-1] == -y:
                pop()
            else:
                push(y)
    return tuple(out)


def _renumber(w: Sequence[int], g: int) -> Word:
    return tuple(x - 1 if x > g else (x + 1 if x < -g else x) for x in w)


def _clean(relators: Iterable[Word]) -> list[Word]:
    seen = set()
    out = []
    for r in relators:
        r = cyclic_reduce(r)
        if not r:
            continue
        key = _canonical_relator(r)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _eliminate_once(gens: int, rels: list[Word], mer, lon):
    """Remove one generator that occurs exactly once in some relator."""
    best = None
    per_relator = [collections.Counter(map(abs, r)) for r in rels]
    total: collections.Counter[int] = collections.Counter()
    for counts in per_relator:
        total.update(counts)
    for ri, (r, counts) in enumerate(zip(rels, per_relator)):
        for g, c in counts.items():
            if c != 1:
                continue
            i = next(k for k, x in enumerate(r) if abs(x) == g)
            rest = r[i + 1:] + r[:i]
            image = inverse(rest) if r[i] > 0 else reduce_word(rest)
            # every other occurrence of g grows by len(image) - 1 letters
            growth = (len(image) - 1) * (total[g] - 1)
            key = (growth, len(r), ri, g)
            if best is None or key < best[0]:
                best = (key, ri, g, image)
    if best is None:
        return None
    _, ri, g, image = best
    new_rels = []
    for k, s in enumerate(rels):
        if k != ri:
            new_rels.append(_renumber(_substitute(s, g, image), g))
    mer = None if mer is None else _renumber(_substitute(mer, g, image), g)
    lon = None if lon is None else _renumber(_substitute(lon, g, image), g)
    return gens - 1, _clean(new_rels), mer, lon


def _shorten_once(rels: list[Word]) -> list[Word] | None:
    """Replace a long piece of one relator using another relator.

    A cyclic subword of r that is more than half of a cyclic conjugate of
    s^{+-1} is swapped for the inverse of the rest of s.  Longest pieces
    are tried first.
    """
    for si, s in sorted(enumerate(rels), key=lambda t: (len(t[1]), t[0])):
        n = len(s)
        if n == 0:
            continue
        cands = [c + c for c in (s, inverse(s))]
        for ri, r in enumerate(rels):
            if ri == si or len(r) < n // 2 + 1:
                continue
            doubled = r + r
            for length in range(min(n, len(r)), n // 2, -1):
                first: dict[Word, int] = {}
                for i in range(len(r)):
                    first.setdefault(doubled[i:i + length], i)
                for cc in cands:
                    for i in range(n):
                        pos = first.get(cc[i:i + length])
                        if pos is None:
                            continue
                        repl = inverse(cc[i + length:i + n])
                        new = cyclic_reduce(repl + doubled[pos + length:pos + len(r)])
                        if len(new) < len(r):
                            out = list(rels)
                            out[ri] = new
                            return out
    return None


def _closure_order(gens: int, rels: list[Word], seed: Sequence[int]):
    """Order in which the generators outside seed can be solved for, or None.

    A generator is solvable once some unused relator mentions it exactly
    once and mentions nothing else that is still unknown.
    """
    known = set(seed)
    used: set[int] = set()
    order = []
    progress = True
    while progress and len(known) < gens:
        progress = False
        for ri, r in enumerate(rels):
            if ri in used:
                continue
            unknown = [x for x in r if abs(x) not in known]
            if len(unknown) == 1:
                g = abs(unknown[0])
                known.add(g)
                used.add(ri)
                order.append((g, ri))
                progress = True
    return order if len(known) == gens else None


def _solve(gens: int, rels: list[Word], mer, lon, seed, order):
    """Eliminate generators along a closure order, keeping only seed generators."""
    image: dict[int, Word] = {}

    def apply(w):
        out = []
        for x in w:
            g = abs(x)
            if g in image:
                out.extend(image[g] if x > 0 else inverse(image[g]))
            else:
                out.append(x)
        return reduce_word(out)

    for g, ri in order:
        r = apply(rels[ri])
        i = next(k for k, x in enumerate(r) if abs(x) == g)
        rest = r[i + 1:] + r[:i]
        image[g] = inverse(rest) if r[i] > 0 else reduce_word(rest)
    used = {ri for _, ri in order}
    renum = {g: k + 1 for k, g in enumerate(sorted(seed))}

    def rename(w):
        return tuple(renum[x] if x > 0 else -renum[-x] for x in w)

    new_rels = _clean(rename(apply(r)) for ri, r in enumerate(rels) if ri not in used)
    mer = None if mer is None else rename(apply(mer))
    lon = None if lon is None else rename(apply(lon))
    return len(seed), new_rels, mer, lon


def _seeded_elimination(gens: int, rels: list[Word], mer, lon, max_seed: int = 3,
                        max_candidates: int = 64):
    """Eliminate down to a smallest generating seed, when one is small enough.

    For Wirtinger presentations the smallest seed has the size of the
    bridge number of the diagram, far fewer generators than greedy
    elimination tends to leave behind.
    """
    if gens <= 1 or gens > 60:
        return None
    for size in range(1, min(max_seed, gens - 1) + 1):
        best = None
        tried = 0
        for seed in itertools.combinations(range(1, gens + 1), size):
            order = _closure_order(gens, rels, seed)
            if order is None:
                continue
            out = _solve(gens, rels, mer, lon, seed, order)
            cost = sum(len(r) for r in out[1])
            if best is None or cost < best[0]:
                best = (cost, out)
            tried += 1
            if tried >= max_candidates:
                break
        if best is not None:
            return best[1]
    return None


def _nielsen_moves(gens: int):
    for x in range(1, gens + 1):
        for y in range(1, gens + 1):
            if x != y:
                for e in (y, -y):
                    yield x, (x, e)
                    yield x, (e, x)
                    yield x, (e, x, -e)


class _Letters:
    """Words as strings (a = generator 1, A = its inverse) for fast screening.

    Free reduction is confluent, so reducing with a regex gives the same
    word as reduce_word.
    """

    def __init__(self, gens: int):
        self.letters = _LETTERS[:gens]
        self.pairs = re.compile("|".join(c + c.upper() + "|" + c.upper() + c for c in self.letters))

    def encode(self, words: Iterable[Word]) -> str:
        return "|".join(format_word(w) for w in words)

    def table(self, g: int, image: Word) -> dict[int, str]:
        c = self.letters[g - 1]
        return {ord(c): format_word(image), ord(c.upper()): format_word(inverse(image))}

    def has_single(self, joined: str, table: dict[int, str]) -> bool:
        """After substitution and cyclic reduction, some generator occurs once in some word."""
        w = joined.translate(table)
        while True:
            shorter = self.pairs.sub("", w)
            if shorter == w:
                break
            w = shorter
        for part in w.split("|"):
            while len(part) >= 2 and part[0] == part[-1].swapcase():
                part = part[1:-1]
            low = part.lower()
            if any(low.count(c) == 1 for c in self.letters):
                return True
        return False


def _nielsen_elimination(gens: int, rels: list[Word], mer, lon, depth: int = 2):
    """Free-basis changes x -> xy^{+-1}, y^{+-1}x, y^{+-1}xy^{-+1} that expose an eliminable generator.

    Breadth first, so the fewest moves win; ties go to the shortest result.
    """
    if gens < 3 or gens > 4:
        return None
    text = _Letters(gens)
    moves = [(g, image, text.table(g, image)) for g, image in _nielsen_moves(gens)]
    frontier = [(rels, mer, lon)]
    seen = {(tuple(rels), mer, lon)}
    for level in range(depth):
        last = level == depth - 1
        found, nxt = None, []
        for rs, m, l in frontier:
            joined = text.encode(rs)
            for g, image, table in moves:
                if last and not text.has_single(joined, table):
                    continue  # nothing to eliminate, and no deeper level to feed
                r2 = _clean(_substitute(r, g, image) for r in rs)
                m2 = None if m is None else _substitute(m, g, image)
                l2 = None if l is None else _substitute(l, g, image)
                state = (tuple(r2), m2, l2)
                if state in seen:
                    continue
                seen.add(state)
                step = _eliminate_once(gens, r2, m2, l2)
                if step is None:
                    nxt.append((r2, m2, l2))
                    continue
                size = sum(len(r) for r in step[1])
                if found is None or size < found[0]:
                    found = (size, step)
        if found is not None:
            return found[1]
        frontier = nxt
    return None


def tietze_simplify(p: GroupPresentation, budget: int = 10_000) -> GroupPresentation:
    """Generator eliminations and length-reducing substitutions.

    The result presents the same group; meridian and longitude are carried
    along as words in the surviving generators.
    """
    gens = p.generators
    rels = _clean(p.relators)
    mer, lon = p.meridian, p.longitude
    seeded = _seeded_elimination(gens, rels, mer, lon)
    if seeded is not None:
        gens, rels, mer, lon = seeded
    steps = 0
    while steps < budget:
        steps += 1
        step = _eliminate_once(gens, rels, mer, lon)
        if step is not None:
            gens, rels, mer, lon = step
            continue
        shorter = _shorten_once(rels)
        if shorter is not None:
            rels = _clean(shorter)
            continue
        step = _nielsen_elimination(gens, rels, mer, lon)
        if step is not None:
            gens, rels, mer, lon = step
            continue
        break
    if gens == p.generators and _clean(p.relators) == rels and len(rels) == len(p.relators):
        return p
    return GroupPresentation(gens, tuple(rels), mer, lon)


def knot_group(d: KnotDiagram) -> GroupPresentation:
    return wirtinger(d)


def zero_surgery_presentation(d: KnotDiagram, simplify: bool = True) -> GroupPresentation:
    """Simplified presentation of the fundamental group of K(0)."""
    p = zero_surgery_group(wirtinger(d, drop_redundant=True))
    return tietze_simplify(p) if simplify else p
