"""Knot diagrams decoded from Dowker-Thistlethwaite codes.

Conventions used throughout the package:

* Traversal positions are 0-based.  The DT label paired with the odd
  1-based position ``2i + 1`` is the 1-based position of the second visit,
  so crossing ``i`` is visited at positions ``2i`` and ``abs(label) - 1``.
* A positive label means the strand passes *under* at its even visit, a
  negative label means it passes *over* there.
* Edge ``k`` runs from position ``k`` to position ``k + 1`` (mod ``2n``).
  The tail end of edge ``k`` is dart ``2k``, the head end is dart ``2k + 1``.
* Every crossing stores the two strands ``a`` and ``b`` (as positions) such
  that the counter-clockwise order of darts around it is
  ``in_a, in_b, out_a, out_b``.  The crossing is right-handed (sign +1)
  exactly when strand ``a`` is the over strand.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class DiagramError(ValueError):
    """Base class for invalid codes and diagrams."""


class OddLabel(DiagramError):
    pass


class DuplicateLabel(DiagramError):
    pass


class NonContiguousLabels(DiagramError):
    pass


class NonRealizable(DiagramError):
    pass


@dataclass(frozen=True)
class DtCode:
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        seen: set[int] = set()
        for x in labels:
            if x % 2:
                raise OddLabel(f"label {x} is odd")
            if x == 0:
                raise NonContiguousLabels("label 0 is not allowed")
            if abs(x) in seen:
                raise DuplicateLabel(f"label {abs(x)} appears twice")
            seen.add(abs(x))
        n = len(labels)
        if seen != set(range(2, 2 * n + 1, 2)):
            raise NonContiguousLabels(
                f"labels must be exactly 2..{2 * n}, got {sorted(seen)}")

    def __len__(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.labels)

    def mirror(self) -> DtCode:
        return DtCode(tuple(-x for x in self.labels))


_TOKEN = re.compile(r"[\s,()\[\]]+")


def parse_dt(text: str) -> DtCode:
    """Parse whitespace or comma separated signed even integers."""
    tokens = [t for t in _TOKEN.split(text.strip()) if t]
    try:
        labels = tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise DiagramError(f"not an integer sequence: {text!r}") from exc
    return DtCode(labels)


@dataclass(frozen=True)
class Crossing:
    a: int  # position of the strand listed first in the ccw order
    b: int
    over: int  # position of the over passage, either a or b

    @property
    def sign(self) -> int:
        return 1 if self.over == self.a else -1

    @property
    def under(self) -> int:
        return self.b if self.over == self.a else self.a


@dataclass(frozen=True)
class KnotDiagram:
    code: DtCode
    crossings: tuple[Crossing, ...]
    traversal: tuple[int, ...]  # crossing index met at each position
    arcs: tuple[tuple[int, int], ...] = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.crossings)

    def darts(self, c: int) -> tuple[int, int, int, int]:
        """Counter-clockwise darts ``in_a, in_b, out_a, out_b`` at crossing c."""
        x = self.crossings[c]
        m = 2 * self.n
        return (2 * ((x.a - 1) % m) + 1, 2 * ((x.b - 1) % m) + 1, 2 * x.a, 2 * x.b)

    def is_over(self, pos: int) -> bool:
        return self.crossings[self.traversal[pos]].over == pos

    def rotation(self) -> list[int]:
        """Counter-clockwise successor of every dart."""
        succ = [0] * (4 * self.n)
        for c in range(self.n):
            ds = self.darts(c)
            for i in range(4):
                succ[ds[i]] = ds[(i + 1) % 4]
        return succ

    def faces(self) -> list[list[int]]:
        """Faces as lists of darts.

        A dart ``d`` listed in a face means the face contains the corner
        between ``d`` and its counter-clockwise successor.
        """
        succ = self.rotation()
        seen = [False] * len(succ)
        out = []
        for start in range(len(succ)):
            if seen[start]:
                continue
            face = []
            d = start
            while not seen[d]:
                seen[d] = True
                face.append(d)
                # leave along the successor dart, arrive at the far end
                d = succ[d] ^ 1
            out.append(face)
        return out

    def to_json(self) -> dict:
        return {
            "dt": list(self.code.labels),
            "crossings": [
                {"a": x.a, "b": x.b, "over": x.over, "sign": x.sign}
                for x in self.crossings
            ],
            "traversal": list(self.traversal),
            "arcs": [list(a) for a in self.arcs],
            "writhe": writhe(self),
        }


def _pairs(code: DtCode) -> list[tuple[int, int]]:
    return [(2 * i, abs(x) - 1) for i, x in enumerate(code.labels)]


def _closed_faces(n: int, succ: dict[int, int]) -> int:
    """Faces whose every corner lies at an already oriented crossing."""
    seen: set[int] = set()
    closed = 0
    for s in succ:
        if s in seen:
            continue
        d = s
        while d in succ and d not in seen:
            seen.add(d)
            d = succ[d] ^ 1
        if d == s:
            closed += 1
    return closed


def find_orientations(code: DtCode) -> list[int] | None:
    """Backtracking search for crossing orientations giving a planar diagram.

    Returns one flip bit per crossing (0 keeps the odd visit as strand ``a``)
    or None when no planar embedding exists.  The first crossing is pinned
    to flip 0, which fixes the chirality of the plane.
    """
    pairs = _pairs(code)
    n = len(pairs)
    if n == 0:
        return []
    m = 2 * n
    # orient crossings in order of first appearance along the knot
    order: list[int] = []
    at = {}
    for c, (p, q) in enumerate(pairs):
        at[p] = c
        at[q] = c
    for pos in range(m):
        if at[pos] not in order:
            order.append(at[pos])
    target = n + 2
    flips = [0] * n
    succ: dict[int, int] = {}

    def place(c: int, f: int) -> tuple[int, ...]:
        p, q = pairs[c]
        a, b = (p, q) if f == 0 else (q, p)
        ds = (2 * ((a - 1) % m) + 1, 2 * ((b - 1) % m) + 1, 2 * a, 2 * b)
        for i in range(4):
            succ[ds[i]] = ds[(i + 1) % 4]
        return ds

    def search(k: int) -> bool:
        if k == n:
            return _closed_faces(n, succ) == target
        c = order[k]
        for f in ((0,) if k == 0 else (0, 1)):
            ds = place(c, f)
            remaining = n - k - 1
            if _closed_faces(n, succ) + 4 * remaining >= target:
                flips[c] = f
                if search(k + 1):
                    return True
            for d in ds:
                del succ[d]
        return False

    return flips if search(0) else None


def _build(code: DtCode, flips: list[int]) -> KnotDiagram:
    pairs = _pairs(code)
    n = len(pairs)
    crossings = []
    traversal = [0] * (2 * n)
    for c, ((p, q), f, label) in enumerate(zip(pairs, flips, code.labels)):
        a, b = (p, q) if f == 0 else (q, p)
        over = q if label < 0 else p
        crossings.append(Crossing(a, b, over))
        traversal[p] = c
        traversal[q] = c
    return KnotDiagram(code, tuple(crossings), tuple(traversal),
                       _arcs(crossings, traversal))


def _arcs(crossings, traversal) -> tuple[tuple[int, int], ...]:
    """Overstrand arcs as (start, end) undercrossing positions."""
    unders = [pos for pos, c in enumerate(traversal) if crossings[c].over != pos]
    return tuple((u, unders[(i + 1) % len(unders)]) for i, u in enumerate(unders))


def realize(code: DtCode) -> KnotDiagram:
    """Planar knot diagram for a DT code, or NonRealizable."""
    flips = find_orientations(code)
    if flips is None:
        raise NonRealizable(f"no planar embedding for DT code [{code}]")
    return _build(code, flips)


def from_dt(text: str) -> KnotDiagram:
    return realize(parse_dt(text))


def mirror(d: KnotDiagram) -> KnotDiagram:
    crossings = tuple(
        Crossing(x.a, x.b, x.under) for x in d.crossings)
    return KnotDiagram(d.code.mirror(), crossings, d.traversal,
                       _arcs(crossings, d.traversal))


def writhe(d: KnotDiagram) -> int:
    return sum(x.sign for x in d.crossings)


@dataclass(frozen=True)
class KnotRecord:
    name: str
    dt: DtCode
    metadata: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise DiagramError("knot record needs a name")


def read_table(path: str | Path, errors: list[dict] | None = None) -> list[KnotRecord]:
    """Read a ``name,dt`` CSV table.  Extra columns are kept as metadata.

    With an ``errors`` list, malformed rows are recorded there and skipped
    instead of aborting the whole read.
    """
    with open(path, newline="") as fh:
        return list(parse_table(fh, errors))


def parse_table(lines: Iterable[str], errors: list[dict] | None = None) -> Iterable[KnotRecord]:
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return
    if reader.fieldnames[:2] != ["name", "dt"]:
        raise DiagramError("knot table header must start with name,dt")
    for row in reader:
        name = (row.pop("name") or "").strip()
        try:
            dt = parse_dt(row.pop("dt") or "")
            meta = {k: v for k, v in row.items() if k and v}
            yield KnotRecord(name, dt, meta)
        except DiagramError as exc:
            if errors is None:
                raise
            errors.append({"record": name or f"line {reader.line_num}",
                           "error": type(exc).__name__, "message": str(exc)})


DATA = Path(__file__).parent / "data"


def bundled_table(name: str = "prime_knots_9") -> list[KnotRecord]:
    return read_table(DATA / f"{name}.csv")
