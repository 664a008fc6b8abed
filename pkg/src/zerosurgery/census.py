"""Friend-candidate census over a knot table.

Knots (in both chiralities) are grouped by Alexander polynomial, and every
pair inside a group runs through a cascade of 0-surgery invariants ordered
by cost.  A pair is DISTINGUISHED as soon as one invariant differs and
UNDETERMINED if all of them agree; the census never claims two knots are
friends.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .diagram import DiagramError, KnotDiagram, KnotRecord, realize
from .groups import zero_surgery_presentation
from .invariants import ClassicalInvariants, LaurentPolynomial, classical_invariants
from .lowindex import Fingerprint, fingerprint

DISTINGUISHED = "DISTINGUISHED"
UNDETERMINED = "UNDETERMINED"
POSSIBLE = "POSSIBLE"
EXCLUDED = "EXCLUDED"

# metadata columns compared by the cascade when both knots carry them
DEFAULT_ANNOTATIONS = ("genus", "fibered", "floer")


@dataclass(frozen=True)
class CascadeConfig:
    max_index: int = 7
    core_cap: int = 720
    max_cosets: int | None = None  # re-verify subgroups by coset enumeration
    annotations: tuple[str, ...] = DEFAULT_ANNOTATIONS

    def __post_init__(self) -> None:
        if self.max_index < 1 or self.core_cap < 1:
            raise ValueError("index bound and core cap must be positive")
        if self.max_cosets is not None and self.max_cosets < 1:
            raise ValueError("coset budget must be positive")

    def to_json(self) -> dict:
        return {"maxIndex": self.max_index, "coreCap": self.core_cap,
                "maxCosets": self.max_cosets, "annotations": list(self.annotations)}


@dataclass(frozen=True)
class Member:
    record: KnotRecord
    chirality: int  # +1 as tabulated, -1 for the mirror image

    @property
    def label(self) -> str:
        return self.record.name if self.chirality > 0 else f"-{self.record.name}"

    def sort_key(self) -> tuple[str, int]:
        return (self.record.name, -self.chirality)


@dataclass
class Knot:
    """A realized record with its classical invariants (tabulated chirality)."""
    record: KnotRecord
    diagram: KnotDiagram
    invariants: ClassicalInvariants
    _fingerprint: Fingerprint | None = field(default=None, repr=False)

    def fingerprint(self, k: int, cfg: CascadeConfig) -> Fingerprint:
        # mirror images have isomorphic 0-surgery groups, so one cache serves both
        fp = self._fingerprint
        if fp is None or fp.max_index < k:
            p = zero_surgery_presentation(self.diagram)
            fp = fingerprint(p, k, cfg.core_cap, cfg.max_cosets)
            self._fingerprint = fp
        return fp.restrict(k)


def prepare(record: KnotRecord) -> Knot:
    d = realize(record.dt)
    return Knot(record, d, classical_invariants(d))


@dataclass(frozen=True)
class CandidateGroup:
    alexander: LaurentPolynomial
    members: tuple[Member, ...]

    @property
    def records(self) -> list[str]:
        return sorted({m.record.name for m in self.members})

    @property
    def singleton(self) -> bool:
        """No second knot shares the polynomial, so no friend is in the table."""
        return len(self.records) == 1

    def to_json(self) -> dict:
        return {"alexander": str(self.alexander),
                "members": [m.label for m in self.members],
                "singleton": self.singleton}


@dataclass(frozen=True)
class Certificate:
    stage: str
    values: tuple[Any, Any]

    def to_json(self) -> dict:
        return {"stage": self.stage, "values": list(self.values)}


@dataclass(frozen=True)
class PairVerdict:
    a: Member
    b: Member
    status: str
    certificate: Certificate | None = None
    checked: tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self) -> None:
        if (self.status == DISTINGUISHED) != (self.certificate is not None):
            raise ValueError("a pair is DISTINGUISHED exactly when it has a certificate")

    @property
    def mirror_pair(self) -> bool:
        return self.a.record.name == self.b.record.name

    def to_json(self) -> dict:
        out = {"pair": [self.a.label, self.b.label], "status": self.status,
               "mirrorPair": self.mirror_pair,
               "certificate": None if self.certificate is None else self.certificate.to_json(),
               "checked": list(self.checked)}
        if self.note:
            out["note"] = self.note
        return out


def group_by_alexander(table: Iterable[KnotRecord | Knot]) -> list[CandidateGroup]:
    """Partition (record, chirality) pairs by canonical Alexander polynomial."""
    buckets: dict[LaurentPolynomial, list[Member]] = {}
    for item in table:
        knot = item if isinstance(item, Knot) else _prepare_named(item)
        key = knot.invariants.alexander
        for chirality in (1, -1):
            buckets.setdefault(key, []).append(Member(knot.record, chirality))
    groups = [CandidateGroup(k, tuple(sorted(v, key=Member.sort_key)))
              for k, v in buckets.items()]
    groups.sort(key=lambda g: (g.records, g.alexander.min_exp, g.alexander.coeffs))
    return groups


def _prepare_named(record: KnotRecord) -> Knot:
    try:
        return prepare(record)
    except DiagramError as exc:
        raise type(exc)(f"{record.name}: {exc}") from exc


def mirror_friend_filter(r: KnotRecord | Knot) -> str:
    """K and its mirror can only be friends when the signature vanishes."""
    knot = r if isinstance(r, Knot) else _prepare_named(r)
    return POSSIBLE if knot.invariants.signature == 0 else EXCLUDED


def _signature(knot: Knot, chirality: int) -> int:
    return chirality * knot.invariants.signature


def distinguish_pair(a: tuple[Knot, int], b: tuple[Knot, int],
                     cfg: CascadeConfig = CascadeConfig()) -> PairVerdict:
    """Run the invariant cascade on two (knot, chirality) pairs."""
    (ka, ca), (kb, cb) = a, b
    ma, mb = Member(ka.record, ca), Member(kb.record, cb)
    if ka.record == kb.record and ca == cb:
        return PairVerdict(ma, mb, UNDETERMINED)
    checked: list[str] = []

    def differs(stage: str, va, vb) -> PairVerdict | None:
        if va != vb:
            return PairVerdict(ma, mb, DISTINGUISHED, Certificate(stage, (va, vb)), tuple(checked))
        checked.append(stage)
        return None

    ia, ib = ka.invariants, kb.invariants
    stages = [
        ("alexander", str(ia.alexander), str(ib.alexander)),
        ("signature", _signature(ka, ca), _signature(kb, cb)),
        ("determinant", ia.determinant, ib.determinant),
        ("arf", ia.arf, ib.arf),
    ]
    for col in cfg.annotations:
        va, vb = ka.record.metadata.get(col), kb.record.metadata.get(col)
        if va and vb:
            stages.append((f"annotation:{col}", va.strip(), vb.strip()))
    for stage, va, vb in stages:
        v = differs(stage, va, vb)
        if v is not None:
            return v
    if ka.record == kb.record:
        # K(0) and (-K)(0) are the same manifold up to orientation
        return PairVerdict(ma, mb, UNDETERMINED, None, tuple(checked),
                           "mirror images have isomorphic 0-surgery groups")
    for k in range(2, cfg.max_index + 1):
        try:
            fa, fb = ka.fingerprint(k, cfg), kb.fingerprint(k, cfg)
        except RuntimeError as exc:  # a coset budget ran out: stop, claim nothing
            return PairVerdict(ma, mb, UNDETERMINED, None, tuple(checked),
                               f"fingerprint at index {k} unavailable: {exc}")
        v = differs(f"fingerprint:{k}", fa.to_json(), fb.to_json())
        if v is not None:
            return v
    return PairVerdict(ma, mb, UNDETERMINED, None, tuple(checked))


def candidate_pairs(group: CandidateGroup) -> list[tuple[Member, Member]]:
    """Pairs up to simultaneous mirroring: (K, K'), (K, -K') and (K, -K)."""
    names = group.records
    byname = {m.record.name: m.record for m in group.members}
    pairs = []
    for x in names:
        pairs.append((Member(byname[x], 1), Member(byname[x], -1)))
    for x, y in itertools.combinations(names, 2):
        pairs.append((Member(byname[x], 1), Member(byname[y], 1)))
        pairs.append((Member(byname[x], 1), Member(byname[y], -1)))
    return pairs


def _run_group(job: tuple[list[Knot], CascadeConfig]) -> list[PairVerdict]:
    knots, cfg = job
    by_name = {k.record.name: k for k in knots}
    group = CandidateGroup(knots[0].invariants.alexander,
                           tuple(Member(k.record, c) for k in knots for c in (1, -1)))
    out = []
    for ma, mb in candidate_pairs(group):
        out.append(distinguish_pair((by_name[ma.record.name], ma.chirality),
                                    (by_name[mb.record.name], mb.chirality), cfg))
    return out


@dataclass
class CensusReport:
    config: CascadeConfig
    groups: list[CandidateGroup]
    pairs: list[PairVerdict]
    errors: list[dict]
    mirror_filter: dict[str, str] = field(default_factory=dict)  # K vs -K by signature

    @property
    def undetermined(self) -> list[PairVerdict]:
        return [p for p in self.pairs if p.status == UNDETERMINED]

    def undetermined_non_mirror(self) -> list[tuple[str, str]]:
        return [(p.a.label, p.b.label) for p in self.undetermined if not p.mirror_pair]

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "groups": [{**g.to_json(),
                        "mirrorFilter": {n: self.mirror_filter[n] for n in g.records
                                         if n in self.mirror_filter}}
                       for g in self.groups],
            "pairs": [p.to_json() for p in self.pairs],
            "summary": {
                "records": sum(len(g.records) for g in self.groups),
                "groups": len(self.groups),
                "pairs": len(self.pairs),
                "distinguished": sum(p.status == DISTINGUISHED for p in self.pairs),
                "undetermined": len(self.undetermined),
                "undeterminedNonMirror": [list(x) for x in self.undetermined_non_mirror()],
            },
            "errors": self.errors,
        }


def run_census(table: Sequence[KnotRecord], cfg: CascadeConfig = CascadeConfig(),
               workers: int = 1, read_errors: Sequence[dict] = ()) -> CensusReport:
    """Process every pair inside each non-singleton group; bad records are reported, not fatal.

    A singleton group has no friend candidate in the table; whether K and -K
    could still be friends is recorded as the group's signature filter.

    ``read_errors`` carries rows already rejected while reading the table.
    """
    knots: list[Knot] = []
    errors: list[dict] = list(read_errors)
    seen: set[str] = set()
    for r in table:
        if r.name in seen:
            errors.append({"record": r.name, "error": "DuplicateName",
                           "message": "record name appears more than once"})
            continue
        seen.add(r.name)
        try:
            knots.append(prepare(r))
        except (DiagramError, ValueError, ArithmeticError) as exc:
            errors.append({"record": r.name, "error": type(exc).__name__, "message": str(exc)})
    groups = group_by_alexander(knots)
    by_name = {k.record.name: k for k in knots}
    jobs = [([by_name[n] for n in g.records], cfg) for g in groups if not g.singleton]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_group, jobs))
    else:
        results = [_run_group(j) for j in jobs]
    pairs = sorted((p for res in results for p in res),
                   key=lambda p: (p.a.sort_key(), p.b.sort_key()))
    errors.sort(key=lambda e: (e["record"], e["error"]))
    filters = {k.record.name: mirror_friend_filter(k) for k in knots}
    return CensusReport(cfg, groups, pairs, errors, filters)
