"""Trace-equivalence verdicts for pairs of knots with the same 0-surgery.

A 0-surgery diffeomorphism between friends has a parity.  Even maps extend
to homeomorphisms of the traces (and some are known to extend smoothly);
odd maps do not.  The engine turns parity witnesses, the Arf invariant and
declared symmetry facts into the strongest conclusion they support.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .diagram import DATA


class Parity(str, Enum):
    EVEN = "EVEN"
    ODD = "ODD"


class Level(str, Enum):
    DIFFEOMORPHIC = "DIFFEOMORPHIC"
    HOMEOMORPHIC = "HOMEOMORPHIC"
    NOT_HOMEOMORPHIC = "NOT_HOMEOMORPHIC"
    UNKNOWN = "UNKNOWN"


class EvidenceError(ValueError):
    pass


class ContradictionError(ValueError):
    """The evidence supports both equivalent and non-equivalent traces."""


RBG_FAMILIES = ("L1", "L2", "L3")
ZERO_NOT_SE_FORMS = ("asymmetric-both", "sym-groups", "declared")


def rbg_parity(a: int, b: int) -> Parity:
    return Parity.EVEN if (a + b) % 2 == 0 else Parity.ODD


def annulus_parity(n1: int, n2: int) -> Parity:
    return Parity.EVEN if (n1 - n2) % 2 == 0 else Parity.ODD


@dataclass(frozen=True)
class ParityWitness:
    """One 0-surgery diffeomorphism of known parity.

    ``kind`` is ``rbg`` (parameters ``a..f`` of the link family), ``annulus``
    (presentation, ``m`` and the two twist numbers) or ``declared``.
    """
    kind: str
    family: str = ""
    params: tuple[int, ...] = ()
    declared_parity: Parity | None = None
    declared_smooth: bool = False
    note: str = ""

    def __post_init__(self) -> None:
        if self.kind == "rbg":
            if self.family not in RBG_FAMILIES or len(self.params) != 6:
                raise EvidenceError(f"RBG witness needs a family in {RBG_FAMILIES} and 6 parameters")
        elif self.kind == "annulus":
            if not self.family or len(self.params) != 3:
                raise EvidenceError("annulus witness needs a presentation and (m, n1, n2)")
        elif self.kind == "declared":
            if self.declared_parity is None:
                raise EvidenceError("declared witness needs a parity")
            if self.declared_smooth and self.declared_parity is not Parity.EVEN:
                raise EvidenceError("only an even map can extend smoothly")
        else:
            raise EvidenceError(f"unknown witness type {self.kind!r}")

    @classmethod
    def rbg(cls, family: str, a: int, b: int, c: int, d: int, e: int, f: int) -> ParityWitness:
        return cls("rbg", family, (a, b, c, d, e, f))

    @classmethod
    def annulus(cls, pres: str, m: int, n1: int, n2: int) -> ParityWitness:
        return cls("annulus", pres, (m, n1, n2))

    @classmethod
    def declared(cls, parity: Parity | str, extends_smoothly: bool = False,
                 note: str = "") -> ParityWitness:
        return cls("declared", declared_parity=Parity(parity),
                   declared_smooth=extends_smoothly, note=note)

    @property
    def parity(self) -> Parity:
        return witness_parity(self)

    @property
    def extends_smoothly(self) -> bool:
        if self.kind == "rbg":
            a, b = self.params[:2]
            return a + b == 0
        if self.kind == "annulus":
            return self.parity is Parity.EVEN
        return self.declared_smooth

    def describe(self) -> str:
        if self.kind == "rbg":
            return f"RBG {self.family}({', '.join(map(str, self.params))})"
        if self.kind == "annulus":
            m, n1, n2 = self.params
            return f"annulus {self.family}(m={m}; n={n1} vs n={n2})"
        return f"declared {self.declared_parity.value}" + (f" ({self.note})" if self.note else "")

    def to_json(self) -> dict:
        if self.kind == "rbg":
            return {"type": "rbg", "family": self.family, "params": list(self.params)}
        if self.kind == "annulus":
            m, n1, n2 = self.params
            return {"type": "annulus", "pres": self.family, "m": m, "n1": n1, "n2": n2}
        out = {"type": "declared", "parity": self.declared_parity.value,
               "extendsSmoothly": self.declared_smooth}
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ParityWitness:
        kind = obj.get("type")
        if kind == "rbg":
            w = cls.rbg(obj["family"], *[int(x) for x in obj["params"]])
        elif kind == "annulus":
            w = cls.annulus(obj["pres"], int(obj["m"]), int(obj["n1"]), int(obj["n2"]))
        elif kind == "declared":
            w = cls.declared(obj["parity"], bool(obj.get("extendsSmoothly", False)),
                             obj.get("note", ""))
        else:
            raise EvidenceError(f"unknown witness type {kind!r}")
        if kind != "declared":
            if "parity" in obj and Parity(obj["parity"]) is not w.parity:
                raise EvidenceError(f"{w.describe()} has parity {w.parity.value}, not {obj['parity']}")
            if "extendsSmoothly" in obj and bool(obj["extendsSmoothly"]) != w.extends_smoothly:
                raise EvidenceError(f"extendsSmoothly disagrees with {w.describe()}")
        return w


def witness_parity(w: ParityWitness) -> Parity:
    """Parity of a+b for RBG maps, of n1-n2 for annulus twists."""
    if w.kind == "rbg":
        return rbg_parity(w.params[0], w.params[1])
    if w.kind == "annulus":
        return annulus_parity(w.params[1], w.params[2])
    return w.declared_parity


@dataclass(frozen=True)
class EvidenceRecord:
    pair: tuple[str, str]
    arf: int | None = None
    zero_not_se: dict[str, str] = field(default_factory=dict)
    witnesses: tuple[ParityWitness, ...] = ()

    def __post_init__(self) -> None:
        if len(self.pair) != 2 or not all(self.pair):
            raise EvidenceError("evidence needs a pair of knot names")
        if self.arf not in (None, 0, 1):
            raise EvidenceError(f"arf must be 0 or 1, got {self.arf!r}")
        names = {n.lstrip("-") for n in self.pair}
        for knot, form in self.zero_not_se.items():
            if knot.lstrip("-") not in names:
                raise EvidenceError(f"{knot} is not part of the pair {self.pair}")
            if form not in ZERO_NOT_SE_FORMS:
                raise EvidenceError(f"unknown declaration form {form!r}")

    def merged(self, other: EvidenceRecord) -> EvidenceRecord:
        if set(other.pair) != set(self.pair):
            raise EvidenceError("can only merge evidence about the same pair")
        if None not in (self.arf, other.arf) and self.arf != other.arf:
            raise ContradictionError(f"conflicting Arf values for {self.pair}")
        arf = self.arf if self.arf is not None else other.arf
        return EvidenceRecord(self.pair, arf, {**self.zero_not_se, **other.zero_not_se},
                              self.witnesses + other.witnesses)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"pair": list(self.pair)}
        if self.arf is not None:
            out["arf"] = self.arf
        if self.zero_not_se:
            out["zeroNotSE"] = dict(self.zero_not_se)
        out["witnesses"] = [w.to_json() for w in self.witnesses]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> EvidenceRecord:
        try:
            pair = tuple(obj["pair"])
        except (KeyError, TypeError) as exc:
            raise EvidenceError("evidence record needs a 'pair'") from exc
        witnesses = tuple(ParityWitness.from_json(w) for w in obj.get("witnesses", []))
        arf = obj.get("arf")
        # a bare ``true`` is a declaration without a stated argument
        decl = {k: ("declared" if v is True else v)
                for k, v in dict(obj.get("zeroNotSE", {})).items() if v is not False}
        return cls(pair, None if arf is None else int(arf), decl, witnesses)


@dataclass(frozen=True)
class TraceVerdict:
    pair: tuple[str, str]
    level: Level
    justification: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"pair": list(self.pair), "level": self.level.value,
                "justification": list(self.justification)}


def derive_verdict(e: EvidenceRecord) -> TraceVerdict:
    """Strongest supported trace relation, with the rules that produced it.

    Rules, strongest first: an even map that extends smoothly gives
    diffeomorphic traces; any even map gives homeomorphic traces; so does a
    nontrivial Arf invariant.  An odd map shows the traces are not
    homeomorphic once every map is known to share its parity, which holds
    when 0 is not a symmetry-exceptional slope of one of the knots.
    """
    positive: list[str] = []
    level = Level.UNKNOWN
    for w in e.witnesses:
        if w.parity is Parity.EVEN and w.extends_smoothly:
            positive.append(f"even map extends to a trace diffeomorphism: {w.describe()}")
            level = Level.DIFFEOMORPHIC
    for w in e.witnesses:
        if w.parity is Parity.EVEN and not w.extends_smoothly:
            positive.append(f"even map extends to a trace homeomorphism: {w.describe()}")
            if level is Level.UNKNOWN:
                level = Level.HOMEOMORPHIC
    if e.arf == 1:
        positive.append("Arf invariant 1: traces are homeomorphic")
        if level is Level.UNKNOWN:
            level = Level.HOMEOMORPHIC
    negative: list[str] = []
    odd = [w for w in e.witnesses if w.parity is Parity.ODD]
    if odd and e.zero_not_se:
        knots = ", ".join(f"{k} ({v})" for k, v in sorted(e.zero_not_se.items()))
        negative = [f"0 is not symmetry-exceptional for {knots}, so all maps share one parity",
                    f"odd map: {odd[0].describe()}"]
    if positive and negative:
        raise ContradictionError(
            f"evidence for {e.pair[0]} / {e.pair[1]} proves both outcomes: "
            + "; ".join(positive + negative))
    if negative:
        return TraceVerdict(e.pair, Level.NOT_HOMEOMORPHIC, tuple(negative))
    return TraceVerdict(e.pair, level, tuple(positive))


def load_evidence(obj: Any) -> list[EvidenceRecord]:
    """Evidence records from parsed JSON: one record, a list, or {"records": [...]}."""
    if isinstance(obj, dict) and "records" in obj:
        obj = obj["records"]
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise EvidenceError("evidence must be a record or a list of records")
    return [EvidenceRecord.from_json(x) for x in obj]


def read_evidence(path: str | Path) -> list[EvidenceRecord]:
    with open(path) as fh:
        return load_evidence(json.load(fh))


def bundled_evidence() -> list[EvidenceRecord]:
    """Evidence for the known friend pairs shipped with the package."""
    return read_evidence(DATA / "evidence.json")


def derive_all(records: Iterable[EvidenceRecord]) -> list[TraceVerdict]:
    return [derive_verdict(r) for r in records]
