"""Command-line front end.

Machine-readable JSON goes to stdout (or ``--out``); progress, summaries and
timing go to stderr.  Exit codes: 0 ok, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, Sequence

from .census import CascadeConfig, run_census
from .diagram import DiagramError, from_dt, read_table
from .groups import GroupError, format_presentation, format_word, zero_surgery_presentation
from .invariants import classical_invariants
from .lowindex import fingerprint
from .obstructions import EvidenceError, bundled_evidence, derive_all, read_evidence

log = logging.getLogger("zerosurgery")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    max_index: int = 7
    max_cosets: int = 10**6
    core_cap: int = 720
    workers: int = 1
    out: str | None = None
    verbosity: str = "INFO"

    def __post_init__(self) -> None:
        for name in ("max_index", "max_cosets", "core_cap", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def cascade(self) -> CascadeConfig:
        return CascadeConfig(self.max_index, self.core_cap, self.max_cosets)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zerosurgery", description="0-surgery friends toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--out", help="write JSON here instead of stdout")
        return sp

    def search_flags(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--max-index", type=_positive, default=7)
        sp.add_argument("--max-cosets", type=_positive, default=10**6)
        sp.add_argument("--core-cap", type=_positive, default=720)

    sp = add("parse", "realize a DT code as a planar diagram")
    sp.add_argument("--dt", required=True)

    sp = add("invariants", "Alexander polynomial, signature, determinant, Arf")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--dt")
    src.add_argument("--table")

    sp = add("group", "simplified presentation of the 0-surgery group")
    sp.add_argument("--dt", required=True)

    sp = add("fingerprint", "low-index subgroup fingerprint of the 0-surgery group")
    sp.add_argument("--dt", required=True)
    search_flags(sp)

    sp = add("census", "distinguish Alexander-polynomial twins in a knot table")
    sp.add_argument("--table", required=True)
    search_flags(sp)
    sp.add_argument("--workers", type=_positive, default=1)

    sp = add("traces", "trace verdicts from parity evidence")
    sp.add_argument("--evidence", help="evidence JSON (default: bundled corpus)")
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        max_index=getattr(args, "max_index", 7),
        max_cosets=getattr(args, "max_cosets", 10**6),
        core_cap=getattr(args, "core_cap", 720),
        workers=getattr(args, "workers", 1),
        out=args.out,
        verbosity=os.environ.get("ZEROSURGERY_LOG", "INFO").upper(),
    )


def cmd_parse(args: argparse.Namespace, cfg: RunConfig) -> dict:
    d = from_dt(args.dt)
    log.info("%d crossings, writhe %d", d.n, d.to_json()["writhe"])
    return d.to_json()


def cmd_invariants(args: argparse.Namespace, cfg: RunConfig) -> Any:
    if args.dt is not None:
        inv = classical_invariants(from_dt(args.dt))
        log.info("alexander %s, signature %d", inv.alexander, inv.signature)
        return inv.to_json()
    out = []
    for r in read_table(args.table):
        out.append({"name": r.name, **classical_invariants(from_dt(str(r.dt))).to_json()})
    log.info("%d records", len(out))
    return {"records": out}


def cmd_group(args: argparse.Namespace, cfg: RunConfig) -> dict:
    p = zero_surgery_presentation(from_dt(args.dt))
    log.info("%d generators, %d relators", p.generators, len(p.relators))
    return {
        "generators": p.generators,
        "relators": [format_word(r) for r in p.relators],
        "meridian": None if p.meridian is None else format_word(p.meridian),
        "longitude": None if p.longitude is None else format_word(p.longitude),
        "presentation": format_presentation(p),
    }


def cmd_fingerprint(args: argparse.Namespace, cfg: RunConfig) -> dict:
    p = zero_surgery_presentation(from_dt(args.dt))
    fp = fingerprint(p, cfg.max_index, cfg.core_cap, cfg.max_cosets)
    log.info("%d subgroup classes up to index %d", len(fp.entries), cfg.max_index)
    return fp.to_json()


def cmd_census(args: argparse.Namespace, cfg: RunConfig) -> dict:
    read_errors: list[dict] = []
    table = read_table(args.table, read_errors)
    report = run_census(table, cfg.cascade(), cfg.workers, read_errors)
    out = report.to_json()
    s = out["summary"]
    log.info("%d records in %d groups; %d pairs, %d distinguished, %d undetermined, %d errors",
             s["records"], s["groups"], s["pairs"], s["distinguished"], s["undetermined"],
             len(out["errors"]))
    for a, b in s["undeterminedNonMirror"]:
        log.info("undetermined: %s / %s", a, b)
    return out


def cmd_traces(args: argparse.Namespace, cfg: RunConfig) -> dict:
    records = bundled_evidence() if args.evidence is None else read_evidence(args.evidence)
    verdicts = derive_all(records)
    for v in verdicts:
        log.info("%s / %s: %s", v.pair[0], v.pair[1], v.level.value)
    return {"verdicts": [v.to_json() for v in verdicts]}


COMMANDS = {
    "parse": cmd_parse,
    "invariants": cmd_invariants,
    "group": cmd_group,
    "fingerprint": cmd_fingerprint,
    "census": cmd_census,
    "traces": cmd_traces,
}

DOMAIN_ERRORS = (DiagramError, GroupError, EvidenceError, ValueError, ArithmeticError,
                 RuntimeError, OSError, json.JSONDecodeError)


def _fail(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _fail("UsageError", str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    cfg = _config(args)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.setLevel(getattr(logging, cfg.verbosity, logging.INFO))
    log.propagate = False
    try:
        return _run(args, cfg)
    finally:
        log.removeHandler(handler)


def _run(args: argparse.Namespace, cfg: RunConfig) -> int:
    start = time.perf_counter()
    try:
        result = COMMANDS[args.command](args, cfg)
        text = dumps(result)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except DOMAIN_ERRORS as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_DOMAIN
    log.info("%s finished in %.2f s", args.command, time.perf_counter() - start)
    return EXIT_OK
