"""Knots with the same 0-surgery: diagrams, invariants, group fingerprints, census, trace verdicts."""
from __future__ import annotations

from .census import CascadeConfig, CensusReport, distinguish_pair, group_by_alexander, run_census
from .diagram import (DiagramError, DtCode, KnotDiagram, KnotRecord, bundled_table, from_dt,
                      mirror, parse_dt, read_table, realize, writhe)
from .groups import (AbelianGroup, GroupPresentation, abelianization, tietze_simplify, wirtinger,
                     zero_surgery_group, zero_surgery_presentation)
from .invariants import ClassicalInvariants, LaurentPolynomial, alexander, classical_invariants, signature
from .lowindex import Fingerprint, coset_enumerate, fingerprint, low_index_subgroups
from .obstructions import (EvidenceRecord, Level, Parity, ParityWitness, bundled_evidence,
                           derive_verdict, witness_parity)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup", "CascadeConfig", "CensusReport", "ClassicalInvariants", "DiagramError",
    "DtCode", "EvidenceRecord", "Fingerprint", "GroupPresentation", "KnotDiagram", "KnotRecord",
    "LaurentPolynomial", "Level", "Parity", "ParityWitness", "abelianization", "alexander",
    "bundled_evidence", "bundled_table", "classical_invariants", "coset_enumerate",
    "derive_verdict", "distinguish_pair", "fingerprint", "from_dt", "group_by_alexander",
    "low_index_subgroups", "mirror", "parse_dt", "read_table", "realize", "run_census",
    "signature", "tietze_simplify", "wirtinger", "witness_parity", "writhe",
    "zero_surgery_group", "zero_surgery_presentation",
]
