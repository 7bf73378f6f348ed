"""Quench-process type from the ring pattern."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

from .rings import Ring

ProcessLabel = Literal["trivial_to_topo", "topo_to_trivial", "topo_to_topo", "trivial_to_trivial"]


@dataclass
class ProcessClass:
    """Classification of one quench.

    ``label`` is None when the ring pattern matches no known process; the
    raw rings are kept either way.  ``initial_source`` names the ring kind the
    initial invariant was read from.
    """

    label: ProcessLabel | None
    initial_invariant: int | None = None
    final_invariant: int | None = None
    unclassifiable: bool = False
    ambiguous: bool = False
    initial_source: str | None = None
    rings: list[Ring] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def signature(self) -> tuple[str, ...]:
        return ring_signature(self.rings)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "initial_invariant": self.initial_invariant,
            "final_invariant": self.final_invariant,
            "unclassifiable": self.unclassifiable,
            "ambiguous": self.ambiguous,
            "initial_source": self.initial_source,
            "signature": list(self.signature),
            "notes": list(self.notes),
        }


def ring_signature(rings: list[Ring]) -> tuple[str, ...]:
    """Kinds with BIS / SIS-like distinction only, sorted; FSIS vs ISIS is not observable alone."""
    return tuple(sorted("BIS" if r.kind == "BIS" else "SIS" for r in rings))


def _windings(rings, kind):
    return [r.winding for r in rings if r.kind == kind]


def classify_process(rings: list[Ring]) -> ProcessClass:
    """Read the process type and invariants off classified, winding-annotated rings."""
    counts = Counter(r.kind for r in rings)
    n_bis, n_f, n_i = counts["BIS"], counts["FSIS"], counts["ISIS"]
    out = ProcessClass(None, rings=list(rings))
    out.ambiguous = any(r.ambiguous for r in rings)

    if not rings:
        out.label = "trivial_to_trivial"
        return out
    if n_bis == 1 and n_f == 1 and n_i == 0:
        out.label = "trivial_to_topo"
        out.final_invariant = _windings(rings, "BIS")[0]
    elif n_bis == 0 and n_f + n_i == 1:
        out.label = "topo_to_trivial"
        out.initial_invariant = _windings(rings, "ISIS")[0] if n_i else _windings(rings, "FSIS")[0]
        out.initial_source = "ISIS" if n_i else "FSIS"
    elif n_bis == 1 and n_f == 1 and n_i == 1:
        out.label = "topo_to_topo"
        out.final_invariant = _windings(rings, "BIS")[0]
        out.initial_invariant = _windings(rings, "ISIS")[0]
        out.initial_source = "ISIS"
    else:
        out.unclassifiable = True
        out.notes.append(f"ring pattern BIS={n_bis} FSIS={n_f} ISIS={n_i} matches no process")
        return out

    if any(not r.closed for r in rings):
        out.unclassifiable = True
        out.notes.append("a ring does not close; windings undefined")
    if any(r.winding is None for r in rings):
        out.unclassifiable = True
        out.notes.append("a winding could not be computed")
    if out.label in ("trivial_to_topo", "topo_to_topo"):
        fs = _windings(rings, "FSIS")[0]
        if fs is not None and out.final_invariant is not None and fs != out.final_invariant:
            out.notes.append(f"FSIS winding {fs} differs from BIS winding {out.final_invariant}")
    return out


@dataclass
class PairComparison:
    distinguishable: bool
    ambiguous: bool
    reason: str


def compare_processes(a: ProcessClass, b: ProcessClass) -> PairComparison:
    """Whether two processes can be told apart from their TASP ring patterns alone.

    Only what a measurement sees is compared: the BIS / SIS-like pattern and
    the windings.  Identical observations are flagged ambiguous.
    """
    if a.signature != b.signature:
        return PairComparison(True, False, f"ring patterns differ: {a.signature} vs {b.signature}")
    wa = sorted((r.kind == "BIS", r.winding if r.winding is not None else 0) for r in a.rings)
    wb = sorted((r.kind == "BIS", r.winding if r.winding is not None else 0) for r in b.rings)
    if wa != wb:
        return PairComparison(True, False, "same ring pattern, different windings")
    return PairComparison(False, True, f"identical observable pattern {a.signature}")
