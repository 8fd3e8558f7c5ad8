"""Report types shared by the checking machinery.

A ViolationReport records the worst violation of an inequality over a
probe set; max_violation <= tolerance means the check passed.  Witnesses
are stored so that re-evaluating the reported tuple in isolation
reproduces the violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .extreal import ext_to_json

__all__ = ["ViolationReport", "PropertyRecord", "SuiteReport"]


@dataclass(frozen=True)
class ViolationReport:
    """Worst violation of one inequality over a deterministic probe set."""

    max_violation: float
    witness: Optional[tuple]
    checked_count: int
    mode: str = "exhaustive"
    tolerance: float = 0.0

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_violation": ext_to_json(self.max_violation),
            "witness": self.witness,
            "checked_count": self.checked_count,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class PropertyRecord:
    """One entry of the proposition suite: a property passed, failed, or was skipped."""

    property_id: str
    passed: bool
    worst_gap: Optional[float]
    witness: Optional[tuple]
    tolerance: float
    skipped: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "property_id": self.property_id,
            "passed": self.passed,
            "worst_gap": None if self.worst_gap is None else ext_to_json(self.worst_gap),
            "witness": self.witness,
            "tolerance": self.tolerance,
            "skipped": self.skipped,
            "details": self.details,
        }


@dataclass
class SuiteReport:
    """All property records of one suite run, plus the seed that produced them."""

    seed: int
    records: List[PropertyRecord] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records if r.skipped is None)

    def to_list(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self.records]

    def render_table(self) -> str:
        lines = [f"{'property':<38} {'status':<8} {'worst gap':>14}  note"]
        for r in self.records:
            if r.skipped is not None:
                status, gap, note = "SKIP", "-", r.skipped
            else:
                status = "pass" if r.passed else "FAIL"
                gap = "-" if r.worst_gap is None else f"{r.worst_gap:.3e}"
                note = ""
            lines.append(f"{r.property_id:<38} {status:<8} {gap:>14}  {note}")
        return "\n".join(lines)
