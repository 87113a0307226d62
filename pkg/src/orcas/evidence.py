"""Qualitative evidence scoring and the assessment-confidence gate.

Two checklists are scored on the same complete/indirect/incomplete scale
(1 / 0.5 / 0): the requirements traceability matrix (every requirement
traced to tests) and the trigger coverage assessment (every required
(test level, activity, trigger) slot exercised). Structural coverage is
an externally measured fraction reported alongside. Confidence below the
gate threshold defers the assessment to an alternate analysis method
instead of standing on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .domain import TestLevel, TriggerKind
from .errors import OrcasError


class CoverageStatus(str, Enum):
    COMPLETE = "complete"
    INDIRECT = "indirect"
    INCOMPLETE = "incomplete"


STATUS_SCORES = {
    CoverageStatus.COMPLETE: 1.0,
    CoverageStatus.INDIRECT: 0.5,
    CoverageStatus.INCOMPLETE: 0.0,
}

UNIT_TEST = "unit-test"
FUNCTION_TEST = "function-test"
SYSTEM_TEST = "system-test"

ACTIVITIES = (UNIT_TEST, FUNCTION_TEST, SYSTEM_TEST)


class GateDecision(str, Enum):
    PROCEED = "proceed"
    DEFER = "defer-to-BAHAMAS"


@dataclass(frozen=True)
class RtmEntry:
    """One requirement and how completely tests trace to it."""

    req_id: str
    description: str
    status: CoverageStatus

    def __post_init__(self) -> None:
        if not self.req_id:
            raise ValueError("req_id must be nonempty")
        if not isinstance(self.status, CoverageStatus):
            raise ValueError(f"status must be a CoverageStatus, got {self.status!r}")

    @property
    def score(self) -> float:
        return STATUS_SCORES[self.status]

    def to_dict(self) -> dict:
        return {"req_id": self.req_id, "description": self.description, "status": self.status.value}

    @classmethod
    def from_dict(cls, data: dict) -> "RtmEntry":
        return cls(
            req_id=data["req_id"],
            description=data["description"],
            status=CoverageStatus(data["status"]),
        )


@dataclass(frozen=True)
class TcaEntry:
    """One required (test level, activity, trigger) slot and its status."""

    level: TestLevel
    activity: str
    trigger: TriggerKind
    status: CoverageStatus

    def __post_init__(self) -> None:
        if not isinstance(self.level, TestLevel):
            raise ValueError(f"level must be a TestLevel, got {self.level!r}")
        if self.activity not in ACTIVITIES:
            raise ValueError(
                f"activity must be one of {', '.join(ACTIVITIES)}; got {self.activity!r}"
            )
        if not isinstance(self.trigger, TriggerKind):
            raise ValueError(f"trigger must be a TriggerKind, got {self.trigger!r}")
        if not isinstance(self.status, CoverageStatus):
            raise ValueError(f"status must be a CoverageStatus, got {self.status!r}")

    @property
    def slot(self) -> tuple[TestLevel, str, TriggerKind]:
        return (self.level, self.activity, self.trigger)

    @property
    def score(self) -> float:
        return STATUS_SCORES[self.status]

    def to_dict(self) -> dict:
        return {
            "level": self.level.value,
            "activity": self.activity,
            "trigger": self.trigger.value,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TcaEntry":
        return cls(
            level=TestLevel(data["level"]),
            activity=data["activity"],
            trigger=TriggerKind(data["trigger"]),
            status=CoverageStatus(data["status"]),
        )


@dataclass(frozen=True)
class EvidenceSummary:
    """Evidence scores, the aggregated confidence, and the gate decision."""

    rtm_score: float
    tca_score: float
    structural_coverage: float
    confidence: float
    gate: GateDecision
    threshold: float

    def to_dict(self) -> dict:
        return {
            "rtm_score": self.rtm_score,
            "tca_score": self.tca_score,
            "structural_coverage": self.structural_coverage,
            "confidence": self.confidence,
            "confidence_threshold": self.threshold,
            "gate": self.gate.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvidenceSummary":
        return cls(
            rtm_score=float(data["rtm_score"]),
            tca_score=float(data["tca_score"]),
            structural_coverage=float(data["structural_coverage"]),
            confidence=float(data["confidence"]),
            gate=GateDecision(data["gate"]),
            threshold=float(data["confidence_threshold"]),
        )


def required_tca_template() -> tuple[tuple[TestLevel, str, TriggerKind], ...]:
    """The full 15-slot trigger checklist of the three-tier testing model.

    Component testing scores one unit-test slot (simple path) and three
    function-test slots; subsystem testing adds complex path and
    interaction; system testing scores five system-test slots.
    """
    return (
        (TestLevel.COMPONENT, UNIT_TEST, TriggerKind.SIMPLE_PATH),
        (TestLevel.COMPONENT, FUNCTION_TEST, TriggerKind.COVERAGE),
        (TestLevel.COMPONENT, FUNCTION_TEST, TriggerKind.VARIATION),
        (TestLevel.COMPONENT, FUNCTION_TEST, TriggerKind.SEQUENCE),
        (TestLevel.SUBSYSTEM, UNIT_TEST, TriggerKind.SIMPLE_PATH),
        (TestLevel.SUBSYSTEM, UNIT_TEST, TriggerKind.COMPLEX_PATH),
        (TestLevel.SUBSYSTEM, FUNCTION_TEST, TriggerKind.COVERAGE),
        (TestLevel.SUBSYSTEM, FUNCTION_TEST, TriggerKind.VARIATION),
        (TestLevel.SUBSYSTEM, FUNCTION_TEST, TriggerKind.SEQUENCE),
        (TestLevel.SUBSYSTEM, FUNCTION_TEST, TriggerKind.INTERACTION),
        (TestLevel.SYSTEM, SYSTEM_TEST, TriggerKind.STARTUP_RESTART),
        (TestLevel.SYSTEM, SYSTEM_TEST, TriggerKind.RECOVERY_EXCEPTION),
        (TestLevel.SYSTEM, SYSTEM_TEST, TriggerKind.NORMAL_MODE),
        (TestLevel.SYSTEM, SYSTEM_TEST, TriggerKind.CONFIGURATION),
        (TestLevel.SYSTEM, SYSTEM_TEST, TriggerKind.WORKLOAD_STRESS),
    )


def slot_name(slot: tuple[TestLevel, str, TriggerKind]) -> str:
    level, activity, trigger = slot
    return f"{level.value}/{activity}/{trigger.value}"


def score_rtm(entries: Sequence[RtmEntry]) -> float:
    """Mean entry score over all requirements."""
    if not entries:
        raise OrcasError("cannot score an empty requirements traceability matrix")
    return math.fsum(entry.score for entry in entries) / len(entries)


def validate_tca_entries(entries: Sequence[TcaEntry]) -> None:
    """Require exactly one entry per template slot.

    A missing slot is an error, never an implicit zero: an unscored slot
    means the checklist was not finished, not that coverage is absent.
    """
    required = set(required_tca_template())
    seen: set[tuple[TestLevel, str, TriggerKind]] = set()
    for entry in entries:
        if entry.slot not in required:
            raise OrcasError(f"unexpected trigger-coverage slot: {slot_name(entry.slot)}")
        if entry.slot in seen:
            raise OrcasError(f"duplicate trigger-coverage slot: {slot_name(entry.slot)}")
        seen.add(entry.slot)
    missing = required - seen
    if missing:
        names = ", ".join(sorted(slot_name(slot) for slot in missing))
        raise OrcasError(f"trigger coverage assessment is missing slots: {names}")


def score_tca(entries: Sequence[TcaEntry]) -> float:
    """Sum of slot scores over the 15-slot template."""
    validate_tca_entries(entries)
    return math.fsum(entry.score for entry in entries) / len(required_tca_template())


def assessment_confidence(
    rtm_score: float,
    tca_score: float,
    structural_coverage: float,
    threshold: float = 0.90,
    rtm_weight: float = 0.5,
    tca_weight: float = 0.5,
) -> EvidenceSummary:
    """Aggregate evidence scores and decide the gate.

    Confidence is the weighted mean of the RTM and TCA scores (equal
    weights by default). Structural coverage is reported alongside but
    deliberately not folded into the number. The assessment defers to the
    alternate method exactly when confidence < threshold.
    """
    for name, value in (
        ("rtm_score", rtm_score),
        ("tca_score", tca_score),
        ("structural_coverage", structural_coverage),
        ("threshold", threshold),
    ):
        if not 0.0 <= value <= 1.0:
            raise OrcasError(f"{name} must be in [0, 1], got {value!r}")
    if rtm_weight < 0 or tca_weight < 0 or rtm_weight + tca_weight <= 0:
        raise OrcasError("confidence weights must be nonnegative and not both zero")
    confidence = (rtm_weight * rtm_score + tca_weight * tca_score) / (rtm_weight + tca_weight)
    gate = GateDecision.DEFER if confidence < threshold else GateDecision.PROCEED
    return EvidenceSummary(
        rtm_score=rtm_score,
        tca_score=tca_score,
        structural_coverage=structural_coverage,
        confidence=confidence,
        gate=gate,
        threshold=threshold,
    )
