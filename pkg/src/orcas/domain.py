"""Core vocabularies and record types shared by every other module.

All types here are immutable after construction; instances are safe to
share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class DefectClass(str, Enum):
    """Orthogonal defect classes; a defect carries exactly one."""

    FUNCTION = "function"
    ASSIGNMENT = "assignment"
    ALGORITHM = "algorithm"
    CHECKING = "checking"
    INTERFACE = "interface"
    RELATIONSHIP = "relationship"
    TIMING = "timing"


class FailureMode(str, Enum):
    """Failure-mode categories A through D.

    The same four categories describe both unsafe control actions and
    unsafe information flows; reports attach a display-only mode family
    (control vs information) to pick the label.
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"


#: Failure modes in canonical column order.
MODE_ORDER: tuple[FailureMode, ...] = (
    FailureMode.A,
    FailureMode.B,
    FailureMode.C,
    FailureMode.D,
)


class TriggerKind(str, Enum):
    """Environmental/input condition categories that surface defects."""

    SIMPLE_PATH = "simple-path"
    COMPLEX_PATH = "complex-path"
    COVERAGE = "coverage"
    VARIATION = "variation"
    SEQUENCE = "sequence"
    INTERACTION = "interaction"
    WORKLOAD_STRESS = "workload-stress"
    RECOVERY_EXCEPTION = "recovery-exception"
    CONFIGURATION = "configuration"
    STARTUP_RESTART = "startup-restart"
    NORMAL_MODE = "normal-mode"


class TestLevel(str, Enum):
    """Tiers of the three-level testing-requirements model."""

    __test__ = False  # not a pytest class, despite the name

    COMPONENT = "component"
    SUBSYSTEM = "subsystem"
    SYSTEM = "system"


class EffortKind(str, Enum):
    ON_DEMAND = "on-demand"
    CONTINUOUS = "continuous"


class RateUnit(str, Enum):
    PER_HOUR = "per-hour"
    PER_DEMAND = "per-demand"


class ModeFamily(str, Enum):
    """Display-only label: do modes read as control actions or as
    information/feedback flows."""

    CONTROL = "control"
    INFORMATION = "information"


def _require_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class DefectRecord:
    """One classified defect.

    ``detection_effort`` is the cumulative testing effort at which the
    defect was detected, in the same unit as the project's effort model
    (hours or demands). ``observed_modes`` is empty for project defects;
    corpus records used for causality estimation must label at least one
    observed failure mode.
    """

    id: str
    description: str
    defect_class: DefectClass
    detection_effort: float
    observed_modes: frozenset[FailureMode] = frozenset()
    resolution: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("defect record id must be nonempty")
        if not isinstance(self.defect_class, DefectClass):
            raise ValueError(f"defect_class must be a DefectClass, got {self.defect_class!r}")
        effort = _require_finite(self.detection_effort, "detection_effort")
        if effort < 0:
            raise ValueError(f"detection_effort must be >= 0, got {effort!r}")
        object.__setattr__(self, "detection_effort", effort)
        modes = frozenset(self.observed_modes)
        for mode in modes:
            if not isinstance(mode, FailureMode):
                raise ValueError(f"observed_modes must contain FailureMode values, got {mode!r}")
        object.__setattr__(self, "observed_modes", modes)

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "description": self.description,
            "class": self.defect_class.value,
            "detection_effort": self.detection_effort,
            "observed_modes": sorted(m.value for m in self.observed_modes),
        }
        if self.resolution is not None:
            out["resolution"] = self.resolution
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DefectRecord":
        return cls(
            id=data["id"],
            description=data["description"],
            defect_class=DefectClass(data["class"]),
            detection_effort=float(data.get("detection_effort", 0.0)),
            observed_modes=frozenset(FailureMode(m) for m in data.get("observed_modes", [])),
            resolution=data.get("resolution"),
        )


@dataclass(frozen=True)
class EffortModel:
    """Total testing effort: a test count, plus hours per test for
    continuous-operation software.

    ``test_duration`` is required for the continuous kind and must be
    omitted for on-demand (demand counts have no duration).
    """

    kind: EffortKind
    test_count: int
    test_duration: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, EffortKind):
            raise ValueError(f"kind must be an EffortKind, got {self.kind!r}")
        if not isinstance(self.test_count, int) or isinstance(self.test_count, bool):
            raise ValueError(f"test_count must be an integer, got {self.test_count!r}")
        if self.test_count <= 0:
            raise ValueError(f"test_count must be positive, got {self.test_count}")
        if self.kind is EffortKind.CONTINUOUS:
            if self.test_duration is None:
                raise ValueError("continuous effort requires test_duration (hours per test)")
            duration = _require_finite(self.test_duration, "test_duration")
            if duration <= 0:
                raise ValueError(f"test_duration must be positive, got {duration!r}")
            object.__setattr__(self, "test_duration", duration)
        elif self.test_duration is not None:
            raise ValueError("on-demand effort takes no test_duration; remove it or use kind=continuous")

    @property
    def rate_unit(self) -> RateUnit:
        return RateUnit.PER_HOUR if self.kind is EffortKind.CONTINUOUS else RateUnit.PER_DEMAND

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value, "test_count": self.test_count}
        if self.test_duration is not None:
            out["test_duration"] = self.test_duration
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EffortModel":
        duration = data.get("test_duration")
        return cls(
            kind=EffortKind(data["kind"]),
            test_count=data["test_count"],
            test_duration=None if duration is None else float(duration),
        )


def total_effort(model: EffortModel) -> float:
    """Total testing effort: demands for on-demand, hours (count x
    duration) for continuous."""
    if model.kind is EffortKind.ON_DEMAND:
        return float(model.test_count)
    return model.test_count * model.test_duration


def count_by_class(defects: Iterable[DefectRecord]) -> dict[DefectClass, int]:
    """Number of defects per class, with zero entries for unseen classes."""
    counts = {cls: 0 for cls in DefectClass}
    for record in defects:
        counts[record.defect_class] += 1
    return counts
