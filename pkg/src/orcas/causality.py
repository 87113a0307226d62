"""Conditional probabilities of failure modes given a defect class.

A :class:`CausalityMatrix` maps each defect class to a 4-vector of
probabilities over failure modes A-D. The built-in matrix carries the
reference values estimated from a 402-report corpus of labeled
open-source defects; project-specific matrices can be estimated from any
labeled corpus or loaded from file. Rows may be absent for classes with
no data: lookups on absent rows raise, they never return silent zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .domain import MODE_ORDER, DefectClass, DefectRecord, FailureMode
from .errors import MissingCausalityRowError, OrcasError

#: Printed probabilities are rounded to 3 decimals, so row sums may be off
#: by up to half a unit in the last place per entry.
ROW_SUM_TOLERANCE = 5e-4

BUILTIN_PROVENANCE = "built-in"

_MODE_INDEX = {mode: i for i, mode in enumerate(MODE_ORDER)}

# Reference matrix, stored exactly as published (3 decimals, rows
# normalized over modes A-D). There is no relationship row: the source
# corpus contained no relationship defects.
_BUILTIN_ROWS: dict[DefectClass, tuple[float, float, float, float]] = {
    DefectClass.ALGORITHM: (0.320, 0.140, 0.350, 0.190),
    DefectClass.ASSIGNMENT: (0.288, 0.667, 0.045, 0.000),
    DefectClass.CHECKING: (0.360, 0.244, 0.256, 0.140),
    DefectClass.FUNCTION: (0.389, 0.222, 0.241, 0.148),
    DefectClass.INTERFACE: (0.347, 0.533, 0.080, 0.040),
    DefectClass.TIMING: (0.190, 0.048, 0.524, 0.238),
}


@dataclass(frozen=True)
class CausalityMatrix:
    """Row-stochastic map from defect class to failure-mode probabilities.

    ``rows`` holds a 4-tuple per class, indexed by :data:`MODE_ORDER`.
    ``counts`` preserves the raw (class, mode) tallies when the matrix was
    estimated from a corpus.
    """

    rows: Mapping[DefectClass, tuple[float, float, float, float]]
    provenance: str
    counts: Mapping[DefectClass, tuple[int, int, int, int]] | None = None

    def __post_init__(self) -> None:
        rows = dict(self.rows)
        for cls, row in rows.items():
            if not isinstance(cls, DefectClass):
                raise ValueError(f"matrix keys must be DefectClass values, got {cls!r}")
            if len(row) != len(MODE_ORDER):
                raise ValueError(f"row for {cls.value} must have {len(MODE_ORDER)} entries, got {len(row)}")
            row = tuple(float(p) for p in row)
            for p in row:
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"row for {cls.value} has probability {p!r} outside [0, 1]")
            if abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
                raise ValueError(
                    f"row for {cls.value} sums to {sum(row)!r}, outside 1.0 +/- {ROW_SUM_TOLERANCE}"
                )
            rows[cls] = row
        object.__setattr__(self, "rows", rows)
        if self.counts is not None:
            counts = dict(self.counts)
            for cls, row in counts.items():
                if len(row) != len(MODE_ORDER) or any((not isinstance(c, int)) or c < 0 for c in row):
                    raise ValueError(f"counts for {cls.value} must be 4 nonnegative integers")
                counts[cls] = tuple(row)
            object.__setattr__(self, "counts", counts)

    def classes(self) -> tuple[DefectClass, ...]:
        return tuple(sorted(self.rows, key=lambda c: c.value))

    def has_row(self, defect_class: DefectClass) -> bool:
        return defect_class in self.rows

    def row(self, defect_class: DefectClass) -> tuple[float, float, float, float]:
        try:
            return self.rows[defect_class]
        except KeyError:
            raise MissingCausalityRowError(defect_class) from None

    def lookup(self, defect_class: DefectClass, mode: FailureMode) -> float:
        return self.row(defect_class)[_MODE_INDEX[mode]]

    def to_dict(self) -> dict:
        out: dict = {
            "provenance": self.provenance,
            "rows": {cls.value: list(row) for cls, row in sorted(self.rows.items(), key=lambda kv: kv[0].value)},
        }
        if self.counts is not None:
            out["counts"] = {
                cls.value: list(row) for cls, row in sorted(self.counts.items(), key=lambda kv: kv[0].value)
            }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CausalityMatrix":
        counts = data.get("counts")
        return cls(
            rows={DefectClass(k): tuple(v) for k, v in data["rows"].items()},
            provenance=data["provenance"],
            counts=None if counts is None else {DefectClass(k): tuple(v) for k, v in counts.items()},
        )


def builtin_causality() -> CausalityMatrix:
    """The built-in six-class reference matrix (no relationship row)."""
    return CausalityMatrix(rows=dict(_BUILTIN_ROWS), provenance=BUILTIN_PROVENANCE)


def estimate_causality(corpus: Sequence[DefectRecord], provenance: str | None = None) -> CausalityMatrix:
    """Estimate the matrix from a labeled corpus by per-mode counting.

    Each record contributes one count to every (class, mode) cell named by
    its observed modes; rows are then normalized per class, so multi-label
    records spread their row mass across all modes they caused. Classes
    with no records get no row.
    """
    if not corpus:
        raise OrcasError("no corpus records")
    counts: dict[DefectClass, list[int]] = {}
    for record in corpus:
        if not record.observed_modes:
            raise OrcasError(f"corpus record '{record.id}' has no observed failure modes")
        row = counts.setdefault(record.defect_class, [0, 0, 0, 0])
        for mode in record.observed_modes:
            row[_MODE_INDEX[mode]] += 1
    rows = {}
    for cls, row in counts.items():
        total = sum(row)
        rows[cls] = tuple(c / total for c in row)
    if provenance is None:
        provenance = f"corpus ({len(corpus)} records)"
    return CausalityMatrix(
        rows=rows,
        provenance=provenance,
        counts={cls: tuple(row) for cls, row in counts.items()},
    )


def merge_causality(base: CausalityMatrix, overlay: CausalityMatrix) -> CausalityMatrix:
    """Overlay rows replace base rows class-by-class."""
    rows = dict(base.rows)
    rows.update(overlay.rows)
    counts = None
    if base.counts is not None or overlay.counts is not None:
        counts = dict(base.counts or {})
        # A replaced row's counts no longer describe it; drop them unless
        # the overlay brings its own.
        for cls in overlay.rows:
            counts.pop(cls, None)
        counts.update(overlay.counts or {})
        counts = counts or None
    return CausalityMatrix(
        rows=rows,
        provenance=f"{base.provenance} + {overlay.provenance}",
        counts=counts,
    )


def uniform_causality(classes: Iterable[DefectClass]) -> CausalityMatrix:
    """Uniform (0.25 per mode) rows for the given classes.

    This is the explicit escape hatch for classes missing from a matrix;
    callers must surface a warning whenever it is used.
    """
    rows = {cls: (0.25, 0.25, 0.25, 0.25) for cls in classes}
    return CausalityMatrix(rows=rows, provenance="uniform (0.25 per mode)")
