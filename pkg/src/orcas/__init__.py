"""orcas: software failure-mode probability assessment.

Turns classified defect records, testing-effort logs, and coverage
evidence into per-failure-mode probabilities, growth-model predictions
with stability diagnostics, and a confidence score that gates whether
the assessment can stand on its own.
"""

from ._version import __version__
from .bundle import AssessmentBundle, defects_from_csv, load_bundle
from .causality import (
    CausalityMatrix,
    builtin_causality,
    estimate_causality,
    merge_causality,
    uniform_causality,
)
from .domain import (
    DefectClass,
    DefectRecord,
    EffortKind,
    EffortModel,
    FailureMode,
    ModeFamily,
    RateUnit,
    TestLevel,
    TriggerKind,
    total_effort,
)
from .errors import BundleError, MissingCausalityRowError, OrcasError, StageError
from .evidence import (
    CoverageStatus,
    EvidenceSummary,
    GateDecision,
    RtmEntry,
    TcaEntry,
    assessment_confidence,
    required_tca_template,
    score_rtm,
    score_tca,
)
from .growth import (
    ClassRates,
    RateMethod,
    SrgmFit,
    SrgmModel,
    StabilityVerdict,
    bounded_class_rates,
    fit_srgm,
    srgm_class_rates,
    stability,
    windowed_srgm_stability,
)
from .quantify import ModeProbabilities, SystemKind, combine, mode_applicability
from .report import AssessmentReport, emit_report, report_from_json, run_assessment

__all__ = [
    "__version__",
    "AssessmentBundle",
    "AssessmentReport",
    "BundleError",
    "CausalityMatrix",
    "ClassRates",
    "CoverageStatus",
    "DefectClass",
    "DefectRecord",
    "EffortKind",
    "EffortModel",
    "EvidenceSummary",
    "FailureMode",
    "GateDecision",
    "MissingCausalityRowError",
    "ModeFamily",
    "ModeProbabilities",
    "OrcasError",
    "RateMethod",
    "RateUnit",
    "RtmEntry",
    "SrgmFit",
    "SrgmModel",
    "StabilityVerdict",
    "StageError",
    "SystemKind",
    "TcaEntry",
    "TestLevel",
    "TriggerKind",
    "assessment_confidence",
    "bounded_class_rates",
    "builtin_causality",
    "combine",
    "defects_from_csv",
    "emit_report",
    "estimate_causality",
    "fit_srgm",
    "load_bundle",
    "merge_causality",
    "mode_applicability",
    "report_from_json",
    "required_tca_template",
    "run_assessment",
    "score_rtm",
    "score_tca",
    "srgm_class_rates",
    "stability",
    "total_effort",
    "uniform_causality",
    "windowed_srgm_stability",
]
