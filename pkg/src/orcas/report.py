"""Assessment orchestration and report emission.

:func:`run_assessment` executes the pipeline on a validated bundle:
causality resolution, per-class rate estimation, matrix combination,
evidence scoring, and the confidence gate. The resulting report is a
pure function of the bundle; running it twice yields byte-identical
JSON. Reports emit as canonical JSON (sorted keys, shortest round-trip
floats), a plain-text summary, or SVG growth-curve plots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ._version import __version__
from .bundle import AssessmentBundle
from .causality import merge_causality, uniform_causality
from .domain import MODE_ORDER, DefectClass, ModeFamily, total_effort
from .errors import MissingCausalityRowError, OrcasError, StageError
from .evidence import (
    CoverageStatus,
    EvidenceSummary,
    assessment_confidence,
    score_rtm,
    score_tca,
    slot_name,
)
from .growth import (
    ClassRates,
    RateMethod,
    SrgmFit,
    bounded_class_rates,
    fit_srgm,
    srgm_class_rates,
    windowed_srgm_stability,
)
from .quantify import ModeProbabilities, combine

SCHEMA_VERSION = 1

REPORT_FORMATS = ("json", "text", "svg-plots")


@dataclass(frozen=True)
class AssessmentReport:
    """Everything the pipeline computed, plus provenance.

    Every number here is recomputable from the bundle; nothing is
    time-stamped or environment-dependent.
    """

    mode_probabilities: ModeProbabilities
    class_rates: ClassRates
    evidence: EvidenceSummary
    mode_family: ModeFamily
    gaps: dict
    growth: dict | None
    annotations: tuple[str, ...]
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "mode_family": self.mode_family.value,
            "modes": self.mode_probabilities.to_dict(),
            "rates": self.class_rates.to_dict(),
            "evidence": self.evidence.to_dict(),
            "gaps": self.gaps,
            "growth": self.growth,
            "annotations": list(self.annotations),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AssessmentReport":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise OrcasError(f"unsupported report schema_version {version!r} (expected {SCHEMA_VERSION})")
        return cls(
            mode_probabilities=ModeProbabilities.from_dict(data["modes"]),
            class_rates=ClassRates.from_dict(data["rates"]),
            evidence=EvidenceSummary.from_dict(data["evidence"]),
            mode_family=ModeFamily(data["mode_family"]),
            gaps=data["gaps"],
            growth=data.get("growth"),
            annotations=tuple(data["annotations"]),
            provenance=data["provenance"],
        )


def canonical_json_bytes(data) -> bytes:
    """Canonical JSON: sorted keys, two-space indent, UTF-8, trailing
    newline. Identical input always yields identical bytes."""
    return (json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


def _stage(name: str):
    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, OrcasError) and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False

    return _StageContext()


def _estimate_rates(bundle: AssessmentBundle) -> tuple[ClassRates, dict | None]:
    horizon = total_effort(bundle.effort)
    if bundle.rate_method is RateMethod.BOUNDED:
        return bounded_class_rates(bundle.defects, bundle.effort), None

    per_class_events: dict[DefectClass, list[float]] = {}
    for record in bundle.defects:
        per_class_events.setdefault(record.defect_class, []).append(record.detection_effort)
    fits = {}
    growth_per_class = {}
    all_stable = True
    for cls in sorted(per_class_events, key=lambda c: c.value):
        events = sorted(per_class_events[cls])
        try:
            fit = fit_srgm(events, bundle.srgm_model, horizon=horizon)
            verdict, _ = windowed_srgm_stability(
                events, bundle.srgm_model, horizon,
                bundle.stability_windows, bundle.stability_threshold,
            )
        except OrcasError as exc:
            raise OrcasError(f"class '{cls.value}': {exc}") from exc
        fits[cls] = fit
        all_stable = all_stable and verdict.stable
        growth_per_class[cls.value] = {
            "fit": fit.to_dict(),
            "events": events,
            "stability": verdict.to_dict(),
        }
    rates = srgm_class_rates(fits, horizon, bundle.effort.rate_unit)
    growth = {
        "model": bundle.srgm_model.value,
        "horizon": horizon,
        "per_class": growth_per_class,
        "all_stable": all_stable,
    }
    return rates, growth


def run_assessment(bundle: AssessmentBundle) -> AssessmentReport:
    """Run the full pipeline on a validated bundle (deterministic)."""
    annotations: list[str] = []

    with _stage("rates"):
        rates, growth = _estimate_rates(bundle)

    with _stage("causality"):
        matrix = bundle.matrix
        needed = rates.nonzero_classes()
        missing = [cls for cls in needed if not matrix.has_row(cls)]
        if missing:
            if not bundle.uniform_missing_rows:
                raise MissingCausalityRowError(missing[0])
            matrix = merge_causality(matrix, uniform_causality(missing))
            names = ", ".join(cls.value for cls in missing)
            annotations.append(
                f"WARNING: no causality data for class(es) {names}; uniform rows "
                f"(0.25 per mode) substituted on request"
            )

    with _stage("quantify"):
        modes = combine(matrix, rates, bundle.excluded_modes)

    with _stage("evidence"):
        rtm_score = score_rtm(bundle.rtm)
        tca_score = score_tca(bundle.tca)
        evidence = assessment_confidence(
            rtm_score,
            tca_score,
            bundle.structural_coverage,
            threshold=bundle.confidence_threshold,
            rtm_weight=bundle.rtm_weight,
            tca_weight=bundle.tca_weight,
        )

    zero_classes = sorted(
        (cls for cls, rate in rates.rates.items() if rate == 0.0), key=lambda c: c.value
    )
    if zero_classes:
        names = ", ".join(cls.value for cls in zero_classes)
        annotations.append(
            f"no defects observed for class(es) {names}: rate bounded at 0 by "
            f"testing effort; see confidence gate"
        )
    if growth is not None:
        annotations.append(
            "growth-model class rates are the fitted intensities at the assessment horizon"
        )
        if not growth["all_stable"]:
            annotations.append(
                "WARNING: growth-model refits exceed the stability threshold; "
                "predictions may be unreliable"
            )
    annotations.append(
        f"confidence is the weighted mean of the RTM and TCA scores "
        f"(weights {bundle.rtm_weight:g}/{bundle.tca_weight:g}); structural "
        f"coverage is reported alongside but not folded in"
    )

    gaps = {
        "untraced_requirements": [
            entry.req_id for entry in bundle.rtm if entry.status is CoverageStatus.INCOMPLETE
        ],
        "uncovered_triggers": [
            slot_name(entry.slot) for entry in bundle.tca if entry.status is CoverageStatus.INCOMPLETE
        ],
    }

    provenance = {
        "tool": {"name": "orcas", "version": __version__},
        "inputs": dict(sorted(bundle.input_digests.items())),
        "matrix": bundle.matrix.provenance,
        "options": {
            "matrix_source": bundle.matrix_source,
            "system_kind": bundle.system_kind.value,
            "rate_method": bundle.rate_method.value,
            "confidence_threshold": bundle.confidence_threshold,
            "stability_threshold": bundle.stability_threshold,
            "uniform_missing_rows": bundle.uniform_missing_rows,
        },
    }

    return AssessmentReport(
        mode_probabilities=modes,
        class_rates=rates,
        evidence=evidence,
        mode_family=bundle.mode_family,
        gaps=gaps,
        growth=growth,
        annotations=tuple(annotations),
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def emit_report(report: AssessmentReport, format: str = "json") -> bytes:
    """Serialize a report. Formats: json, text, svg-plots (alias svg)."""
    if format == "json":
        return canonical_json_bytes(report.to_dict())
    if format == "text":
        return text_report(report).encode("utf-8")
    if format in ("svg-plots", "svg"):
        return svg_report(report).encode("utf-8")
    raise OrcasError(f"unknown report format {format!r} (expected one of: {', '.join(REPORT_FORMATS)})")


def report_from_json(data: bytes | str) -> AssessmentReport:
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise OrcasError(f"invalid report JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(parsed, dict):
        raise OrcasError("invalid report JSON: expected an object")
    try:
        return AssessmentReport.from_dict(parsed)
    except (KeyError, ValueError) as exc:
        raise OrcasError(f"invalid report JSON: {exc}") from exc


def _fmt_rate(value: float) -> str:
    # 4 significant figures, matching the text-table presentation.
    return "0" if value == 0.0 else f"{value:.3E}"


def text_report(report: AssessmentReport) -> str:
    """Human-readable summary centered on the mode/class rate table."""
    prefix = "UCA" if report.mode_family is ModeFamily.CONTROL else "UIF"
    modes = report.mode_probabilities
    unit = modes.unit.value
    lines: list[str] = []
    lines.append("orcas assessment report")
    lines.append("=======================")
    lines.append("")

    lines.append(f"failure-mode rates ({unit})")
    lines.append("")
    header = ["class"] + [f"{prefix}-{m.value}" for m in MODE_ORDER] + ["Total"]
    rows: list[list[str]] = []
    per_class_total = modes.per_class_total()
    for cls in modes.classes():
        row = [cls.value]
        row += [_fmt_rate(modes.per_cell[cls][m]) for m in MODE_ORDER]
        row.append(_fmt_rate(per_class_total[cls]))
        rows.append(row)
    totals = ["Total"] + [_fmt_rate(modes.per_mode[m]) for m in MODE_ORDER] + [_fmt_rate(modes.total)]
    rows.append(totals)
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines.append("  " + "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)))
    for row in rows:
        lines.append("  " + "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    if modes.excluded_modes:
        excluded = ", ".join(sorted(m.value for m in modes.excluded_modes))
        lines.append("")
        lines.append(f"  excluded modes: {excluded} (zeroed; mass not redistributed)")
    lines.append("")

    lines.append(f"class rates (method: {report.class_rates.method.value}, {unit})")
    nonzero = report.class_rates.nonzero_classes()
    for cls in nonzero:
        lines.append(f"  {cls.value.ljust(14)}{_fmt_rate(report.class_rates[cls])}")
    zero = [cls.value for cls in DefectClass if cls not in nonzero]
    if zero:
        lines.append(f"  zero rate: {', '.join(sorted(zero))}")
    lines.append("")

    ev = report.evidence
    lines.append("evidence")
    lines.append(f"  RTM score            {ev.rtm_score:.4f}")
    lines.append(f"  TCA score            {ev.tca_score:.4f}")
    lines.append(f"  structural coverage  {ev.structural_coverage:.4f}")
    lines.append(f"  confidence           {ev.confidence:.4f}  (threshold {ev.threshold:.4f})")
    lines.append(f"  gate                 {ev.gate.value}")
    lines.append("")

    untraced = report.gaps.get("untraced_requirements", [])
    uncovered = report.gaps.get("uncovered_triggers", [])
    lines.append("gaps")
    lines.append(f"  untraced requirements: {', '.join(untraced) if untraced else '(none)'}")
    lines.append(f"  uncovered triggers:    {', '.join(uncovered) if uncovered else '(none)'}")
    lines.append("")

    if report.growth is not None:
        lines.append(f"growth model: {report.growth['model']} "
                     f"(horizon {report.growth['horizon']:g}, "
                     f"{'stable' if report.growth['all_stable'] else 'UNSTABLE'})")
        for cls_name, entry in sorted(report.growth["per_class"].items()):
            fit = entry["fit"]
            params = ", ".join(f"{k}={v:.6g}" for k, v in sorted(fit["params"].items()))
            verdict = entry["stability"]
            lines.append(
                f"  {cls_name}: {params}; intensity {fit['current_intensity']:.4E}; "
                f"max refit step {verdict['max_relative_step']:.3f} "
                f"({'stable' if verdict['stable'] else 'unstable'})"
            )
        lines.append("")

    lines.append("notes")
    for note in report.annotations:
        lines.append(f"  - {note}")
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# SVG plots
# ---------------------------------------------------------------------------

_SVG_W = 640
_SVG_H = 360
_MARGIN = 48


def _svg_points(points: list[tuple[float, float]], x_max: float, y_max: float, y_offset: int) -> str:
    plot_w = _SVG_W - 2 * _MARGIN
    plot_h = _SVG_H - 2 * _MARGIN
    coords = []
    for x, y in points:
        px = _MARGIN + (x / x_max) * plot_w
        py = y_offset + _SVG_H - _MARGIN - (y / y_max) * plot_h
        coords.append(f"{px:.2f},{py:.2f}")
    return " ".join(coords)


def svg_report(report: AssessmentReport) -> str:
    """Cumulative detections vs fitted mean curves, one panel per class.

    Reports produced with bounded estimation have no fitted curves; the
    output is then a single panel stating that nothing can be plotted.
    """
    if report.growth is None or not report.growth["per_class"]:
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="80">\n'
            f'  <text x="16" y="32" font-family="monospace" font-size="13">'
            f"no growth-model fits in this report; nothing to plot</text>\n"
            f'  <text x="16" y="52" font-family="monospace" font-size="13">'
            f"(rates were estimated with the bounded method)</text>\n"
            f"</svg>\n"
        )

    horizon = float(report.growth["horizon"])
    panels: list[str] = []
    offset = 0
    for cls_name, entry in sorted(report.growth["per_class"].items()):
        fit = SrgmFit.from_dict(entry["fit"])
        events = [float(t) for t in entry["events"]]
        observed = [(0.0, 0.0)] + [(t, i + 1.0) for i, t in enumerate(events)]
        samples = 100
        curve = [
            (horizon * k / samples, fit.mean_at(horizon * k / samples)) for k in range(samples + 1)
        ]
        y_max = max(len(events), max(y for _, y in curve), 1.0) * 1.08
        params = ", ".join(f"{k}={v:.4g}" for k, v in sorted(fit.params.items()))
        flag = "" if fit.converged else " (NOT CONVERGED)"
        panels.append("\n".join([
            f'  <g transform="translate(0,0)">',
            f'    <rect x="{_MARGIN}" y="{offset + _MARGIN}" width="{_SVG_W - 2 * _MARGIN}" '
            f'height="{_SVG_H - 2 * _MARGIN}" fill="none" stroke="#888"/>',
            f'    <text x="{_MARGIN}" y="{offset + _MARGIN - 12}" font-family="monospace" '
            f'font-size="13">{cls_name}: {fit.model.value} ({params}){flag}</text>',
            f'    <polyline points="{_svg_points(observed, horizon, y_max, offset)}" '
            f'fill="none" stroke="#1a52a8" stroke-width="1.5"/>',
            f'    <polyline points="{_svg_points(curve, horizon, y_max, offset)}" '
            f'fill="none" stroke="#c03518" stroke-width="1.5" stroke-dasharray="6,3"/>',
            f'    <text x="{_MARGIN}" y="{offset + _SVG_H - _MARGIN + 16}" font-family="monospace" '
            f'font-size="11">effort 0..{horizon:g}; blue: observed cumulative; '
            f"red: fitted mean</text>",
            f"  </g>",
        ]))
        offset += _SVG_H
    body = "\n".join(panels)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{offset}">\n'
        f"{body}\n</svg>\n"
    )
