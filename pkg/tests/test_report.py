import math
import random

import pytest

from orcas.bundle import load_bundle
from orcas.domain import DefectClass, FailureMode
from orcas.errors import StageError
from orcas.evidence import GateDecision
from orcas.report import (
    AssessmentReport,
    emit_report,
    report_from_json,
    run_assessment,
    text_report,
)

from conftest import nhpp_exponential_events, write_bundle


@pytest.fixture
def vcu_report(vcu_bundle_dir):
    return run_assessment(load_bundle(vcu_bundle_dir))


# ---------------------------------------------------------------------------
# Case-study pipeline
# ---------------------------------------------------------------------------


def test_vcu_totals_and_gate(vcu_report):
    modes = vcu_report.mode_probabilities
    assert float(f"{modes.total:.3e}") == 5.854e-4
    assert modes.per_mode[FailureMode.B] == 0.0
    assert abs(vcu_report.evidence.confidence - 0.7667) <= 1e-4
    assert vcu_report.evidence.gate is GateDecision.DEFER


def test_vcu_gaps(vcu_report):
    assert vcu_report.gaps["untraced_requirements"] == ["REQ-3"]
    assert vcu_report.gaps["uncovered_triggers"] == [
        "system/system-test/configuration",
        "system/system-test/workload-stress",
    ]


def test_vcu_annotations_mention_zero_classes(vcu_report):
    joined = "\n".join(vcu_report.annotations)
    assert "bounded at 0 by testing effort" in joined
    assert "relationship" in joined and "timing" in joined


def test_report_is_deterministic(vcu_bundle_dir):
    first = emit_report(run_assessment(load_bundle(vcu_bundle_dir)), "json")
    second = emit_report(run_assessment(load_bundle(vcu_bundle_dir)), "json")
    assert first == second


def test_report_json_round_trip(vcu_report):
    blob = emit_report(vcu_report, "json")
    reloaded = report_from_json(blob)
    assert reloaded.to_dict() == vcu_report.to_dict()
    assert emit_report(reloaded, "json") == blob


def test_report_provenance(vcu_report):
    prov = vcu_report.provenance
    assert prov["matrix"] == "built-in"
    assert prov["tool"]["name"] == "orcas"
    assert set(prov["inputs"]) == {
        "defects.json", "effort.json", "rtm.json", "tca.json", "config.json"}


# ---------------------------------------------------------------------------
# Text and SVG emission
# ---------------------------------------------------------------------------


def test_text_report_mode_table(vcu_report):
    text = text_report(vcu_report)
    assert "UIF-A" in text and "UIF-D" in text  # information family labels
    header_line = next(line for line in text.splitlines() if "UIF-A" in line)
    assert header_line.split() == ["class", "UIF-A", "UIF-B", "UIF-C", "UIF-D", "Total"]
    total_line = next(line for line in text.splitlines() if line.strip().startswith("Total"))
    assert "5.854E-04" in total_line
    assert "2.620E-04" in total_line
    assert "defer-to-BAHAMAS" in text
    assert "excluded modes: B" in text


def test_text_report_uses_control_labels_for_control_systems(tmp_path):
    directory = write_bundle(
        tmp_path / "b",
        defects=[{"id": "D-1", "description": "x", "class": "checking", "detection_effort": 1.0}],
    )
    report = run_assessment(load_bundle(directory))
    assert "UCA-A" in text_report(report)


def test_svg_without_fits_has_note(vcu_report):
    svg = emit_report(vcu_report, "svg-plots").decode("utf-8")
    assert svg.startswith("<svg")
    assert "no growth-model fits" in svg
    assert "polyline" not in svg


def test_emit_rejects_unknown_format(vcu_report):
    from orcas.errors import OrcasError
    with pytest.raises(OrcasError, match="format"):
        emit_report(vcu_report, "pdf")


# ---------------------------------------------------------------------------
# Escape hatch and stage errors
# ---------------------------------------------------------------------------


def relationship_bundle(tmp_path, **config_extra):
    config = {"structural_coverage": 1.0, "system_kind": "control"}
    config.update(config_extra)
    return write_bundle(
        tmp_path / "b",
        defects=[{"id": "D-1", "description": "x", "class": "relationship",
                  "detection_effort": 1.0}],
        config=config,
    )


def test_relationship_defect_fails_without_escape_hatch(tmp_path):
    bundle = load_bundle(relationship_bundle(tmp_path))
    with pytest.raises(StageError, match="no causality row: relationship"):
        run_assessment(bundle)


def test_uniform_escape_hatch_warns_and_proceeds(tmp_path):
    bundle = load_bundle(relationship_bundle(tmp_path, uniform_missing_rows=True))
    report = run_assessment(bundle)
    rate = 1.0 / 100.0
    for mode in FailureMode:
        assert report.mode_probabilities.per_cell[DefectClass.RELATIONSHIP][mode] == \
            pytest.approx(0.25 * rate)
    assert any(note.startswith("WARNING") and "uniform" in note for note in report.annotations)


def test_zero_defect_bundle_proceeds(tmp_path):
    directory = write_bundle(tmp_path / "b", defects=[])
    report = run_assessment(load_bundle(directory))
    assert report.mode_probabilities.total == 0.0
    assert report.evidence.confidence == 1.0
    assert report.evidence.gate is GateDecision.PROCEED


# ---------------------------------------------------------------------------
# Growth-model pipeline
# ---------------------------------------------------------------------------


def srgm_bundle(tmp_path):
    rng = random.Random(17)
    horizon = 300.0
    events = sorted(
        t for _ in range(4) for t in nhpp_exponential_events(50.0, 0.02, horizon, rng))
    defects = [
        {"id": f"D-{i}", "description": "synthetic", "class": "checking",
         "detection_effort": t}
        for i, t in enumerate(events)
    ]
    return write_bundle(
        tmp_path / "srgm",
        defects=defects,
        effort={"kind": "continuous", "test_count": 300, "test_duration": 1.0},
        config={
            "structural_coverage": 1.0,
            "system_kind": "control",
            "rate_method": "srgm",
            "srgm_model": "goel-okumoto",
            "stability_windows": 3,
        },
    )


def test_srgm_pipeline(tmp_path):
    report = run_assessment(load_bundle(srgm_bundle(tmp_path)))
    assert report.growth is not None
    entry = report.growth["per_class"]["checking"]
    fit = entry["fit"]
    assert fit["converged"]
    assert report.class_rates[DefectClass.CHECKING] == pytest.approx(fit["current_intensity"])
    assert entry["stability"]["series"][-1][0] == 300.0
    assert any("intensities at the assessment horizon" in note for note in report.annotations)
    # growth reports re-emit losslessly
    blob = emit_report(report, "json")
    assert report_from_json(blob).to_dict() == report.to_dict()


def test_srgm_svg_plots(tmp_path):
    report = run_assessment(load_bundle(srgm_bundle(tmp_path)))
    svg = emit_report(report, "svg-plots").decode("utf-8")
    assert svg.count("<polyline") == 2  # observed + fitted curves
    assert "checking" in svg


def test_srgm_single_event_class_fails_with_context(tmp_path):
    directory = write_bundle(
        tmp_path / "b",
        defects=[{"id": "D-1", "description": "x", "class": "checking", "detection_effort": 5.0}],
        config={"structural_coverage": 1.0, "system_kind": "control", "rate_method": "srgm"},
    )
    with pytest.raises(StageError, match="class 'checking'.*insufficient failure data"):
        run_assessment(load_bundle(directory))


def test_report_from_json_rejects_garbage():
    from orcas.errors import OrcasError
    with pytest.raises(OrcasError, match="invalid report JSON"):
        report_from_json(b"not json")
    with pytest.raises(OrcasError, match="schema_version"):
        report_from_json(b'{"schema_version": 99}')


def test_report_is_immutable(vcu_report):
    assert isinstance(vcu_report, AssessmentReport)
    with pytest.raises(AttributeError):
        vcu_report.mode_family = None


def test_total_is_finite_sum_of_modes(vcu_report):
    modes = vcu_report.mode_probabilities
    included = [modes.per_mode[m] for m in modes.per_mode if m not in modes.excluded_modes]
    assert modes.total == pytest.approx(math.fsum(included), abs=1e-18)
