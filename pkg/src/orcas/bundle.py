"""Dataset directory loading and validation.

An assessment bundle is a directory of UTF-8 JSON files:

  defects.json   array of defect records:
                 {"id", "description", "class", "detection_effort",
                  "observed_modes"?: [...], "resolution"?}
  effort.json    {"kind": "on-demand"|"continuous", "test_count",
                  "test_duration"? (continuous only, hours per test)}
  rtm.json       array of {"req_id", "description", "status"}
  tca.json       array of {"level", "activity", "trigger", "status"};
                 must cover the 15-slot template exactly
  config.json    assessment options (see _parse_config)
  matrix.json    optional causality matrix:
                 {"provenance", "rows": {class: [4 probs]}, "counts"?}
  corpus.json    optional labeled corpus, same shape as defects.json but
                 observed_modes required nonempty

Everything is parsed and cross-validated before any computation runs;
the first violation raises :class:`BundleError` naming the file, the
entry, and the reason. No partial loads.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import causality as causality_mod
from .causality import CausalityMatrix
from .domain import (
    DefectClass,
    DefectRecord,
    EffortKind,
    EffortModel,
    FailureMode,
    ModeFamily,
    TestLevel,
    TriggerKind,
    total_effort,
)
from .errors import BundleError, OrcasError
from .evidence import CoverageStatus, RtmEntry, TcaEntry, validate_tca_entries
from .growth import DEFAULT_STABILITY_THRESHOLD, RateMethod, SrgmModel
from .quantify import SystemKind, mode_applicability

REQUIRED_FILES = ("defects.json", "effort.json", "rtm.json", "tca.json", "config.json")

DEFAULT_CONFIDENCE_THRESHOLD = 0.90
DEFAULT_STABILITY_WINDOWS = 4
BUILTIN_MATRIX_SOURCE = "builtin"
CORPUS_SOURCE_PREFIX = "corpus:"


@dataclass(frozen=True)
class AssessmentBundle:
    """A fully validated dataset plus effective assessment options."""

    defects: tuple[DefectRecord, ...]
    effort: EffortModel
    rtm: tuple[RtmEntry, ...]
    tca: tuple[TcaEntry, ...]
    structural_coverage: float
    matrix: CausalityMatrix
    matrix_source: str
    system_kind: SystemKind
    excluded_modes: frozenset[FailureMode]
    mode_family: ModeFamily
    confidence_threshold: float
    stability_threshold: float
    rate_method: RateMethod
    srgm_model: SrgmModel
    stability_windows: int
    uniform_missing_rows: bool
    rtm_weight: float
    tca_weight: float
    input_digests: dict[str, str]


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _fail(file: str, where: str, reason: str) -> BundleError:
    return BundleError(f"{file}: {where}: {reason}")


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BundleError(f"{path.name}: file not found in {path.parent}") from None
    except OSError as exc:
        raise BundleError(f"{path.name}: cannot read: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(path.name, f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from exc


def _expect_object(data: Any, file: str, where: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(data, dict):
        raise _fail(file, where, f"expected a JSON object, got {type(data).__name__}")
    unknown = set(data) - allowed
    if unknown:
        raise _fail(file, where, f"unknown key(s): {', '.join(sorted(unknown))}")
    missing = required - set(data)
    if missing:
        raise _fail(file, where, f"missing key(s): {', '.join(sorted(missing))}")
    return data


def _expect_array(data: Any, file: str) -> list:
    if not isinstance(data, list):
        raise _fail(file, "top level", f"expected a JSON array, got {type(data).__name__}")
    return data


def _parse_enum(enum_cls, value: Any, file: str, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        expected = ", ".join(member.value for member in enum_cls)
        raise _fail(file, where, f"invalid value {value!r} (expected one of: {expected})") from None


def _parse_number(value: Any, file: str, where: str, lo: float | None = None, hi: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(file, where, f"expected a number, got {value!r}")
    number = float(value)
    if not math.isfinite(number):
        raise _fail(file, where, f"expected a finite number, got {value!r}")
    if lo is not None and number < lo:
        raise _fail(file, where, f"must be >= {lo}, got {value!r}")
    if hi is not None and number > hi:
        raise _fail(file, where, f"must be <= {hi}, got {value!r}")
    return number


def _parse_string(value: Any, file: str, where: str) -> str:
    if not isinstance(value, str):
        raise _fail(file, where, f"expected a string, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# File loaders
# ---------------------------------------------------------------------------

_DEFECT_KEYS = {"id", "description", "class", "detection_effort", "observed_modes", "resolution"}


def _parse_defect(obj: Any, file: str, index: int, require_modes: bool) -> DefectRecord:
    where = f"record {index}"
    data = _expect_object(obj, file, where, _DEFECT_KEYS, {"id", "description", "class"})
    record_id = _parse_string(data["id"], file, f"{where}: id")
    where = f"record '{record_id}'"
    defect_class = _parse_enum(DefectClass, data["class"], file, f"{where}: class")
    effort = _parse_number(data.get("detection_effort", 0.0), file, f"{where}: detection_effort", lo=0.0)
    raw_modes = data.get("observed_modes", [])
    if not isinstance(raw_modes, list):
        raise _fail(file, f"{where}: observed_modes", f"expected an array, got {raw_modes!r}")
    modes = frozenset(
        _parse_enum(FailureMode, m, file, f"{where}: observed_modes") for m in raw_modes
    )
    if require_modes and not modes:
        raise _fail(file, where, "corpus records must label at least one observed failure mode")
    resolution = data.get("resolution")
    if resolution is not None:
        resolution = _parse_string(resolution, file, f"{where}: resolution")
    return DefectRecord(
        id=record_id,
        description=_parse_string(data["description"], file, f"{where}: description"),
        defect_class=defect_class,
        detection_effort=effort,
        observed_modes=modes,
        resolution=resolution,
    )


def _load_defect_file(path: Path, require_modes: bool) -> tuple[DefectRecord, ...]:
    records = []
    seen_ids: set[str] = set()
    for index, obj in enumerate(_expect_array(_read_json(path), path.name)):
        record = _parse_defect(obj, path.name, index, require_modes)
        if record.id in seen_ids:
            raise _fail(path.name, f"record '{record.id}'", "duplicate id")
        seen_ids.add(record.id)
        records.append(record)
    return tuple(records)


def load_defects_file(path: Path | str) -> tuple[DefectRecord, ...]:
    return _load_defect_file(Path(path), require_modes=False)


def load_corpus_file(path: Path | str) -> tuple[DefectRecord, ...]:
    path = Path(path)
    records = _load_defect_file(path, require_modes=True)
    if not records:
        raise _fail(path.name, "top level", "no corpus records")
    return records


def load_effort_file(path: Path | str) -> EffortModel:
    path = Path(path)
    data = _expect_object(
        _read_json(path), path.name, "top level",
        {"kind", "test_count", "test_duration"}, {"kind", "test_count"},
    )
    kind = _parse_enum(EffortKind, data["kind"], path.name, "kind")
    count = data["test_count"]
    if isinstance(count, bool) or not isinstance(count, int):
        raise _fail(path.name, "test_count", f"expected an integer, got {count!r}")
    duration = data.get("test_duration")
    if duration is not None:
        duration = _parse_number(duration, path.name, "test_duration")
    try:
        return EffortModel(kind=kind, test_count=count, test_duration=duration)
    except ValueError as exc:
        raise _fail(path.name, "top level", str(exc)) from exc


def load_rtm_file(path: Path | str) -> tuple[RtmEntry, ...]:
    path = Path(path)
    entries = []
    seen: set[str] = set()
    for index, obj in enumerate(_expect_array(_read_json(path), path.name)):
        where = f"entry {index}"
        data = _expect_object(obj, path.name, where, {"req_id", "description", "status"},
                              {"req_id", "description", "status"})
        req_id = _parse_string(data["req_id"], path.name, f"{where}: req_id")
        if req_id in seen:
            raise _fail(path.name, f"entry '{req_id}'", "duplicate req_id")
        seen.add(req_id)
        entries.append(RtmEntry(
            req_id=req_id,
            description=_parse_string(data["description"], path.name, f"{where}: description"),
            status=_parse_enum(CoverageStatus, data["status"], path.name, f"entry '{req_id}': status"),
        ))
    return tuple(entries)


def load_tca_file(path: Path | str) -> tuple[TcaEntry, ...]:
    path = Path(path)
    entries = []
    for index, obj in enumerate(_expect_array(_read_json(path), path.name)):
        where = f"entry {index}"
        data = _expect_object(obj, path.name, where, {"level", "activity", "trigger", "status"},
                              {"level", "activity", "trigger", "status"})
        try:
            entries.append(TcaEntry(
                level=_parse_enum(TestLevel, data["level"], path.name, f"{where}: level"),
                activity=_parse_string(data["activity"], path.name, f"{where}: activity"),
                trigger=_parse_enum(TriggerKind, data["trigger"], path.name, f"{where}: trigger"),
                status=_parse_enum(CoverageStatus, data["status"], path.name, f"{where}: status"),
            ))
        except ValueError as exc:
            raise _fail(path.name, where, str(exc)) from exc
    return tuple(entries)


def load_matrix_file(path: Path | str) -> CausalityMatrix:
    path = Path(path)
    data = _expect_object(_read_json(path), path.name, "top level",
                          {"provenance", "rows", "counts"}, {"provenance", "rows"})
    if not isinstance(data["rows"], dict):
        raise _fail(path.name, "rows", "expected an object mapping class to 4 probabilities")
    rows = {}
    for key, row in data["rows"].items():
        cls = _parse_enum(DefectClass, key, path.name, "rows")
        if not isinstance(row, list) or len(row) != 4:
            raise _fail(path.name, f"rows: {key}", "expected an array of 4 probabilities")
        rows[cls] = tuple(
            _parse_number(p, path.name, f"rows: {key}", lo=0.0, hi=1.0) for p in row
        )
    counts = None
    if data.get("counts") is not None:
        if not isinstance(data["counts"], dict):
            raise _fail(path.name, "counts", "expected an object mapping class to 4 integers")
        counts = {}
        for key, row in data["counts"].items():
            cls = _parse_enum(DefectClass, key, path.name, "counts")
            if (not isinstance(row, list) or len(row) != 4
                    or any(isinstance(c, bool) or not isinstance(c, int) or c < 0 for c in row)):
                raise _fail(path.name, f"counts: {key}", "expected an array of 4 nonnegative integers")
            counts[cls] = tuple(row)
    try:
        return CausalityMatrix(
            rows=rows,
            provenance=_parse_string(data["provenance"], path.name, "provenance"),
            counts=counts,
        )
    except ValueError as exc:
        raise _fail(path.name, "rows", str(exc)) from exc


def load_history_file(path: Path | str) -> tuple[list[float], float | None]:
    """Failure-history file for growth-model fitting:
    {"events": [efforts...], "horizon"?: total observed effort}."""
    path = Path(path)
    data = _expect_object(_read_json(path), path.name, "top level", {"events", "horizon"}, {"events"})
    if not isinstance(data["events"], list) or not data["events"]:
        raise _fail(path.name, "events", "expected a nonempty array of detection efforts")
    events = [_parse_number(t, path.name, f"events[{i}]", lo=0.0) for i, t in enumerate(data["events"])]
    horizon = data.get("horizon")
    if horizon is not None:
        horizon = _parse_number(horizon, path.name, "horizon", lo=0.0)
    return events, horizon


_CSV_COLUMNS = {"id", "description", "class", "detection_effort", "observed_modes", "resolution"}


def defects_from_csv(path: Path | str) -> tuple[DefectRecord, ...]:
    """Convenience converter: defect records from a headered CSV file.

    Required columns: id, description, class. Optional: detection_effort,
    observed_modes (semicolon-separated mode letters), resolution. The
    JSON bundle format stays the source of truth; this exists because
    defect logs usually start life in spreadsheets.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BundleError(f"{path.name}: file not found in {path.parent}") from None
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise _fail(path.name, "header", "empty file; expected a CSV header row")
    fields = [name.strip() for name in reader.fieldnames]
    unknown = set(fields) - _CSV_COLUMNS
    if unknown:
        raise _fail(path.name, "header", f"unknown column(s): {', '.join(sorted(unknown))}")
    missing = {"id", "description", "class"} - set(fields)
    if missing:
        raise _fail(path.name, "header", f"missing column(s): {', '.join(sorted(missing))}")
    records = []
    seen_ids: set[str] = set()
    for line, row in enumerate(reader, start=2):
        where = f"line {line}"
        entry: dict = {
            "id": (row.get("id") or "").strip(),
            "description": (row.get("description") or "").strip(),
            "class": (row.get("class") or "").strip(),
        }
        effort = (row.get("detection_effort") or "").strip()
        if effort:
            try:
                entry["detection_effort"] = float(effort)
            except ValueError:
                raise _fail(path.name, where, f"detection_effort is not a number: {effort!r}") from None
        modes = (row.get("observed_modes") or "").strip()
        if modes:
            entry["observed_modes"] = [m.strip() for m in modes.split(";") if m.strip()]
        resolution = (row.get("resolution") or "").strip()
        if resolution:
            entry["resolution"] = resolution
        record = _parse_defect(entry, path.name, line, require_modes=False)
        if record.id in seen_ids:
            raise _fail(path.name, f"record '{record.id}'", "duplicate id")
        seen_ids.add(record.id)
        records.append(record)
    return tuple(records)


# ---------------------------------------------------------------------------
# Config and bundle assembly
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "structural_coverage",
    "system_kind",
    "excluded_modes",
    "confidence_threshold",
    "stability_threshold",
    "rate_method",
    "srgm_model",
    "stability_windows",
    "matrix",
    "uniform_missing_rows",
    "mode_family",
    "rtm_weight",
    "tca_weight",
}


def _parse_config(path: Path) -> dict:
    file = path.name
    data = _expect_object(_read_json(path), file, "top level", _CONFIG_KEYS,
                          {"structural_coverage", "system_kind"})
    config: dict[str, Any] = {}
    config["structural_coverage"] = _parse_number(
        data["structural_coverage"], file, "structural_coverage", lo=0.0, hi=1.0)
    config["system_kind"] = _parse_enum(SystemKind, data["system_kind"], file, "system_kind")
    raw_excluded = data.get("excluded_modes")
    if raw_excluded is not None:
        if not isinstance(raw_excluded, list):
            raise _fail(file, "excluded_modes", "expected an array of failure modes")
        config["excluded_modes"] = frozenset(
            _parse_enum(FailureMode, m, file, "excluded_modes") for m in raw_excluded)
    else:
        config["excluded_modes"] = None
    config["confidence_threshold"] = _parse_number(
        data.get("confidence_threshold", DEFAULT_CONFIDENCE_THRESHOLD),
        file, "confidence_threshold", lo=0.0, hi=1.0)
    config["stability_threshold"] = _parse_number(
        data.get("stability_threshold", DEFAULT_STABILITY_THRESHOLD),
        file, "stability_threshold", lo=0.0)
    config["rate_method"] = _parse_enum(
        RateMethod, data.get("rate_method", RateMethod.BOUNDED.value), file, "rate_method")
    config["srgm_model"] = _parse_enum(
        SrgmModel, data.get("srgm_model", SrgmModel.GOEL_OKUMOTO.value), file, "srgm_model")
    windows = data.get("stability_windows", DEFAULT_STABILITY_WINDOWS)
    if isinstance(windows, bool) or not isinstance(windows, int) or windows < 2:
        raise _fail(file, "stability_windows", f"expected an integer >= 2, got {windows!r}")
    config["stability_windows"] = windows
    config["matrix"] = _parse_string(data.get("matrix", BUILTIN_MATRIX_SOURCE), file, "matrix")
    flag = data.get("uniform_missing_rows", False)
    if not isinstance(flag, bool):
        raise _fail(file, "uniform_missing_rows", f"expected true or false, got {flag!r}")
    config["uniform_missing_rows"] = flag
    if "mode_family" in data:
        config["mode_family"] = _parse_enum(ModeFamily, data["mode_family"], file, "mode_family")
    else:
        config["mode_family"] = None
    config["rtm_weight"] = _parse_number(data.get("rtm_weight", 0.5), file, "rtm_weight", lo=0.0)
    config["tca_weight"] = _parse_number(data.get("tca_weight", 0.5), file, "tca_weight", lo=0.0)
    return config


def resolve_matrix_source(source: str, directory: Path) -> tuple[CausalityMatrix, Path | None]:
    """Resolve "builtin", "corpus:<file>" or a matrix file path.

    Returns the matrix and the file it came from (None for builtin);
    relative paths resolve against the bundle directory.
    """
    if source == BUILTIN_MATRIX_SOURCE:
        return causality_mod.builtin_causality(), None
    if source.startswith(CORPUS_SOURCE_PREFIX):
        corpus_path = Path(source[len(CORPUS_SOURCE_PREFIX):])
        if not corpus_path.is_absolute():
            corpus_path = directory / corpus_path
        corpus = load_corpus_file(corpus_path)
        try:
            matrix = causality_mod.estimate_causality(corpus, provenance=f"corpus:{corpus_path.name}")
        except OrcasError as exc:
            raise _fail(corpus_path.name, "corpus", str(exc)) from exc
        return matrix, corpus_path
    matrix_path = Path(source)
    if not matrix_path.is_absolute():
        matrix_path = directory / matrix_path
    return load_matrix_file(matrix_path), matrix_path


def _sha256(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def load_bundle(
    directory: Path | str,
    matrix_source: str | None = None,
    exclude_modes: frozenset[FailureMode] | set[FailureMode] | None = None,
    confidence_threshold: float | None = None,
    uniform_missing_rows: bool | None = None,
) -> AssessmentBundle:
    """Load and validate an assessment directory.

    Keyword arguments override the corresponding config.json options;
    giving ``exclude_modes`` switches the bundle to an explicit custom
    exclusion set regardless of the configured system kind.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise BundleError(f"bundle directory not found: {directory}")
    paths = {name: directory / name for name in REQUIRED_FILES}

    defects = load_defects_file(paths["defects.json"])
    effort = load_effort_file(paths["effort.json"])
    rtm = load_rtm_file(paths["rtm.json"])
    tca = load_tca_file(paths["tca.json"])
    config = _parse_config(paths["config.json"])

    effort_total = total_effort(effort)
    unit = effort.rate_unit.value
    for record in defects:
        if record.detection_effort > effort_total:
            raise _fail(
                "defects.json", f"record '{record.id}'",
                f"detection_effort {record.detection_effort!r} exceeds total testing effort "
                f"{effort_total!r}; detection efforts must be recorded in the effort model's "
                f"unit ({unit})",
            )
    try:
        validate_tca_entries(tca)
    except OrcasError as exc:
        raise _fail("tca.json", "coverage", str(exc)) from exc

    system_kind = config["system_kind"]
    config_excluded = config["excluded_modes"]
    if exclude_modes is not None:
        system_kind = SystemKind.CUSTOM
        excluded = frozenset(exclude_modes)
    else:
        try:
            excluded = mode_applicability(system_kind, config_excluded)
        except OrcasError as exc:
            raise _fail("config.json", "excluded_modes", str(exc)) from exc

    mode_family = config["mode_family"]
    if mode_family is None:
        mode_family = (
            ModeFamily.INFORMATION
            if config["system_kind"] is SystemKind.CONTINUOUS_MONITORING
            else ModeFamily.CONTROL
        )

    source = matrix_source if matrix_source is not None else config["matrix"]
    matrix, matrix_path = resolve_matrix_source(source, directory)

    digests = {name: _sha256(path) for name, path in paths.items()}
    if matrix_path is not None and matrix_path.exists():
        digests[matrix_path.name] = _sha256(matrix_path)

    return AssessmentBundle(
        defects=defects,
        effort=effort,
        rtm=rtm,
        tca=tca,
        structural_coverage=config["structural_coverage"],
        matrix=matrix,
        matrix_source=source,
        system_kind=system_kind,
        excluded_modes=excluded,
        mode_family=mode_family,
        confidence_threshold=(
            confidence_threshold if confidence_threshold is not None
            else config["confidence_threshold"]),
        stability_threshold=config["stability_threshold"],
        rate_method=config["rate_method"],
        srgm_model=config["srgm_model"],
        stability_windows=config["stability_windows"],
        uniform_missing_rows=(
            uniform_missing_rows if uniform_missing_rows is not None
            else config["uniform_missing_rows"]),
        rtm_weight=config["rtm_weight"],
        tca_weight=config["tca_weight"],
        input_digests=digests,
    )
