"""Shared fixtures: the packaged case-study bundle, a synthetic
event-history generator, and a bundle-directory writer for tests that
need datasets the fixture does not cover."""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

import pytest

from orcas.evidence import required_tca_template
from orcas.fixtures import vcu_dir


@pytest.fixture
def vcu_bundle_dir() -> Path:
    return vcu_dir()


def nhpp_exponential_events(a: float, b: float, horizon: float, rng: random.Random) -> list[float]:
    """Sample arrival efforts of the exponential-mean process by inversion.

    Independent of the fitting code on purpose: unit-rate Poisson partial
    sums are mapped through the inverse mean function, so this is the
    oracle the fitter is checked against.
    """
    events: list[float] = []
    s = 0.0
    ceiling = a * -math.expm1(-b * horizon)
    while True:
        s += rng.expovariate(1.0)
        if s >= ceiling:
            return events
        events.append(-math.log(1.0 - s / a) / b)


def default_tca_entries(status: str = "complete") -> list[dict]:
    return [
        {"level": level.value, "activity": activity, "trigger": trigger.value, "status": status}
        for level, activity, trigger in required_tca_template()
    ]


def write_bundle(
    directory: Path,
    defects: list[dict] | None = None,
    effort: dict | None = None,
    rtm: list[dict] | None = None,
    tca: list[dict] | None = None,
    config: dict | None = None,
    **extra_files: object,
) -> Path:
    """Materialize a bundle directory; defaults form a minimal valid one."""
    directory.mkdir(parents=True, exist_ok=True)
    files = {
        "defects.json": defects if defects is not None else [],
        "effort.json": effort if effort is not None else
            {"kind": "continuous", "test_count": 100, "test_duration": 1.0},
        "rtm.json": rtm if rtm is not None else
            [{"req_id": "R-1", "description": "does the thing", "status": "complete"}],
        "tca.json": tca if tca is not None else default_tca_entries(),
        "config.json": config if config is not None else
            {"structural_coverage": 1.0, "system_kind": "control"},
    }
    files.update({name: content for name, content in extra_files.items()})
    for name, content in files.items():
        (directory / name).write_text(json.dumps(content, indent=2), encoding="utf-8")
    return directory
