"""Bundled example datasets."""

from importlib import resources
from pathlib import Path


def vcu_dir() -> Path:
    """Directory of the smart-sensor case-study bundle (continuous
    monitoring, 10687 one-hour tests, 8 classified defects)."""
    return Path(resources.files(__package__) / "vcu")
