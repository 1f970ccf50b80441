from pathlib import Path

import pytest

from rainbow_ttd.config import ScenarioConfig

from tests.helpers import small_config


@pytest.fixture
def scenario() -> ScenarioConfig:
    """A scenario small enough for a few hundred trials per test."""
    return small_config()


@pytest.fixture
def output_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """
    Per-test artifact directory.

    RAINBOW_TTD_OUTPUT_DIR is cleared so a developer's environment cannot
    redirect test runs into a shared results folder.
    """
    monkeypatch.delenv("RAINBOW_TTD_OUTPUT_DIR", raising=False)
    return tmp_path / "results"
