from pathlib import Path

import pytest

from rainbow_ttd.api import resolve_config, run_experiment
from rainbow_ttd.exceptions import (
    ConfigurationError,
    InvariantViolation,
    RainbowTTDError,
)
from rainbow_ttd.experiments.squint_error import SquintError

from tests.helpers import read_summary, read_table


# One array size and angle keep the 3-dB width search quick.
FAST_SQUINT = ["experiment.fbw_elements=[16]", "experiment.fbw_angles_deg=[45]"]

SMALL_PAPR = [
    "experiment.symbols=200",
    "experiment.probability=0.1",
    "experiment.bootstrap_resamples=100",
]


@pytest.mark.unit
class TestResolveConfig:
    def test_shipped_default(self) -> None:
        config = resolve_config("distance-rmse")

        assert config.trials == 100
        assert config.link.snr_db is None

    def test_full_applies_full_overrides(self) -> None:
        config = resolve_config("distance-rmse", full=True)

        assert config.trials == 500

    def test_overrides_apply_after_full(self) -> None:
        config = resolve_config("distance-rmse", overrides=["trials=3"], full=True)

        assert config.trials == 3

    def test_seed_and_output_dir(self, tmp_path: Path) -> None:
        config = resolve_config(
            "squint-error", overrides=["base_seed=4"], seed=9, output_dir=tmp_path
        )

        assert config.base_seed == 9
        assert config.output_dir == str(tmp_path)

    def test_shipped_name_as_config_path(self) -> None:
        config = resolve_config("impairment-sweep", "impairment-sweep-rf")

        assert config.impairments.delay_model == "rf"

    def test_config_file(self, tmp_path: Path) -> None:
        path = tmp_path / "scenario.json"
        path.write_text('{"trials": 12}', encoding="utf-8")

        assert resolve_config("sweep-compare", path).trials == 12


@pytest.mark.unit
class TestRunExperiment:
    def test_unknown_experiment(self, output_dir: Path) -> None:
        with pytest.raises(ConfigurationError) as exc_info:
            run_experiment("beam-sweep", output_dir=output_dir)

        assert exc_info.value.category == "unknown_experiment"
        assert "squint-error" in str(exc_info.value)

    def test_writes_artifacts_and_reports_progress(self, output_dir: Path) -> None:
        calls: list[tuple[int, int]] = []

        report = run_experiment(
            "squint-error",
            overrides=FAST_SQUINT,
            output_dir=output_dir,
            progress=lambda done, total: calls.append((done, total)),
        )

        target = output_dir / "squint-error"
        assert report.output_dir == target
        assert {f.name for f in report.files} == {
            "squint_error.csv",
            "fbw_3db.csv",
            "plot_squint_error.py",
            "summary.json",
        }
        assert read_summary(target) == report.summary
        assert report.summary["peak_error_deg_fbw_0.25"] == pytest.approx(
            21.787, abs=0.01
        )
        assert calls == [(1, 1)]

    def test_same_seed_gives_identical_files(self, tmp_path: Path) -> None:
        first = run_experiment(
            "papr-ccdf", overrides=SMALL_PAPR, seed=3, output_dir=tmp_path / "a"
        )
        second = run_experiment(
            "papr-ccdf", overrides=SMALL_PAPR, seed=3, output_dir=tmp_path / "b"
        )

        for a, b in zip(first.files, second.files, strict=True):
            assert a.read_bytes() == b.read_bytes()
        levels = read_table(first.output_dir, "papr_levels")
        assert [(row["constellation"], row["loading"]) for row in levels] == [
            ("bpsk", "sparse"),
            ("bpsk", "full"),
            ("qpsk", "sparse"),
            ("qpsk", "full"),
        ]

    def test_violation_still_writes_artifacts(self, output_dir: Path) -> None:
        with pytest.raises(InvariantViolation) as exc_info:
            run_experiment(
                "squint-error",
                overrides=[*FAST_SQUINT, "experiment.fbw_tolerance=1e-9"],
                output_dir=output_dir,
            )

        assert exc_info.value.invariant == "fbw-closed-form"
        assert (output_dir / "squint-error" / "summary.json").exists()

    def test_bad_parameter_is_a_configuration_error(self, output_dir: Path) -> None:
        with pytest.raises(ConfigurationError) as exc_info:
            run_experiment(
                "papr-ccdf",
                overrides=["experiment.symbols=5"],
                output_dir=output_dir,
            )

        assert exc_info.value.key == "experiment.symbols"

    def test_unexpected_errors_are_wrapped(
        self, output_dir: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        def explode(self: SquintError) -> None:
            msg = "boom"
            raise RuntimeError(msg)

        monkeypatch.setattr(SquintError, "run", explode)

        with pytest.raises(RainbowTTDError, match="boom") as exc_info:
            run_experiment("squint-error", output_dir=output_dir)

        assert isinstance(exc_info.value.__cause__, RuntimeError)
        assert not (output_dir / "squint-error").exists()
