import math

import numpy as np
import pytest

from rainbow_ttd.array import TapConfig
from rainbow_ttd.codebook import build_rainbow_taps
from rainbow_ttd.config import ScenarioConfig
from rainbow_ttd.impairments import (
    AXIS_UNITS,
    ImpairmentSpec,
    perturb_taps,
    sensitivity_sweep,
)


@pytest.mark.unit
class TestImpairmentSpec:
    def test_default_is_nominal(self) -> None:
        assert ImpairmentSpec().is_nominal
        assert not ImpairmentSpec(sigma_phase_rad=0.1).is_nominal

    @pytest.mark.parametrize("value", [-1.0, math.nan, math.inf])
    def test_rejects_bad_sigma(self, value: float) -> None:
        with pytest.raises(ValueError, match="finite and nonnegative"):
            ImpairmentSpec(sigma_delay_s=value)

    def test_rejects_unknown_delay_model(self) -> None:
        with pytest.raises(ValueError, match="unknown delay model"):
            ImpairmentSpec(delay_model="ideal")  # type: ignore[arg-type]

    def test_along_converts_display_units(self) -> None:
        assert ImpairmentSpec.along("gain", 1.5).sigma_gain_db == 1.5
        assert ImpairmentSpec.along("phase", 180.0).sigma_phase_rad == pytest.approx(
            math.pi
        )
        assert ImpairmentSpec.along("delay", 2.0).sigma_delay_s == pytest.approx(
            2e-12
        )

    def test_along_keeps_the_other_axes_at_zero(self) -> None:
        spec = ImpairmentSpec.along("phase", 10.0, delay_model="rf")

        assert spec.sigma_gain_db == 0.0
        assert spec.sigma_delay_s == 0.0
        assert spec.delay_model == "rf"

    def test_along_rejects_unknown_axis(self) -> None:
        with pytest.raises(ValueError, match="unknown sweep axis"):
            ImpairmentSpec.along("amplitude", 1.0)  # type: ignore[arg-type]

    def test_axis_units(self) -> None:
        assert AXIS_UNITS == {"gain": "dB", "phase": "deg", "delay": "ps"}


@pytest.mark.unit
class TestPerturbTaps:
    def test_zero_sigma_leaves_taps_unchanged(self) -> None:
        taps = TapConfig.nominal(8, delays_s=np.arange(8) * 1e-9)

        perturbed = perturb_taps(taps, ImpairmentSpec(), 3)

        np.testing.assert_array_equal(perturbed.gains, taps.gains)
        np.testing.assert_array_equal(perturbed.delays_s, taps.delays_s)
        np.testing.assert_array_equal(perturbed.phases_rad, taps.phases_rad)

    def test_same_seed_same_draw(self) -> None:
        taps = TapConfig.nominal(8)
        spec = ImpairmentSpec(sigma_phase_rad=0.2, sigma_gain_db=1.0)

        first = perturb_taps(taps, spec, 5)
        second = perturb_taps(taps, spec, 5)

        np.testing.assert_array_equal(first.phases_rad, second.phases_rad)
        np.testing.assert_array_equal(first.gains, second.gains)

    def test_only_the_swept_quantity_moves(self) -> None:
        taps = TapConfig.nominal(64)

        perturbed = perturb_taps(taps, ImpairmentSpec.along("phase", 10.0), 1)

        np.testing.assert_array_equal(perturbed.gains, 1.0)
        np.testing.assert_array_equal(perturbed.delays_s, 0.0)
        assert np.std(perturbed.phases_rad) == pytest.approx(
            math.radians(10.0), rel=0.3
        )

    def test_error_moments_over_many_elements(self) -> None:
        n = 100_000
        nominal = TapConfig.nominal(
            n, delays_s=np.arange(n) * 1e-12, phases_rad=np.linspace(-3, 3, n)
        )
        spec = ImpairmentSpec(
            sigma_delay_s=50e-12,
            sigma_phase_rad=math.radians(10.0),
            sigma_gain_db=2.0,
        )

        perturbed = perturb_taps(nominal, spec, 17)

        errors = {
            "delay": (perturbed.delays_s - nominal.delays_s, spec.sigma_delay_s),
            "phase": (perturbed.phases_rad - nominal.phases_rad, spec.sigma_phase_rad),
            "gain": (10 * np.log10(perturbed.gains), spec.sigma_gain_db),
        }
        for name, (error, sigma) in errors.items():
            assert abs(np.mean(error)) < 0.02 * sigma, name
            assert np.var(error) == pytest.approx(sigma**2, rel=0.02), name
        # alpha = 10^(x / 10), x ~ N(0, sigma_A^2), so E[alpha] = exp(s^2 / 2).
        s = spec.sigma_gain_db * math.log(10) / 10
        assert np.mean(perturbed.gains) == pytest.approx(math.exp(s**2 / 2), rel=0.02)

    def test_zero_sigma_reproduces_codebook_taps_exactly(self) -> None:
        book = build_rainbow_taps(
            16, 2e9, diversity=4, rotation_rad=0.3, loaded_count=128, m_total=512
        )

        perturbed = perturb_taps(book.taps, ImpairmentSpec(), 9)

        assert np.array_equal(perturbed.gains, book.taps.gains)
        assert np.array_equal(perturbed.delays_s, book.taps.delays_s)
        assert np.array_equal(perturbed.phases_rad, book.taps.phases_rad)

    def test_gain_errors_are_log_normal(self) -> None:
        taps = TapConfig.nominal(4000)

        perturbed = perturb_taps(taps, ImpairmentSpec(sigma_gain_db=2.0), 2)

        assert np.all(perturbed.gains > 0)
        assert np.std(10 * np.log10(perturbed.gains)) == pytest.approx(2.0, rel=0.1)


@pytest.mark.unit
class TestSensitivitySweep:
    def test_rejects_too_few_trials(self, scenario: ScenarioConfig) -> None:
        with pytest.raises(ValueError, match="at least 100 trials"):
            sensitivity_sweep(scenario, "phase", [0.0], 99, 0)

    def test_rejects_unknown_axis(self, scenario: ScenarioConfig) -> None:
        with pytest.raises(ValueError, match="unknown sweep axis"):
            sensitivity_sweep(
                scenario, "noise", [0.0], 100, 0  # type: ignore[arg-type]
            )

    def test_one_row_per_grid_value(self, scenario: ScenarioConfig) -> None:
        calls: list[tuple[int, int]] = []

        rows = sensitivity_sweep(
            scenario,
            "phase",
            [0.0, 30.0],
            100,
            0,
            progress=lambda done, total: calls.append((done, total)),
        )

        assert [row.grid_value for row in rows] == [0.0, 30.0]
        assert {row.unit for row in rows} == {"deg"}
        assert all(row.refined_rmse_deg >= 0 for row in rows)
        assert calls[-1] == (200, 200)

    def test_refined_rmse_grows_with_phase_error(
        self, scenario: ScenarioConfig
    ) -> None:
        rows = sensitivity_sweep(scenario, "phase", [0.0, 20.0, 60.0], 100, 0)

        refined = [row.refined_rmse_deg for row in rows]
        assert refined == sorted(refined)
        assert refined[-1] > refined[0]

    def test_rows_carry_their_trials(self, scenario: ScenarioConfig) -> None:
        rows = sensitivity_sweep(scenario, "gain", [0.0, 1.0], 100, 0)

        assert [len(row.records) for row in rows] == [100, 100]
        assert rows[1].spec == ImpairmentSpec.along("gain", 1.0)
        truths = [[r.truth_rad for r in row.records] for row in rows]
        assert truths[0] == truths[1]
