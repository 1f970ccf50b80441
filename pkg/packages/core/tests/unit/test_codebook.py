import math

import numpy as np
import pytest

from rainbow_ttd.array import ArrayGeometry, TapConfig
from rainbow_ttd.codebook import (
    PlanarRainbowConfig,
    angle_frequency_map,
    argmax_pointing,
    build_planar_taps,
    build_rainbow_taps,
    codebook_rows,
    frequency_to_angle,
    hemisphere_grid,
    mapped_sine,
    oracle_angle_grid,
    planar_beam_contour,
    planar_beam_contours,
    rotate_codebook,
    wrap_sine,
)
from rainbow_ttd.exceptions import AngleDomainError, ConfigurationError


BANDWIDTH = 2e9


@pytest.mark.unit
class TestSineMap:
    def test_wrap_sine_folds_into_half_open_interval(self) -> None:
        wrapped = wrap_sine([0.5, 1.0, 1.25, -1.0, -1.5])

        np.testing.assert_allclose(wrapped, [0.5, -1.0, -0.75, -1.0, 0.5])

    def test_mapped_sine_is_twice_frequency_times_delay(self) -> None:
        sines = mapped_sine([0.0, 1e8, -2e8], 1 / BANDWIDTH)

        np.testing.assert_allclose(sines, [0.0, 0.1, -0.2])

    def test_mapped_sine_rejects_zero_delay(self) -> None:
        with pytest.raises(ValueError, match="delta_tau_s"):
            mapped_sine([0.0], 0.0)


@pytest.mark.unit
class TestBuildRainbowTaps:
    def test_one_direction_per_subcarrier(self) -> None:
        book = build_rainbow_taps(16, BANDWIDTH, diversity=1)

        assert book.direction_count == 16
        assert book.loaded_count == 16
        assert book.delta_tau_s == pytest.approx(0.5e-9)
        expected = np.arcsin(-1 + 2 * np.arange(16) / 16)
        np.testing.assert_allclose(book.direction_angles(), expected)

    def test_delays_step_by_diversity_over_bandwidth(self) -> None:
        book = build_rainbow_taps(8, BANDWIDTH, diversity=4)

        np.testing.assert_allclose(book.taps.delays_s, np.arange(8) * 4 / BANDWIDTH)
        np.testing.assert_allclose(book.taps.phases_rad, 0.0)

    def test_every_direction_collects_r_subcarriers(self) -> None:
        book = build_rainbow_taps(
            8, BANDWIDTH, diversity=4, loaded_count=32, m_total=256
        )
        groups = book.group_of_positions()

        assert book.direction_count == 8
        assert all(len(d.positions) == 4 for d in book.directions)
        assert np.bincount(groups).tolist() == [4] * 8

    def test_subcarriers_of_a_group_share_their_angle(self) -> None:
        book = build_rainbow_taps(
            8, BANDWIDTH, diversity=4, loaded_count=32, m_total=256
        )
        angles = book.subcarrier_angles()

        for direction in book.directions:
            np.testing.assert_allclose(
                angles[list(direction.positions)], direction.angle_rad, atol=1e-9
            )

    def test_rejects_loading_not_multiple_of_diversity(self) -> None:
        with pytest.raises(ConfigurationError) as exc_info:
            build_rainbow_taps(8, BANDWIDTH, diversity=4, loaded_count=30, m_total=60)

        assert exc_info.value.key == "codebook.diversity"
        assert exc_info.value.category == "consistency"

    def test_rejects_loading_that_does_not_divide_grid(self) -> None:
        with pytest.raises(ConfigurationError) as exc_info:
            build_rainbow_taps(8, BANDWIDTH, diversity=4, loaded_count=32, m_total=100)

        assert exc_info.value.key == "ofdm.loaded_count"

    def test_rejects_single_element(self) -> None:
        with pytest.raises(ValueError, match="at least two elements"):
            build_rainbow_taps(1, BANDWIDTH, diversity=1)

    def test_rejects_rotation_past_endfire(self) -> None:
        with pytest.raises(AngleDomainError):
            build_rainbow_taps(8, BANDWIDTH, diversity=1, rotation_rad=2.0)


@pytest.mark.unit
class TestRotation:
    def test_rotation_shifts_every_sine(self) -> None:
        book = build_rainbow_taps(16, BANDWIDTH, diversity=1)
        rotated = rotate_codebook(book, math.asin(0.3))

        shifted = wrap_sine(np.sin(book.direction_angles()) + 0.3)
        np.testing.assert_allclose(
            np.sin(rotated.direction_angles()), shifted, atol=1e-12
        )
        assert rotated.direction_count == book.direction_count

    def test_rotation_flags_wrapped_directions(self) -> None:
        rotated = build_rainbow_taps(
            16, BANDWIDTH, diversity=1, rotation_rad=math.asin(0.3)
        )

        # Base sines 0.75 and 0.875 move past +1.
        assert sum(d.wrapped for d in rotated.directions) == 2

    def test_rotations_accumulate(self) -> None:
        book = build_rainbow_taps(16, BANDWIDTH, diversity=1)
        twice = rotate_codebook(rotate_codebook(book, 0.1), 0.1)

        assert twice.rotation_sine == pytest.approx(2 * math.sin(0.1))


@pytest.mark.unit
class TestPointing:
    def test_each_subcarrier_peaks_at_its_mapped_angle(self) -> None:
        book = build_rainbow_taps(8, BANDWIDTH, diversity=1)
        gains = angle_frequency_map(book, book.subcarrier_angles())

        np.testing.assert_allclose(np.diag(gains), 1.0, rtol=1e-9)
        assert gains.max() <= 1 + 1e-12

    def test_argmax_agrees_with_the_map_within_one_grid_step(self) -> None:
        book = build_rainbow_taps(8, BANDWIDTH, diversity=2)
        grid = oracle_angle_grid(2048)
        found = argmax_pointing(book, grid)

        gap = np.abs(found - book.subcarrier_angles())
        gap = np.minimum(gap, np.pi - gap)
        assert gap.max() <= np.pi / 2048 * (1 + 1e-9)

    def test_oracle_grid_excludes_upper_endfire(self) -> None:
        grid = oracle_angle_grid(8)

        assert grid[0] == pytest.approx(-np.pi / 2)
        assert grid[-1] < np.pi / 2
        assert grid.size == 8

    def test_oracle_grid_is_evenly_spaced_in_angle(self) -> None:
        grid = oracle_angle_grid(16)

        np.testing.assert_allclose(np.diff(grid), np.pi / 16)

    def test_codebook_rows(self) -> None:
        book = build_rainbow_taps(
            8, BANDWIDTH, diversity=4, loaded_count=32, m_total=256
        )
        rows = codebook_rows(book)

        assert len(rows) == 32
        assert set(rows[0]) == {
            "subcarrier_index",
            "baseband_freq_hz",
            "angle_deg",
            "direction_group",
            "wrapped",
        }
        assert rows[1]["subcarrier_index"] == 8
        assert {row["direction_group"] for row in rows} == set(range(8))
        assert not any(row["wrapped"] for row in rows)


@pytest.mark.unit
class TestPlanar:
    def test_table_configuration_misses_the_coverage_bound(self) -> None:
        config = PlanarRainbowConfig.from_bandwidth_steps(4, 2, 1, 7, BANDWIDTH, 10)
        budget = config.delay_budget(BANDWIDTH)

        assert budget.max_delay_s == pytest.approx(5e-9)
        assert budget.required_s == pytest.approx(7e-9)
        assert not budget.meets_requirement

    def test_element_delays_are_x_major(self) -> None:
        config = PlanarRainbowConfig(1e-9, 10e-9, n_x=2, n_y=2, subcarrier_count=4)

        np.testing.assert_allclose(
            config.element_delays(), [0.0, 10e-9, 1e-9, 11e-9]
        )

    def test_hemisphere_grid_size(self) -> None:
        theta, phi = hemisphere_grid(11, 20)

        assert theta.size == phi.size == 220
        assert theta.max() == pytest.approx(np.pi / 2)
        assert phi.min() == pytest.approx(-np.pi)

    def test_contours_per_subcarrier(self) -> None:
        config = PlanarRainbowConfig.from_bandwidth_steps(4, 2, 1, 7, BANDWIDTH, 10)
        contours = planar_beam_contours(
            config, BANDWIDTH, grid=hemisphere_grid(31, 61)
        )

        assert len(contours) == 10
        for contour in contours:
            assert contour.peak_gain <= 8 * (1 + 1e-9)
            assert contour.cell_count >= 1
            assert len(contour.cells()) == contour.cell_count

    def test_contour_needs_planar_geometry(self) -> None:
        with pytest.raises(ValueError, match="planar geometry"):
            planar_beam_contour(
                TapConfig.nominal(4), ArrayGeometry.linear(4), 60e9, 3.0
            )

    def test_rejects_negative_steps(self) -> None:
        with pytest.raises(ValueError, match="nonnegative"):
            PlanarRainbowConfig(-1e-9, 0.0, n_x=2, n_y=2, subcarrier_count=4)


@pytest.mark.unit
class TestFrequencyToAngle:
    def test_carrier_maps_to_broadside(self) -> None:
        assert frequency_to_angle(0.0, 1 / BANDWIDTH) == 0.0

    def test_lower_band_edge_maps_to_endfire(self) -> None:
        angle = frequency_to_angle(-BANDWIDTH / 2, 1 / BANDWIDTH)

        assert angle == pytest.approx(-np.pi / 2, abs=1e-6)

    def test_periodic_in_inverse_delay(self) -> None:
        delta_tau = 1 / BANDWIDTH

        assert frequency_to_angle(3e8 + 1 / delta_tau, delta_tau) == pytest.approx(
            frequency_to_angle(3e8, delta_tau)
        )
        assert frequency_to_angle(3e8, delta_tau) == pytest.approx(math.asin(0.3))


@pytest.mark.unit
class TestRfAlignment:
    def test_table_codebook_steps_whole_carrier_cycles(self) -> None:
        book = build_rainbow_taps(16, BANDWIDTH, diversity=4)

        assert book.carrier_cycles_per_step == pytest.approx(120.0)
        book.check_rf_alignment()

    def test_fractional_cycles_are_rejected(self) -> None:
        book = build_rainbow_taps(16, BANDWIDTH, diversity=4, carrier_hz=60.1e9)

        with pytest.raises(ConfigurationError, match="integer") as exc_info:
            book.check_rf_alignment()

        assert exc_info.value.category == "consistency"


@pytest.mark.unit
class TestBuildPlanarTaps:
    def test_delays_add_per_axis(self) -> None:
        config = PlanarRainbowConfig.from_bandwidth_steps(2, 2, 1, 1, BANDWIDTH, 4)

        taps = build_planar_taps(config, BANDWIDTH)

        np.testing.assert_allclose(
            taps.delays_s, np.array([0.0, 1.0, 1.0, 2.0]) / BANDWIDTH
        )
        np.testing.assert_allclose(taps.phases_rad, 0.0)

    def test_single_element(self) -> None:
        config = PlanarRainbowConfig(0.0, 0.0, n_x=1, n_y=1, subcarrier_count=1)

        taps = build_planar_taps(config, BANDWIDTH)

        assert taps.delays_s.tolist() == [0.0]

    def test_rejects_nonpositive_bandwidth(self) -> None:
        config = PlanarRainbowConfig(0.0, 0.0, n_x=1, n_y=1, subcarrier_count=1)

        with pytest.raises(ValueError, match="bandwidth_hz"):
            build_planar_taps(config, 0.0)
