import math

import numpy as np
import pytest

from rainbow_ttd.array import ArrayGeometry
from rainbow_ttd.channel import combined_signal, matched_precoder, realize_channel
from rainbow_ttd.codebook import RainbowCodebook, build_rainbow_taps
from rainbow_ttd.estimation import (
    MatchMetric,
    angle_error,
    build_gain_dictionary,
    candidate_grid,
    coarse_estimate,
    coherent_estimate,
    estimate,
    refined_estimate,
    rmse,
)
from rainbow_ttd.exceptions import DimensionError


BANDWIDTH = 2e9


@pytest.fixture
def book() -> RainbowCodebook:
    return build_rainbow_taps(8, BANDWIDTH, diversity=2, loaded_count=16, m_total=64)


def noiseless_measurement(book: RainbowCodebook, aoa_rad: float) -> np.ndarray:
    geometry_tx = ArrayGeometry.linear(4)
    channel = realize_channel(
        book.geometry,
        geometry_tx,
        aoa_rad,
        0.0,
        1.0,
        book.loaded_freqs_hz(),
        0,
        frequency_flat=True,
    )
    precoder = matched_precoder(geometry_tx, 0.0)
    return combined_signal(book, channel, precoder, np.ones(book.loaded_count))


@pytest.mark.unit
class TestCoarseEstimate:
    def test_picks_strongest_group(self, book: RainbowCodebook) -> None:
        y = np.full(book.loaded_count, 0.1 + 0j)
        y[list(book.directions[3].positions)] = 1.0

        result = coarse_estimate(y, book)

        assert result.winning_group == 3
        assert result.coarse_angle_rad == book.directions[3].angle_rad
        assert result.refined_angle_rad is None
        assert result.per_direction_power.shape == (book.direction_count,)

    def test_ties_go_to_lowest_index(self, book: RainbowCodebook) -> None:
        result = coarse_estimate(np.ones(book.loaded_count), book)

        assert result.winning_group == 0

    def test_rejects_wrong_length(self, book: RainbowCodebook) -> None:
        with pytest.raises(DimensionError, match="Y must have 16 entries"):
            coarse_estimate(np.ones(15), book)

    @pytest.mark.parametrize("scale", [1e-6, 3.0, 2 - 1j, -1j])
    def test_invariant_to_complex_scaling(
        self, book: RainbowCodebook, scale: complex
    ) -> None:
        rng = np.random.default_rng(4)
        y = rng.standard_normal(book.loaded_count) + 1j * rng.standard_normal(
            book.loaded_count
        )

        base = coarse_estimate(y, book)
        scaled = coarse_estimate(scale * y, book)

        assert scaled.winning_group == base.winning_group
        assert scaled.coarse_angle_rad == base.coarse_angle_rad

    def test_permuting_within_a_group_keeps_powers(
        self, book: RainbowCodebook
    ) -> None:
        rng = np.random.default_rng(5)
        y = rng.standard_normal(book.loaded_count) + 1j * rng.standard_normal(
            book.loaded_count
        )
        shuffled = y.copy()
        for direction in book.directions:
            positions = list(direction.positions)
            shuffled[positions] = y[rng.permutation(positions)]

        base = coarse_estimate(y, book)
        permuted = coarse_estimate(shuffled, book)

        np.testing.assert_allclose(
            permuted.per_direction_power, base.per_direction_power, rtol=1e-12
        )
        assert permuted.winning_group == base.winning_group

    def test_noiseless_truth_on_a_direction(self, book: RainbowCodebook) -> None:
        truth = book.directions[5].angle_rad

        result = estimate(noiseless_measurement(book, truth), book)

        assert result.winning_group == 5


@pytest.mark.unit
class TestGainDictionary:
    def test_candidate_grid_is_uniform_in_sine(self) -> None:
        np.testing.assert_allclose(
            np.sin(candidate_grid(4)), [-1.0, -0.5, 0.0, 0.5], atol=1e-15
        )

    def test_profiles_have_unit_norm(self, book: RainbowCodebook) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64)

        assert dictionary.size == 64
        assert dictionary.gain_profiles.shape == (64, book.direction_count)
        np.testing.assert_allclose(
            np.linalg.norm(dictionary.gain_profiles, axis=1), 1.0
        )
        np.testing.assert_allclose(np.linalg.norm(dictionary.responses, axis=1), 1.0)

    def test_rejects_dictionary_smaller_than_codebook(
        self, book: RainbowCodebook
    ) -> None:
        with pytest.raises(ValueError, match="must be >= D"):
            build_gain_dictionary(book, book.geometry, 4)

    def test_rejects_mismatched_geometry(self, book: RainbowCodebook) -> None:
        with pytest.raises(DimensionError):
            build_gain_dictionary(book, ArrayGeometry.linear(4), 64)


@pytest.mark.unit
class TestRefinement:
    @pytest.mark.parametrize("metric", ["amplitude", "power"])
    def test_recovers_candidate_angle(
        self, book: RainbowCodebook, metric: MatchMetric
    ) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64, metric=metric)
        truth = float(candidate_grid(64)[37])

        result = estimate(noiseless_measurement(book, truth), book, dictionary)

        assert result.refined_angle_rad == pytest.approx(truth)

    def test_coherent_metric_recovers_candidate_angle(
        self, book: RainbowCodebook
    ) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64, metric="coherent")
        truth = float(candidate_grid(64)[37])
        y = noiseless_measurement(book, truth)

        result = estimate(y, book, dictionary, pilots=np.ones(book.loaded_count))

        assert result.refined_angle_rad == pytest.approx(truth)
        assert coherent_estimate(y, dictionary) == pytest.approx(truth)

    def test_refinement_beats_coarse_off_grid(self, book: RainbowCodebook) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64)
        truth = float(candidate_grid(64)[37])

        result = estimate(noiseless_measurement(book, truth), book, dictionary)

        assert result.refined_angle_rad is not None
        refined_error = abs(result.refined_angle_rad - truth)
        assert refined_error < abs(result.coarse_angle_rad - truth)

    def test_silent_measurement_keeps_coarse_angle(
        self, book: RainbowCodebook
    ) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64)
        result = coarse_estimate(np.zeros(book.loaded_count), book)

        assert refined_estimate(result, dictionary) == result.coarse_angle_rad

    def test_rejects_dictionary_of_another_codebook(
        self, book: RainbowCodebook
    ) -> None:
        dictionary = build_gain_dictionary(book, book.geometry, 64)
        other = build_rainbow_taps(
            8, BANDWIDTH, diversity=1, loaded_count=16, m_total=64
        )
        result = coarse_estimate(np.ones(other.loaded_count), other)

        with pytest.raises(DimensionError, match="different codebook"):
            refined_estimate(result, dictionary)


@pytest.mark.unit
class TestRmse:
    def test_reports_degrees(self) -> None:
        assert rmse([0.1, -0.1], [0.0, 0.0]) == pytest.approx(math.degrees(0.1))

    def test_zero_for_exact_estimates(self) -> None:
        assert rmse([0.2, 0.3], [0.2, 0.3]) == 0.0

    def test_endfire_estimates_wrap_around(self) -> None:
        assert rmse([math.radians(-89.0)], [math.radians(89.0)]) == pytest.approx(
            2.0
        )

    def test_angle_error_is_folded_to_half_a_turn(self) -> None:
        errors = angle_error([1.5, -1.5, 0.3], [-1.5, 1.5, 0.1])

        np.testing.assert_allclose(errors, [3.0 - np.pi, np.pi - 3.0, 0.2])
        assert np.all(np.abs(errors) <= np.pi / 2)

    def test_rejects_empty_input(self) -> None:
        with pytest.raises(ValueError, match="at least one estimate"):
            rmse([], [])
