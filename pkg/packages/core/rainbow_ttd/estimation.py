"""Single-symbol angle-of-arrival estimation from a rainbow codebook."""

import dataclasses
import logging
import math

from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from rainbow_ttd.array import (
    ArrayGeometry,
    ComplexArray,
    FloatArray,
    combiner_weights,
    readonly,
    response_matrix,
)
from rainbow_ttd.codebook import RainbowCodebook
from rainbow_ttd.exceptions import DimensionError


logger = logging.getLogger(__name__)

MatchMetric = Literal["amplitude", "power", "coherent"]


@dataclass(frozen=True, eq=False)
class EstimationResult:
    """
    Outcome of one training symbol.

    Attributes:
        coarse_angle_rad: Steered angle of the strongest direction group
        refined_angle_rad: Dictionary refinement, when one was run
        per_direction_power: Mean |Y[m]|^2 of each direction group
        winning_group: Index of the strongest group
    """

    coarse_angle_rad: float
    refined_angle_rad: float | None
    per_direction_power: FloatArray
    winning_group: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "per_direction_power", readonly(self.per_direction_power)
        )


def coarse_estimate(y: npt.ArrayLike, book: RainbowCodebook) -> EstimationResult:
    """
    Average |Y[m]|^2 over each direction's R subcarriers and pick the largest.

    Ties go to the lowest direction index.
    """
    values = np.asarray(y, dtype=np.complex128)
    if values.shape != (book.loaded_count,):
        msg = f"Y must have {book.loaded_count} entries, got shape {values.shape}"
        raise DimensionError(msg)

    power = np.abs(values) ** 2
    per_direction = np.array(
        [power[list(d.positions)].mean() for d in book.directions]
    )
    winner = int(np.argmax(per_direction))
    return EstimationResult(
        coarse_angle_rad=book.directions[winner].angle_rad,
        refined_angle_rad=None,
        per_direction_power=per_direction,
        winning_group=winner,
    )


@dataclass(frozen=True, eq=False)
class GainDictionary:
    """
    Expected per-direction combining gains of Q candidate angles.

    Attributes:
        candidate_angles: Q angles, uniform in sine over [-1, 1)
        gain_profiles: (Q, D) rows of unit Euclidean norm
        responses: (Q, M) unit-norm expected w^H[m] a(theta_q) per subcarrier
        metric: How gain_profiles are matched against a measurement
    """

    candidate_angles: FloatArray
    gain_profiles: FloatArray
    responses: ComplexArray
    metric: MatchMetric = "amplitude"

    @property
    def size(self) -> int:
        return int(self.candidate_angles.size)


def candidate_grid(q: int) -> FloatArray:
    """Q angles with sines -1 + 2k/Q."""
    return np.arcsin(-1 + 2 * np.arange(q) / q)


def _unit_rows(matrix: npt.NDArray[np.generic]) -> npt.NDArray[np.generic]:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return np.asarray(matrix / np.where(norms == 0, 1, norms))


def build_gain_dictionary(
    book: RainbowCodebook,
    geometry: ArrayGeometry,
    q: int,
    *,
    metric: MatchMetric = "amplitude",
    frequency_flat: bool = True,
) -> GainDictionary:
    """
    Expected per-direction profile of every candidate angle.

    amplitude rows hold sqrt of the group-mean power |w^H a|^2, power rows the
    group-mean power itself; both normalised to unit norm.
    """
    if q < book.direction_count:
        msg = f"dictionary size {q} must be >= D = {book.direction_count}"
        raise ValueError(msg)
    if geometry.element_count != book.taps.element_count:
        msg = "geometry does not match the codebook taps"
        raise DimensionError(msg)

    angles = candidate_grid(q)
    freqs = book.loaded_freqs_hz()
    weights = combiner_weights(book.taps, freqs, book.carrier_hz)
    arrival = response_matrix(geometry, angles, freqs, frequency_flat=frequency_flat)
    responses = np.einsum("mn,qmn->qm", weights.conj(), arrival)

    power = np.abs(responses) ** 2
    profiles = np.stack(
        [power[:, list(d.positions)].mean(axis=1) for d in book.directions], axis=1
    )
    if metric != "power":
        profiles = np.sqrt(profiles)

    logger.debug(
        "Gain dictionary Q=%d D=%d metric=%s", q, book.direction_count, metric
    )
    return GainDictionary(
        candidate_angles=readonly(angles),
        gain_profiles=np.asarray(_unit_rows(profiles), dtype=np.float64),
        responses=np.asarray(_unit_rows(responses), dtype=np.complex128),
        metric=metric,
    )


def refined_estimate(result: EstimationResult, dictionary: GainDictionary) -> float:
    """Candidate angle whose profile best correlates with the measured powers."""
    measured = np.asarray(result.per_direction_power, dtype=float)
    if measured.size != dictionary.gain_profiles.shape[1]:
        msg = "dictionary was built for a different codebook"
        raise DimensionError(msg)

    vector = measured if dictionary.metric == "power" else np.sqrt(measured)
    norm = float(np.linalg.norm(vector))
    if norm == 0:
        return result.coarse_angle_rad
    score = dictionary.gain_profiles @ (vector / norm)
    return float(dictionary.candidate_angles[int(np.argmax(score))])


def coherent_estimate(
    y: npt.ArrayLike,
    dictionary: GainDictionary,
    pilots: npt.ArrayLike | None = None,
) -> float:
    """Matched correlation of complex Y (pilots removed) with expected responses."""
    values = np.asarray(y, dtype=np.complex128)
    if pilots is not None:
        values = values * np.conj(np.asarray(pilots, dtype=np.complex128))
    if values.shape != (dictionary.responses.shape[1],):
        msg = "Y does not match the dictionary's subcarrier count"
        raise DimensionError(msg)
    score = np.abs(dictionary.responses.conj() @ values)
    return float(dictionary.candidate_angles[int(np.argmax(score))])


def estimate(
    y: npt.ArrayLike,
    book: RainbowCodebook,
    dictionary: GainDictionary | None = None,
    *,
    pilots: npt.ArrayLike | None = None,
) -> EstimationResult:
    """Coarse estimate, refined with the dictionary's metric when one is given."""
    result = coarse_estimate(y, book)
    if dictionary is None:
        return result
    if dictionary.metric == "coherent":
        refined = coherent_estimate(y, dictionary, pilots)
    else:
        refined = refined_estimate(result, dictionary)
    return dataclasses.replace(result, refined_angle_rad=refined)


def angle_error(estimates: npt.ArrayLike, truth: npt.ArrayLike) -> FloatArray:
    """
    Estimate minus truth, folded into [-pi/2, pi/2).

    Angles live on a circle of period pi: +90 and -90 deg are the same endfire
    direction, so an estimate at -89 deg of a truth at 89 deg is 2 deg off.
    """
    diff = np.asarray(estimates, dtype=float) - np.asarray(truth, dtype=float)
    return np.asarray(np.mod(diff + np.pi / 2, np.pi) - np.pi / 2, dtype=float)


def rmse(estimates: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """Root-mean-square angle_error in degrees (inputs in radians)."""
    if np.asarray(estimates).size == 0:
        msg = "rmse needs at least one estimate"
        raise ValueError(msg)
    errors = angle_error(estimates, truth)
    return math.degrees(math.sqrt(float(np.mean(errors**2))))
