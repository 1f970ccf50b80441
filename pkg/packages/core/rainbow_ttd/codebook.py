"""Frequency-dependent ("rainbow") TTD codebooks for linear and planar arrays.

A linear codebook uses delays tau_n = n * R / BW so that subcarrier m, at
baseband offset f_m, points toward

    sin(theta_m) = mod(2 * f_m * delta_tau + 1, 2) - 1

Phase taps n * pi * sin(theta_rot) add sin(theta_rot) to every pointing sine
(wrapped back into [-1, 1)). Pointing is exact for the frequency-flat UE
response; with the frequency-dependent response it drifts by f/f_c.
"""

import logging
import math

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from rainbow_ttd.array import (
    DEFAULT_CARRIER_HZ,
    ArrayGeometry,
    FloatArray,
    IntArray,
    TapConfig,
    check_angles,
    gain_pattern,
    readonly,
)
from rainbow_ttd.error_policy import raise_config_error
from rainbow_ttd.waveform import subcarrier_offsets, uniform_loading


logger = logging.getLogger(__name__)

# Mapped sines this close to +1 alias to -1 (the map's range is [-1, 1)).
_SINE_SNAP = 1e-9
# f_c * delta_tau this close to an integer counts as one.
_CYCLE_TOLERANCE = 1e-6


def wrap_sine(values: npt.ArrayLike) -> FloatArray:
    """Fold sines into [-1, 1) with period 2."""
    wrapped = np.mod(np.asarray(values, dtype=float) + 1, 2) - 1
    return np.where(wrapped >= 1 - _SINE_SNAP, -1.0, wrapped)


def mapped_sine(baseband_freq_hz: npt.ArrayLike, delta_tau_s: float) -> FloatArray:
    if not delta_tau_s > 0:
        msg = "delta_tau_s must be positive"
        raise ValueError(msg)
    return wrap_sine(2 * np.asarray(baseband_freq_hz, dtype=float) * delta_tau_s)


def frequency_to_angle(baseband_freq_hz: float, delta_tau_s: float) -> float:
    """Angle in [-pi/2, pi/2) steered at baseband offset f - f_c."""
    return float(np.arcsin(mapped_sine(baseband_freq_hz, delta_tau_s)))


@dataclass(frozen=True)
class Direction:
    """
    One steered direction of a codebook.

    Attributes:
        index: Direction number d in [0, D)
        angle_rad: Steered angle after rotation
        positions: Positions of its R subcarriers within the loaded set
        wrapped: Rotation pushed the direction past +-90 deg and it was folded
    """

    index: int
    angle_rad: float
    positions: tuple[int, ...]
    wrapped: bool = False


@dataclass(frozen=True, eq=False)
class RainbowCodebook:
    """
    Tap configuration of a linear rainbow codebook with its direction groups.

    Attributes:
        taps: Delay/phase taps realising the codebook
        geometry: Half-wavelength linear array the taps belong to
        delta_tau_s: Delay step R / BW
        diversity: Subcarriers per steered direction (R)
        directions: D steered directions in increasing unrotated sine
        rotation_rad: Net rotation applied by the phase taps
        rotation_sine: Unwrapped sum of applied rotation sines
        bandwidth_hz: Bandwidth BW
        m_total: OFDM grid size M_tot
        loaded_indices: Grid bins of the M loaded subcarriers
    """

    taps: TapConfig
    geometry: ArrayGeometry
    delta_tau_s: float
    diversity: int
    directions: tuple[Direction, ...]
    rotation_rad: float
    rotation_sine: float
    bandwidth_hz: float
    m_total: int
    loaded_indices: IntArray

    @property
    def direction_count(self) -> int:
        return len(self.directions)

    @property
    def loaded_count(self) -> int:
        return int(self.loaded_indices.size)

    @property
    def carrier_hz(self) -> float:
        return self.geometry.carrier_hz

    def baseband_offsets_hz(self) -> FloatArray:
        return subcarrier_offsets(self.loaded_indices, self.m_total, self.bandwidth_hz)

    def loaded_freqs_hz(self) -> FloatArray:
        return self.carrier_hz + self.baseband_offsets_hz()

    def direction_angles(self) -> FloatArray:
        return np.array([direction.angle_rad for direction in self.directions])

    def group_of_positions(self) -> IntArray:
        """Direction index of every loaded subcarrier position."""
        groups = np.empty(self.loaded_count, dtype=np.int64)
        for direction in self.directions:
            groups[list(direction.positions)] = direction.index
        return groups

    def subcarrier_angles(self) -> FloatArray:
        """Pointing angle of every loaded subcarrier (rotation included)."""
        sines = mapped_sine(self.baseband_offsets_hz(), self.delta_tau_s)
        return np.arcsin(wrap_sine(sines + self.rotation_sine))

    @property
    def carrier_cycles_per_step(self) -> float:
        """Carrier cycles f_c * delta_tau in one delay step."""
        return self.carrier_hz * self.delta_tau_s

    def check_rf_alignment(self) -> None:
        """
        Delays applied at RF add 2 pi f_c tau_n to every tap. The baseband
        pointing, and any dictionary built from it, only holds when that phase
        is a whole number of turns per step.

        Raises:
            ConfigurationError: f_c * delta_tau is not an integer.
        """
        cycles = self.carrier_cycles_per_step
        if abs(cycles - round(cycles)) > _CYCLE_TOLERANCE:
            raise_config_error(
                f"RF delays need f_c * delta_tau to be an integer, got {cycles:.6g}; "
                "adjust arrays.carrier_hz or use the baseband delay model",
                key="arrays.carrier_hz",
                value=self.carrier_hz,
                category="consistency",
            )


def _assemble(
    geometry: ArrayGeometry,
    bandwidth_hz: float,
    diversity: int,
    loaded_indices: IntArray,
    m_total: int,
    rotation_sine: float,
) -> RainbowCodebook:
    loaded_count = loaded_indices.size
    direction_count = loaded_count // diversity
    delta_tau = diversity / bandwidth_hz

    n = np.arange(geometry.element_count)
    # Equals pi times n times the rotation sine at half-wavelength spacing.
    phases = 2 * np.pi * geometry.spacing_wavelengths * n * rotation_sine
    taps = TapConfig.nominal(
        geometry.element_count, delays_s=n * delta_tau, phases_rad=phases
    )

    offsets = subcarrier_offsets(loaded_indices, m_total, bandwidth_hz)
    sines = mapped_sine(offsets, delta_tau)
    keys = np.mod(np.rint((sines + 1) * direction_count / 2), direction_count).astype(
        np.int64
    )

    directions = []
    for index in range(direction_count):
        positions = np.flatnonzero(keys == index)
        base_sine = -1 + 2 * index / direction_count
        if positions.size != diversity or not np.allclose(
            sines[positions], base_sine, atol=1e-6
        ):
            raise_config_error(
                f"direction {index} collects {positions.size} subcarriers, "
                f"expected {diversity}; loaded subcarriers must be evenly spread",
                key="codebook.diversity",
                value=diversity,
                category="consistency",
            )
        shifted = base_sine + rotation_sine
        directions.append(
            Direction(
                index=index,
                angle_rad=float(np.arcsin(wrap_sine(shifted))),
                positions=tuple(int(p) for p in positions),
                wrapped=not -1 <= shifted < 1,
            )
        )

    rotation_rad = float(np.arcsin(wrap_sine(rotation_sine)))
    return RainbowCodebook(
        taps=taps,
        geometry=geometry,
        delta_tau_s=delta_tau,
        diversity=diversity,
        directions=tuple(directions),
        rotation_rad=rotation_rad,
        rotation_sine=rotation_sine,
        bandwidth_hz=bandwidth_hz,
        m_total=m_total,
        loaded_indices=readonly(loaded_indices, np.int64),
    )


def build_rainbow_taps(
    n_elements: int,
    bandwidth_hz: float,
    diversity: int,
    rotation_rad: float = 0.0,
    *,
    loaded_count: int | None = None,
    m_total: int | None = None,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
) -> RainbowCodebook:
    """
    Build a linear rainbow codebook with delays n * R / BW.

    loaded_count defaults to N * R and m_total to loaded_count; the loaded
    subcarriers are spread at a uniform stride over the M_tot grid and grouped
    into D = M / R directions.

    Raises:
        ConfigurationError: M is not a multiple of R or does not divide M_tot.
    """
    if n_elements < 2:
        msg = "a rainbow codebook needs at least two elements"
        raise ValueError(msg)
    if diversity < 1:
        msg = "diversity must be >= 1"
        raise ValueError(msg)
    if not bandwidth_hz > 0:
        msg = "bandwidth_hz must be positive"
        raise ValueError(msg)
    check_angles(rotation_rad)

    loaded = n_elements * diversity if loaded_count is None else loaded_count
    total = loaded if m_total is None else m_total
    if loaded % diversity:
        raise_config_error(
            f"loaded subcarriers ({loaded}) must be a multiple of "
            f"diversity ({diversity})",
            key="codebook.diversity",
            value=diversity,
            category="consistency",
        )
    if not 1 <= loaded <= total or total % loaded:
        raise_config_error(
            f"loaded subcarriers ({loaded}) must divide the grid size ({total})",
            key="ofdm.loaded_count",
            value=loaded,
            category="consistency",
        )

    geometry = ArrayGeometry.linear(n_elements, carrier_hz)
    book = _assemble(
        geometry,
        bandwidth_hz,
        diversity,
        uniform_loading(total, loaded),
        total,
        math.sin(rotation_rad),
    )
    logger.debug(
        "Rainbow codebook N=%d R=%d D=%d delta_tau=%.3g s",
        n_elements,
        diversity,
        book.direction_count,
        book.delta_tau_s,
    )
    return book


def rotate_codebook(book: RainbowCodebook, rotation_rad: float) -> RainbowCodebook:
    """Rotate every steered direction by rotation_rad, on top of earlier rotations."""
    check_angles(rotation_rad)
    book = _assemble(
        book.geometry,
        book.bandwidth_hz,
        book.diversity,
        np.asarray(book.loaded_indices),
        book.m_total,
        book.rotation_sine + math.sin(rotation_rad),
    )
    if any(direction.wrapped for direction in book.directions):
        logger.debug(
            "Rotation wrapped %d of %d directions past endfire",
            sum(direction.wrapped for direction in book.directions),
            book.direction_count,
        )
    return book


def codebook_rows(book: RainbowCodebook) -> list[dict[str, Any]]:
    """One row per loaded subcarrier for CSV export."""
    offsets = book.baseband_offsets_hz()
    angles = book.subcarrier_angles()
    groups = book.group_of_positions()
    wrapped = {d.index: d.wrapped for d in book.directions}
    return [
        {
            "subcarrier_index": int(book.loaded_indices[m]),
            "baseband_freq_hz": float(offsets[m]),
            "angle_deg": math.degrees(float(angles[m])),
            "direction_group": int(groups[m]),
            "wrapped": wrapped[int(groups[m])],
        }
        for m in range(book.loaded_count)
    ]


def angle_frequency_map(
    book: RainbowCodebook,
    angles_rad: npt.ArrayLike,
    *,
    frequency_flat: bool = True,
) -> FloatArray:
    """Normalised gain |w^H a| / N over (loaded subcarrier, angle), shape (M, A)."""
    pattern = gain_pattern(
        book.taps,
        book.geometry,
        angles_rad,
        book.loaded_freqs_hz(),
        frequency_flat=frequency_flat,
    )
    return pattern.T / book.geometry.element_count


def oracle_angle_grid(points: int = 4096) -> FloatArray:
    """Dense angle grid over [-pi/2, pi/2) used by the argmax pointing check."""
    return np.linspace(-np.pi / 2, np.pi / 2, points, endpoint=False)


def argmax_pointing(
    book: RainbowCodebook, angles_rad: npt.ArrayLike | None = None
) -> FloatArray:
    """Beam-pattern argmax angle of every loaded subcarrier."""
    grid = oracle_angle_grid() if angles_rad is None else np.asarray(angles_rad)
    gains = angle_frequency_map(book, grid)
    return np.asarray(grid[np.argmax(gains, axis=1)], dtype=float)


@dataclass(frozen=True)
class DelayBudget:
    max_delay_s: float
    required_s: float

    @property
    def meets_requirement(self) -> bool:
        return self.max_delay_s >= self.required_s * (1 - 1e-12)


@dataclass(frozen=True)
class PlanarRainbowConfig:
    """
    Uniform delay steps of a planar rainbow array.

    Element (i, j) (zero-based, x-major) is delayed by i*dtau_x + j*dtau_y.
    """

    delta_tau_x_s: float
    delta_tau_y_s: float
    n_x: int
    n_y: int
    subcarrier_count: int

    def __post_init__(self) -> None:
        if min(self.n_x, self.n_y, self.subcarrier_count) < 1:
            msg = "n_x, n_y and subcarrier_count must be >= 1"
            raise ValueError(msg)
        if self.delta_tau_x_s < 0 or self.delta_tau_y_s < 0:
            msg = "delay steps must be nonnegative"
            raise ValueError(msg)

    @classmethod
    def from_bandwidth_steps(
        cls,
        n_x: int,
        n_y: int,
        steps_x: float,
        steps_y: float,
        bandwidth_hz: float,
        subcarrier_count: int,
    ) -> "PlanarRainbowConfig":
        """Delay steps given in units of 1 / BW."""
        return cls(
            steps_x / bandwidth_hz,
            steps_y / bandwidth_hz,
            n_x,
            n_y,
            subcarrier_count,
        )

    @property
    def element_count(self) -> int:
        return self.n_x * self.n_y

    def geometry(self, carrier_hz: float = DEFAULT_CARRIER_HZ) -> ArrayGeometry:
        return ArrayGeometry.planar(self.n_x, self.n_y, carrier_hz)

    def element_delays(self) -> FloatArray:
        ix, iy = self.geometry().element_indices()
        return ix * self.delta_tau_x_s + iy * self.delta_tau_y_s

    def delay_budget(self, bandwidth_hz: float) -> DelayBudget:
        """Largest tap delay against the 2(N - 1)/BW full-coverage requirement."""
        return DelayBudget(
            max_delay_s=float(self.element_delays().max()),
            required_s=2 * (self.element_count - 1) / bandwidth_hz,
        )

    def subcarrier_offsets_hz(self, bandwidth_hz: float) -> FloatArray:
        count = self.subcarrier_count
        return subcarrier_offsets(uniform_loading(count, count), count, bandwidth_hz)


def build_planar_taps(config: PlanarRainbowConfig, bandwidth_hz: float) -> TapConfig:
    if not bandwidth_hz > 0:
        msg = "bandwidth_hz must be positive"
        raise ValueError(msg)
    budget = config.delay_budget(bandwidth_hz)
    if not budget.meets_requirement:
        logger.info(
            "Planar delay range %.3g s is below the 2(N-1)/BW = %.3g s coverage bound",
            budget.max_delay_s,
            budget.required_s,
        )
    return TapConfig.nominal(config.element_count, delays_s=config.element_delays())


@dataclass(frozen=True, eq=False)
class BeamContour:
    """Directions whose gain is within level_db of the peak at one frequency."""

    freq_hz: float
    level_db: float
    theta_rad: FloatArray
    phi_rad: FloatArray
    peak_gain: float
    peak_theta_rad: float
    peak_phi_rad: float

    @property
    def cell_count(self) -> int:
        return int(self.theta_rad.size)

    def cells(self) -> list[tuple[float, float]]:
        return [
            (float(t), float(p))
            for t, p in zip(self.theta_rad, self.phi_rad, strict=True)
        ]


def hemisphere_grid(
    theta_points: int = 91, phi_points: int = 181
) -> tuple[FloatArray, FloatArray]:
    """Flattened (theta, phi) cells over theta in [0, 90] deg, phi in [-180, 180)."""
    theta = np.linspace(0, np.pi / 2, theta_points)
    phi = np.linspace(-np.pi, np.pi, phi_points, endpoint=False)
    grid_theta, grid_phi = np.meshgrid(theta, phi, indexing="ij")
    return grid_theta.ravel(), grid_phi.ravel()


def planar_beam_contour(
    taps: TapConfig,
    geometry: ArrayGeometry,
    freq_hz: float,
    level_db: float = 3.0,
    *,
    grid: tuple[FloatArray, FloatArray] | None = None,
    frequency_flat: bool = False,
) -> BeamContour:
    if geometry.kind != "planar":
        msg = "planar_beam_contour needs a planar geometry"
        raise ValueError(msg)
    if level_db < 0:
        msg = "level_db must be nonnegative"
        raise ValueError(msg)

    theta, phi = hemisphere_grid() if grid is None else grid
    gains = gain_pattern(
        taps,
        geometry,
        theta,
        freq_hz,
        azimuth_rad=phi,
        frequency_flat=frequency_flat,
    )[:, 0]
    peak = int(np.argmax(gains))
    threshold = gains[peak] * 10 ** (-level_db / 20)
    inside = gains >= threshold

    return BeamContour(
        freq_hz=freq_hz,
        level_db=level_db,
        theta_rad=readonly(theta[inside]),
        phi_rad=readonly(phi[inside]),
        peak_gain=float(gains[peak]),
        peak_theta_rad=float(theta[peak]),
        peak_phi_rad=float(phi[peak]),
    )


def planar_beam_contours(
    config: PlanarRainbowConfig,
    bandwidth_hz: float,
    *,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
    level_db: float = 3.0,
    grid: tuple[FloatArray, FloatArray] | None = None,
) -> list[BeamContour]:
    """Contours of every configured subcarrier of a planar rainbow array."""
    taps = build_planar_taps(config, bandwidth_hz)
    geometry = config.geometry(carrier_hz)
    cells = hemisphere_grid() if grid is None else grid
    freqs = carrier_hz + config.subcarrier_offsets_hz(bandwidth_hz)
    return [
        planar_beam_contour(taps, geometry, float(f), level_db, grid=cells)
        for f in freqs
    ]
