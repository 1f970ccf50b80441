"""Array geometry, spatial responses and combiner weights.

Angles are radians, frequencies are absolute RF frequencies in Hz. The
combiner convention is

    [w(f)]_n = alpha_n * exp(-j * (2*pi*(f - f_c)*tau_n + phi_n))

for baseband-implemented delays, and 2*pi*f*tau_n for RF delays. The spatial
response of element n is exp(-j * n * 2*pi*f*d*sin(theta)/c), so a phase-only
combiner with phi_n equal to the response phase gives |w^H a| = N.
"""

import logging

from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from rainbow_ttd.exceptions import AngleDomainError, DimensionError


logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 60e9

# Tolerance on the +-pi/2 field-of-view check, so np.pi / 2 computed from
# degrees still passes.
_ANGLE_SLACK = 1e-12

ArrayKind = Literal["linear", "planar"]
DelayModel = Literal["baseband", "rf"]
FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
IntArray = npt.NDArray[np.int64]


def readonly(values: npt.ArrayLike, dtype: type = np.float64) -> npt.NDArray[Any]:
    """Copy values into a 1-D array that cannot be written through."""
    array = np.array(values, dtype=dtype, copy=True)
    if array.ndim != 1:
        msg = f"expected a 1-D vector, got shape {array.shape}"
        raise DimensionError(msg)
    array.setflags(write=False)
    return array


def check_angles(angle_rad: npt.ArrayLike) -> None:
    angles = np.asarray(angle_rad, dtype=float)
    bad = ~(np.abs(angles) <= np.pi / 2 + _ANGLE_SLACK)
    if np.any(bad):
        raise AngleDomainError(float(angles[bad].flat[0]))


@dataclass(frozen=True)
class ArrayGeometry:
    """
    Uniform linear or planar array.

    Attributes:
        kind: "linear" (ULA along x) or "planar" (UPA in the x-y plane)
        n_elements: N for linear arrays, (N_x, N_y) for planar arrays
        carrier_hz: Carrier frequency f_c the spacing is expressed against
        spacing_wavelengths: Element pitch in carrier wavelengths
    """

    kind: ArrayKind
    n_elements: int | tuple[int, int]
    carrier_hz: float = DEFAULT_CARRIER_HZ
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        dims = self.shape
        if min(dims) < 1:
            msg = f"n_elements must be >= 1 in every dimension, got {self.n_elements}"
            raise ValueError(msg)
        if not self.spacing_wavelengths > 0:
            msg = "spacing_wavelengths must be positive"
            raise ValueError(msg)
        if not self.carrier_hz > 0:
            msg = "carrier_hz must be positive"
            raise ValueError(msg)

    @classmethod
    def linear(
        cls,
        n: int,
        carrier_hz: float = DEFAULT_CARRIER_HZ,
        spacing_wavelengths: float = 0.5,
    ) -> "ArrayGeometry":
        return cls("linear", n, carrier_hz, spacing_wavelengths)

    @classmethod
    def planar(
        cls,
        n_x: int,
        n_y: int,
        carrier_hz: float = DEFAULT_CARRIER_HZ,
        spacing_wavelengths: float = 0.5,
    ) -> "ArrayGeometry":
        return cls("planar", (n_x, n_y), carrier_hz, spacing_wavelengths)

    @property
    def shape(self) -> tuple[int, int]:
        if isinstance(self.n_elements, tuple):
            if self.kind != "planar":
                msg = "a (N_x, N_y) element count requires kind='planar'"
                raise ValueError(msg)
            return self.n_elements
        if self.kind == "planar":
            msg = "planar arrays need an (N_x, N_y) element count"
            raise ValueError(msg)
        return (self.n_elements, 1)

    @property
    def element_count(self) -> int:
        n_x, n_y = self.shape
        return n_x * n_y

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def spacing_m(self) -> float:
        return self.spacing_wavelengths * self.wavelength_m

    def element_indices(self) -> tuple[IntArray, IntArray]:
        """Zero-based (i, j) grid indices, flattened x-major (k = i*N_y + j)."""
        n_x, n_y = self.shape
        ix, iy = np.meshgrid(np.arange(n_x), np.arange(n_y), indexing="ij")
        return ix.ravel().astype(np.int64), iy.ravel().astype(np.int64)


@dataclass(frozen=True, eq=False)
class TapConfig:
    """
    Per-element gain, delay and phase taps of a combiner.

    Attributes:
        gains: Amplitudes alpha_n (nonnegative, 1 for a nominal combiner)
        delays_s: Delay taps tau_n in seconds
        phases_rad: Phase taps phi_n in radians
    """

    gains: FloatArray
    delays_s: FloatArray
    phases_rad: FloatArray

    def __post_init__(self) -> None:
        for name in ("gains", "delays_s", "phases_rad"):
            object.__setattr__(self, name, readonly(getattr(self, name)))

        sizes = {self.gains.size, self.delays_s.size, self.phases_rad.size}
        if len(sizes) != 1:
            msg = "gains, delays_s and phases_rad must have the same length"
            raise DimensionError(msg)
        if np.any(self.gains < 0):
            msg = "gains must be nonnegative"
            raise ValueError(msg)

    @classmethod
    def nominal(
        cls,
        n_elements: int,
        *,
        delays_s: npt.ArrayLike | None = None,
        phases_rad: npt.ArrayLike | None = None,
    ) -> "TapConfig":
        zeros = np.zeros(n_elements)
        return cls(
            gains=np.ones(n_elements),
            delays_s=zeros if delays_s is None else delays_s,
            phases_rad=zeros if phases_rad is None else phases_rad,
        )

    @property
    def element_count(self) -> int:
        return int(self.gains.size)


@dataclass(frozen=True, eq=False)
class SpatialResponse:
    """Array response a for one (frequency, direction) pair."""

    values: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", readonly(self.values, np.complex128))


def phase_difference(
    geometry: ArrayGeometry, angle_rad: float, freq_hz: float
) -> float:
    """Inter-element phase 2*pi*f*d*sin(theta)/c of a wave arriving from angle_rad."""
    check_angles(angle_rad)
    if not freq_hz > 0:
        msg = "freq_hz must be positive"
        raise ValueError(msg)
    delay_s = geometry.spacing_m * np.sin(angle_rad) / SPEED_OF_LIGHT
    return float(2 * np.pi * freq_hz * delay_s)


def response_matrix(
    geometry: ArrayGeometry,
    angles_rad: npt.ArrayLike,
    freqs_hz: npt.ArrayLike,
    *,
    azimuth_rad: npt.ArrayLike = 0.0,
    frequency_flat: bool = False,
) -> ComplexArray:
    """
    Responses for every (direction, frequency) pair, shape (A, F, N).

    For planar arrays angles_rad is the angle from broadside and azimuth_rad the
    angle in the array plane, giving direction cosines u = sin(theta)cos(phi),
    v = sin(theta)sin(phi). With frequency_flat the response is evaluated at the
    carrier for every frequency.
    """
    angles = np.atleast_1d(np.asarray(angles_rad, dtype=float))
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
    check_angles(angles)
    if np.any(freqs <= 0):
        msg = "frequencies must be positive"
        raise ValueError(msg)
    if frequency_flat:
        freqs = np.full_like(freqs, geometry.carrier_hz)

    azimuth = np.broadcast_to(np.asarray(azimuth_rad, dtype=float), angles.shape)
    u = np.sin(angles) * np.cos(azimuth)
    v = np.sin(angles) * np.sin(azimuth)

    ix, iy = geometry.element_indices()
    wavenumber = 2 * np.pi * freqs * geometry.spacing_m / SPEED_OF_LIGHT
    path = u[:, None] * ix[None, :] + v[:, None] * iy[None, :]
    phase = wavenumber[None, :, None] * path[:, None, :]
    return np.exp(-1j * phase)


def spatial_response(
    geometry: ArrayGeometry,
    angle_rad: float,
    freq_hz: float,
    *,
    azimuth_rad: float = 0.0,
    frequency_flat: bool = False,
) -> SpatialResponse:
    values = response_matrix(
        geometry,
        angle_rad,
        freq_hz,
        azimuth_rad=azimuth_rad,
        frequency_flat=frequency_flat,
    )
    return SpatialResponse(values[0, 0])


def _steering_path(
    geometry: ArrayGeometry, angle_rad: float, azimuth_rad: float
) -> FloatArray:
    """Per-element path difference in metres toward a direction."""
    check_angles(angle_rad)
    ix, iy = geometry.element_indices()
    u = np.sin(angle_rad) * np.cos(azimuth_rad)
    v = np.sin(angle_rad) * np.sin(azimuth_rad)
    return (ix * u + iy * v) * geometry.spacing_m


def ps_combiner(
    geometry: ArrayGeometry, steer_angle_rad: float, *, azimuth_rad: float = 0.0
) -> TapConfig:
    """Phase-shifter combiner matched to steer_angle_rad at the carrier."""
    path = _steering_path(geometry, steer_angle_rad, azimuth_rad)
    phases = 2 * np.pi * path / geometry.wavelength_m
    return TapConfig.nominal(geometry.element_count, phases_rad=phases)


def ttd_combiner(
    geometry: ArrayGeometry, steer_angle_rad: float, *, azimuth_rad: float = 0.0
) -> TapConfig:
    """
    Delay-matched combiner that stays on target across the band.

    Delays equal the geometric delays d*n*sin(theta)/c. Baseband delays only
    rotate the (f - f_c) part of the phase, so each branch also carries the LO
    compensation phase 2*pi*f_c*tau_n.
    """
    delays = _steering_path(geometry, steer_angle_rad, azimuth_rad) / SPEED_OF_LIGHT
    phases = 2 * np.pi * geometry.carrier_hz * delays
    return TapConfig.nominal(geometry.element_count, delays_s=delays, phases_rad=phases)


def combiner_weights(
    taps: TapConfig,
    freq_hz: npt.ArrayLike,
    carrier_hz: float,
    *,
    delay_model: DelayModel = "baseband",
) -> ComplexArray:
    """Combiner weights at each frequency, shape freq.shape + (N,)."""
    freqs = np.asarray(freq_hz, dtype=float)
    reference = freqs - carrier_hz if delay_model == "baseband" else freqs
    phase = (
        2 * np.pi * reference[..., None] * taps.delays_s + taps.phases_rad
    )
    return taps.gains * np.exp(-1j * phase)


def gain_pattern(
    taps: TapConfig,
    geometry: ArrayGeometry,
    angles_rad: npt.ArrayLike,
    freqs_hz: npt.ArrayLike,
    *,
    azimuth_rad: npt.ArrayLike = 0.0,
    frequency_flat: bool = False,
    delay_model: DelayModel = "baseband",
) -> FloatArray:
    """|w(f)^H a(theta, f)| on a direction x frequency grid, shape (A, F)."""
    if taps.element_count != geometry.element_count:
        msg = (
            f"taps describe {taps.element_count} elements, "
            f"geometry has {geometry.element_count}"
        )
        raise DimensionError(msg)

    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
    weights = combiner_weights(
        taps, freqs, geometry.carrier_hz, delay_model=delay_model
    )
    responses = response_matrix(
        geometry,
        angles_rad,
        freqs,
        azimuth_rad=azimuth_rad,
        frequency_flat=frequency_flat,
    )
    return np.abs(np.einsum("fn,afn->af", weights.conj(), responses))


def beamforming_gain(
    taps: TapConfig,
    geometry: ArrayGeometry,
    angle_rad: float,
    freq_hz: float,
    *,
    azimuth_rad: float = 0.0,
    frequency_flat: bool = False,
    delay_model: DelayModel = "baseband",
) -> float:
    """|w^H a| for one direction and frequency; N when the combiner is matched."""
    pattern = gain_pattern(
        taps,
        geometry,
        angle_rad,
        freq_hz,
        azimuth_rad=azimuth_rad,
        frequency_flat=frequency_flat,
        delay_model=delay_model,
    )
    return float(pattern[0, 0])
