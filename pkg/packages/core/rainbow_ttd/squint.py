"""Closed-form beam-squint metrics for phase-shifter arrays."""

import logging
import math

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from scipy.optimize import brentq

from rainbow_ttd.array import (
    DEFAULT_CARRIER_HZ,
    ArrayGeometry,
    FloatArray,
    gain_pattern,
    ps_combiner,
)


logger = logging.getLogger(__name__)

# 3-dB beamwidth constant of a uniform aperture, 2 * 0.886
FBW_CONSTANT = 1.772
HALF_POWER = 1 / math.sqrt(2)
PLOTTED_ANGLE_LIMIT_RAD = math.radians(60)


@dataclass(frozen=True)
class SquintReport:
    """
    Pointing of a phase-shifter beam at one frequency.

    Attributes:
        intended_angle_rad: Direction the phase taps were set for (at f_c)
        freq_hz: Frequency the beam is evaluated at
        actual_angle_rad: Direction the beam points to at freq_hz
        error_rad: |actual - intended|
        clipped: The arcsine argument left [-1, 1] and was clipped
    """

    intended_angle_rad: float
    freq_hz: float
    actual_angle_rad: float
    error_rad: float
    clipped: bool


def squint_report(
    delta_phi_rad: float, freq_hz: float, carrier_hz: float
) -> SquintReport:
    if not freq_hz > 0:
        msg = "freq_hz must be positive"
        raise ValueError(msg)

    intended = math.asin(max(-1.0, min(1.0, delta_phi_rad / math.pi)))
    argument = (carrier_hz / freq_hz) * (delta_phi_rad / math.pi)
    clipped = abs(argument) > 1
    actual = math.asin(max(-1.0, min(1.0, argument)))

    return SquintReport(
        intended_angle_rad=intended,
        freq_hz=freq_hz,
        actual_angle_rad=actual,
        error_rad=abs(actual - intended),
        clipped=clipped,
    )


def intended_aoa(delta_phi_rad: float, freq_hz: float, carrier_hz: float) -> float:
    """Angle a phase difference delta_phi steers to at freq_hz (half-wavelength)."""
    report = squint_report(delta_phi_rad, freq_hz, carrier_hz)
    if report.clipped:
        logger.debug(
            "Arcsine argument clipped for delta_phi=%.4f at f/f_c=%.4f",
            delta_phi_rad,
            freq_hz / carrier_hz,
        )
    return report.actual_angle_rad


def max_angular_error(intended_angle_rad: float, fbw: float) -> float:
    """
    Worst-case pointing error over a band of fractional bandwidth fbw.

    Evaluated at the lower band edge f_c - BW/2, which dominates the upper one.
    """
    if not 0 < fbw < 2:
        msg = f"fractional bandwidth must lie in (0, 2), got {fbw}"
        raise ValueError(msg)
    if abs(intended_angle_rad) > PLOTTED_ANGLE_LIMIT_RAD:
        logger.debug(
            "Angle %.1f deg is beyond the +-60 deg range where the error is meaningful",
            math.degrees(intended_angle_rad),
        )

    delta_phi = math.pi * math.sin(intended_angle_rad)
    return squint_report(delta_phi, 1 - fbw / 2, 1.0).error_rad


def fractional_bandwidth_3db(n_elements: int, angle_rad: float) -> float:
    """1.772 / (N |sin(theta)|); infinite at broadside where there is no squint."""
    if n_elements < 2:
        msg = "fractional_bandwidth_3db needs at least two elements"
        raise ValueError(msg)
    sine = abs(math.sin(angle_rad))
    if sine == 0:
        return math.inf
    return FBW_CONSTANT / (n_elements * sine)


def gain_vs_frequency_curve(
    n_elements: int,
    steer_angle_rad: float,
    freq_grid: npt.ArrayLike,
    *,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
) -> FloatArray:
    """Normalised gain G(f)/N of a PS array steered (and evaluated) at steer_angle."""
    freqs = np.asarray(freq_grid, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        msg = "freq_grid must be a non-empty 1-D grid"
        raise ValueError(msg)
    if np.any(np.diff(freqs) <= 0):
        msg = "freq_grid must be strictly increasing"
        raise ValueError(msg)

    geometry = ArrayGeometry.linear(n_elements, carrier_hz)
    taps = ps_combiner(geometry, steer_angle_rad)
    gains = gain_pattern(taps, geometry, steer_angle_rad, freqs)[0]
    return gains / n_elements


def measure_fbw_3db(
    n_elements: int,
    angle_rad: float,
    *,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
) -> float:
    """Numerically measured 3-dB fractional width of G(f)/N around f_c."""
    sine = abs(math.sin(angle_rad))
    if sine == 0:
        return math.inf

    def excess(normalized_freq: float) -> float:
        curve = gain_vs_frequency_curve(
            n_elements, angle_rad, [normalized_freq * carrier_hz], carrier_hz=carrier_hz
        )
        return float(curve[0]) - HALF_POWER

    # Main lobe ends at the first null, 2 / (N |sin|) away in f/f_c.
    null_offset = 2 / (n_elements * sine)
    lower = max(1 - 0.999 * null_offset, 1e-6)
    upper = 1 + 0.999 * null_offset
    if excess(lower) >= 0 or excess(upper) >= 0:
        msg = f"no -3 dB crossing inside the band for N={n_elements}"
        raise ValueError(msg)

    f_low = brentq(excess, lower, 1.0, xtol=1e-12)
    f_high = brentq(excess, 1.0, upper, xtol=1e-12)
    return float(f_high - f_low)


def max_error_curve(
    angles_rad: npt.ArrayLike, fbws: npt.ArrayLike
) -> list[tuple[float, float, float]]:
    """Rows of (fbw, angle_deg, max_error_deg) for every fbw x angle pair."""
    rows = []
    for fbw in np.atleast_1d(np.asarray(fbws, dtype=float)):
        for angle in np.atleast_1d(np.asarray(angles_rad, dtype=float)):
            error = max_angular_error(float(angle), float(fbw))
            rows.append((float(fbw), math.degrees(angle), math.degrees(error)))
    return rows


def gain_curve_db(
    n_elements: int,
    steer_angle_rad: float,
    normalized_freqs: npt.ArrayLike,
    *,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
) -> FloatArray:
    """gain_vs_frequency_curve on an f/f_c grid, in dB (floored at -300 dB)."""
    grid = np.asarray(normalized_freqs, dtype=float) * carrier_hz
    curve = gain_vs_frequency_curve(
        n_elements, steer_angle_rad, grid, carrier_hz=carrier_hz
    )
    return 20 * np.log10(np.maximum(curve, 1e-15))
