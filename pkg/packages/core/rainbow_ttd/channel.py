"""Narrowband per-subcarrier channels, link budget and received training signal.

Noise is referenced to sigma_N^2 per receive element; a LOS amplitude |g|
therefore fixes the element-level SNR |g|^2 / sigma_N^2.
"""

import logging
import math

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from rainbow_ttd.array import (
    ArrayGeometry,
    ComplexArray,
    DelayModel,
    FloatArray,
    TapConfig,
    check_angles,
    combiner_weights,
    response_matrix,
)
from rainbow_ttd.codebook import RainbowCodebook
from rainbow_ttd.exceptions import DimensionError
from rainbow_ttd.seeding import Seed, make_rng


logger = logging.getLogger(__name__)

ChannelModel = Literal["single_path_los", "multipath"]
PathLossKind = Literal["free_space", "log_distance"]


@dataclass(frozen=True)
class PathLossModel:
    """
    Large-scale loss model.

    log_distance: PL[dB] = ref_loss_db + 10 * exponent * log10(d / 1 m).
    The defaults put the single-path detection limit of the 16 x 128 scenario
    near 170 m; they are a calibration, not a measured NLOS model.
    """

    kind: PathLossKind = "log_distance"
    exponent: float = 3.0
    ref_loss_db: float = 91.3

    def __post_init__(self) -> None:
        if self.kind not in ("free_space", "log_distance"):
            msg = f"unknown path-loss model {self.kind!r}"
            raise ValueError(msg)
        if not self.exponent > 0:
            msg = "path-loss exponent must be positive"
            raise ValueError(msg)


@dataclass(frozen=True)
class LinkBudget:
    """
    Link-level operating point.

    Attributes:
        tx_power_w: Transmit power P_T
        distance_m: Link distance d
        noise_psd_w_per_hz: Noise spectral density N_0
        bandwidth_hz: Signal bandwidth BW
        m_total: OFDM grid size M_tot
        n_tx: Transmit elements N_T (G_T = N_T^2)
        n_rx: Receive elements N_R (G_R = N_R^2)
        carrier_hz: Carrier f_c (sets lambda for free space)
        pathloss: Large-scale loss model
    """

    tx_power_w: float
    distance_m: float
    noise_psd_w_per_hz: float
    bandwidth_hz: float
    m_total: int
    n_tx: int
    n_rx: int
    carrier_hz: float = 60e9
    pathloss: PathLossModel = field(default_factory=PathLossModel)

    def __post_init__(self) -> None:
        positives = {
            "tx_power_w": self.tx_power_w,
            "distance_m": self.distance_m,
            "noise_psd_w_per_hz": self.noise_psd_w_per_hz,
            "bandwidth_hz": self.bandwidth_hz,
            "carrier_hz": self.carrier_hz,
        }
        for name, value in positives.items():
            if not value > 0:
                msg = f"{name} must be positive"
                raise ValueError(msg)
        if self.m_total < 2 or self.n_tx < 1 or self.n_rx < 1:
            msg = "m_total must be >= 2 and array sizes >= 1"
            raise ValueError(msg)

    @property
    def subcarrier_spacing_hz(self) -> float:
        """Delta BW = BW / (M_tot - 1)."""
        return self.bandwidth_hz / (self.m_total - 1)

    @property
    def wavelength_m(self) -> float:
        return 299_792_458.0 / self.carrier_hz

    @property
    def array_gain(self) -> float:
        """G_T * G_R in linear scale."""
        return float(self.n_tx**2 * self.n_rx**2)

    def at_distance(self, distance_m: float) -> "LinkBudget":
        return LinkBudget(
            self.tx_power_w,
            distance_m,
            self.noise_psd_w_per_hz,
            self.bandwidth_hz,
            self.m_total,
            self.n_tx,
            self.n_rx,
            self.carrier_hz,
            self.pathloss,
        )


def path_gain(budget: LinkBudget) -> float:
    """Linear large-scale power gain (1 / path loss)."""
    model = budget.pathloss
    if model.kind == "free_space":
        return (budget.wavelength_m / (4 * math.pi * budget.distance_m)) ** 2
    loss_db = model.ref_loss_db + 10 * model.exponent * math.log10(budget.distance_m)
    return 10 ** (-loss_db / 10)


def snr_per_subcarrier(budget: LinkBudget, loaded_count: int) -> float:
    """G_T G_R * PL * P_T / (Delta BW * N_0 * M), linear."""
    if not 1 <= loaded_count <= budget.m_total:
        msg = f"loaded_count must lie in [1, {budget.m_total}]"
        raise ValueError(msg)
    noise_w = budget.subcarrier_spacing_hz * budget.noise_psd_w_per_hz
    return (
        budget.array_gain
        * path_gain(budget)
        * budget.tx_power_w
        / (noise_w * loaded_count)
    )


def element_snr(budget: LinkBudget, loaded_count: int) -> float:
    """Per-element, per-subcarrier SNR |g|^2 / sigma_N^2 before any array gain."""
    return snr_per_subcarrier(budget, loaded_count) / budget.array_gain


def matched_precoder(geometry_tx: ArrayGeometry, aod_rad: float) -> ComplexArray:
    """Frequency-flat precoder a_T(psi) at the carrier, so |a_T^H v| = N_T."""
    return response_matrix(geometry_tx, aod_rad, geometry_tx.carrier_hz)[0, 0]


@dataclass(frozen=True)
class MultipathSpec:
    """
    Extra scattered paths on top of the LOS path.

    Angles are uniform in sine, gains complex Gaussian at relative_power_db
    below the LOS power, excess delays uniform in [0, max_excess_delay_s].
    """

    extra_paths: int = 0
    relative_power_db: float = -10.0
    max_excess_delay_s: float = 0.0

    def __post_init__(self) -> None:
        if self.extra_paths < 0 or self.max_excess_delay_s < 0:
            msg = "extra_paths and max_excess_delay_s must be nonnegative"
            raise ValueError(msg)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    One drop of the channel on the loaded subcarriers.

    per_subcarrier has shape (M, N_R, N_T). Path 0 is the LOS path.
    """

    per_subcarrier: ComplexArray
    freqs_hz: FloatArray
    aoa_rad: float
    aod_rad: float
    path_gains: ComplexArray
    path_aoas_rad: FloatArray
    path_aods_rad: FloatArray
    path_delays_s: FloatArray
    model: ChannelModel

    @property
    def shape(self) -> tuple[int, int]:
        _, n_rx, n_tx = self.per_subcarrier.shape
        return n_rx, n_tx


def realize_channel(
    geometry_rx: ArrayGeometry,
    geometry_tx: ArrayGeometry,
    aoa_rad: float,
    aod_rad: float,
    budget: LinkBudget | float,
    loaded_freqs: npt.ArrayLike,
    rng_seed: Seed,
    *,
    multipath: MultipathSpec | None = None,
    frequency_flat: bool = False,
    noise_var: float = 1.0,
) -> ChannelRealization:
    """
    Build H[m] = sum_p g_p exp(-j 2 pi (f_m - f_c) tau_p) a_R(theta_p) a_T(psi_p)^H.

    budget is either a LinkBudget (|g|^2 = element SNR * noise_var) or the LOS
    amplitude |g| itself. The LOS phase is uniform.
    """
    check_angles([aoa_rad, aod_rad])
    freqs = np.atleast_1d(np.asarray(loaded_freqs, dtype=float))
    rng = make_rng(rng_seed)
    multipath = multipath or MultipathSpec()

    if isinstance(budget, LinkBudget):
        amplitude = math.sqrt(element_snr(budget, freqs.size) * noise_var)
    else:
        amplitude = float(budget)

    los = amplitude * np.exp(2j * np.pi * rng.random())
    extra = multipath.extra_paths
    scatter_std = amplitude * 10 ** (multipath.relative_power_db / 20)
    scattered = (
        scatter_std
        * (rng.standard_normal(extra) + 1j * rng.standard_normal(extra))
        / math.sqrt(2)
    )
    gains = np.concatenate([[los], scattered])
    aoas = np.concatenate([[aoa_rad], np.arcsin(rng.uniform(-1, 1, extra))])
    aods = np.concatenate([[aod_rad], np.arcsin(rng.uniform(-1, 1, extra))])
    excess = rng.uniform(0, multipath.max_excess_delay_s, extra)
    delays = np.concatenate([[0.0], excess])

    rx = response_matrix(geometry_rx, aoas, freqs, frequency_flat=frequency_flat)
    tx = response_matrix(geometry_tx, aods, freqs, frequency_flat=frequency_flat)
    baseband = freqs - geometry_rx.carrier_hz
    taps = gains[:, None] * np.exp(-2j * np.pi * delays[:, None] * baseband[None, :])
    per_subcarrier = np.einsum("pm,pmr,pmt->mrt", taps, rx, tx.conj())

    return ChannelRealization(
        per_subcarrier=per_subcarrier,
        freqs_hz=freqs,
        aoa_rad=aoa_rad,
        aod_rad=aod_rad,
        path_gains=gains,
        path_aoas_rad=aoas,
        path_aods_rad=aods,
        path_delays_s=delays,
        model="single_path_los" if extra == 0 else "multipath",
    )


def _combiner_for(
    book: RainbowCodebook,
    channel: ChannelRealization,
    taps: TapConfig | None,
    delay_model: DelayModel,
) -> ComplexArray:
    taps = book.taps if taps is None else taps
    n_rx, _ = channel.shape
    if taps.element_count != n_rx:
        msg = (
            f"combiner has {taps.element_count} taps, "
            f"channel has {n_rx} receive elements"
        )
        raise DimensionError(msg)
    if channel.freqs_hz.size != book.loaded_count:
        msg = (
            f"channel covers {channel.freqs_hz.size} subcarriers, "
            f"codebook loads {book.loaded_count}"
        )
        raise DimensionError(msg)
    if delay_model == "rf":
        book.check_rf_alignment()
    return combiner_weights(
        taps, channel.freqs_hz, book.carrier_hz, delay_model=delay_model
    )


def combined_signal(
    book: RainbowCodebook,
    channel: ChannelRealization,
    precoder: npt.ArrayLike,
    pilots: npt.ArrayLike,
    *,
    taps: TapConfig | None = None,
    delay_model: DelayModel = "baseband",
) -> ComplexArray:
    """Noiseless w^H[m] H[m] v s[m] on every loaded subcarrier."""
    v = np.asarray(precoder, dtype=np.complex128)
    s = np.asarray(pilots, dtype=np.complex128)
    _, n_tx = channel.shape
    if v.shape != (n_tx,):
        msg = f"precoder must have {n_tx} entries, got shape {v.shape}"
        raise DimensionError(msg)
    if s.shape != (book.loaded_count,):
        msg = f"pilots must have {book.loaded_count} entries, got shape {s.shape}"
        raise DimensionError(msg)

    weights = _combiner_for(book, channel, taps, delay_model)
    effective = channel.per_subcarrier @ v
    return np.einsum("mr,mr->m", weights.conj(), effective) * s


def received_signal(
    book: RainbowCodebook,
    channel: ChannelRealization,
    precoder: npt.ArrayLike,
    pilots: npt.ArrayLike,
    noise_var: float,
    rng_seed: Seed,
    *,
    taps: TapConfig | None = None,
    delay_model: DelayModel = "baseband",
) -> ComplexArray:
    """
    Y[m] = w^H[m] H[m] v s[m] + w^H[m] n[m].

    taps overrides the codebook's own taps (impaired hardware); noise is
    circularly symmetric with variance noise_var per element and subcarrier.
    """
    if noise_var < 0:
        msg = "noise_var must be nonnegative"
        raise ValueError(msg)

    signal = combined_signal(
        book, channel, precoder, pilots, taps=taps, delay_model=delay_model
    )
    if noise_var == 0:
        return signal

    rng = make_rng(rng_seed)
    weights = _combiner_for(book, channel, taps, delay_model)
    noise = math.sqrt(noise_var / 2) * (
        rng.standard_normal(weights.shape) + 1j * rng.standard_normal(weights.shape)
    )
    return signal + np.einsum("mr,mr->m", weights.conj(), noise)


@dataclass(frozen=True)
class PostCombiningPowers:
    signal_w: float
    noise_w: float

    @property
    def snr(self) -> float:
        return self.signal_w / self.noise_w


def post_combining_powers(
    book: RainbowCodebook,
    channel: ChannelRealization,
    precoder: npt.ArrayLike,
    pilots: npt.ArrayLike,
    noise_var: float,
    *,
    taps: TapConfig | None = None,
    delay_model: DelayModel = "baseband",
) -> PostCombiningPowers:
    """Total signal and expected noise power summed over the loaded subcarriers."""
    signal = combined_signal(
        book, channel, precoder, pilots, taps=taps, delay_model=delay_model
    )
    weights = _combiner_for(book, channel, taps, delay_model)
    return PostCombiningPowers(
        signal_w=float(np.sum(np.abs(signal) ** 2)),
        noise_w=float(noise_var * np.sum(np.abs(weights) ** 2)),
    )


def detect_signal(signal_power_total: float, noise_power_total: float) -> bool:
    """Detectable unless total post-combining signal power is below the noise."""
    return not signal_power_total < noise_power_total


def effective_channel(
    channel: ChannelRealization,
    geometry_rx: ArrayGeometry,
    geometry_tx: ArrayGeometry,
    precoder: npt.ArrayLike,
    freqs_hz: npt.ArrayLike,
    *,
    frequency_flat: bool = False,
) -> ComplexArray:
    """
    Precoded receive vectors H(f) v of the same paths on any frequency grid.

    Shape (F, N_R). Used where a full-band channel matrix would be too large.
    """
    freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
    v = np.asarray(precoder, dtype=np.complex128)
    rx = response_matrix(
        geometry_rx, channel.path_aoas_rad, freqs, frequency_flat=frequency_flat
    )
    tx = response_matrix(
        geometry_tx, channel.path_aods_rad, freqs, frequency_flat=frequency_flat
    )
    baseband = freqs - geometry_rx.carrier_hz
    taps = channel.path_gains[:, None] * np.exp(
        -2j * np.pi * channel.path_delays_s[:, None] * baseband[None, :]
    )
    transmit = tx.conj() @ v
    return np.einsum("pf,pfr,pf->fr", taps, rx, transmit)
