"""OFDM training symbols with sparse subcarrier loading, and PAPR statistics.

Bin k of an M_tot-point grid sits at baseband offset k' * BW / M_tot, with
k' = k for k < M_tot/2 and k - M_tot otherwise (DC at bin 0, negative
frequencies wrapped). The codebook and channel modules use the same mapping
through subcarrier_offsets().
"""

import logging
import math

from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from scipy import stats

from rainbow_ttd.array import ComplexArray, FloatArray, IntArray, readonly
from rainbow_ttd.seeding import ProgressCallback, Seed, make_rng


logger = logging.getLogger(__name__)

Constellation = Literal["bpsk", "qpsk"]

# Symbols per CCDF batch; keeps a 4096-point batch near 32 MB.
_CCDF_BATCH = 512


def subcarrier_offsets(
    indices: npt.ArrayLike, m_total: int, bandwidth_hz: float
) -> FloatArray:
    """Baseband offset f - f_c in Hz of each grid bin."""
    bins = np.asarray(indices, dtype=np.int64)
    if np.any((bins < 0) | (bins >= m_total)):
        msg = f"subcarrier indices must lie in [0, {m_total})"
        raise ValueError(msg)
    signed = np.where(bins < m_total / 2, bins, bins - m_total)
    return signed * (bandwidth_hz / m_total)


def uniform_loading(m_total: int, loaded_count: int) -> IntArray:
    """Loaded bins spread at stride M_tot / M across the whole grid."""
    if not 1 <= loaded_count <= m_total:
        msg = f"loaded_count must lie in [1, {m_total}], got {loaded_count}"
        raise ValueError(msg)
    if m_total % loaded_count:
        msg = f"loaded_count {loaded_count} must divide m_total {m_total}"
        raise ValueError(msg)
    return np.arange(loaded_count, dtype=np.int64) * (m_total // loaded_count)


@dataclass(frozen=True, eq=False)
class OfdmSpec:
    """
    One OFDM symbol layout.

    Attributes:
        m_total: FFT size M_tot
        loaded_indices: Sorted, distinct loaded bins (M of them)
        bandwidth_hz: Occupied bandwidth BW
        cp_len: Cyclic prefix length in samples
        constellation: Pilot constellation on loaded bins
    """

    m_total: int
    loaded_indices: IntArray
    bandwidth_hz: float
    cp_len: int = 128
    constellation: Constellation = "qpsk"

    def __post_init__(self) -> None:
        indices = readonly(self.loaded_indices, np.int64)
        object.__setattr__(self, "loaded_indices", indices)

        if self.m_total < 1:
            msg = "m_total must be positive"
            raise ValueError(msg)
        if indices.size == 0:
            msg = "at least one subcarrier must be loaded"
            raise ValueError(msg)
        if np.any(np.diff(indices) <= 0):
            msg = "loaded_indices must be sorted and distinct"
            raise ValueError(msg)
        if indices[0] < 0 or indices[-1] >= self.m_total:
            msg = f"loaded_indices must lie in [0, {self.m_total})"
            raise ValueError(msg)
        if not 0 <= self.cp_len < self.m_total:
            msg = f"cp_len must lie in [0, {self.m_total})"
            raise ValueError(msg)
        if not self.bandwidth_hz > 0:
            msg = "bandwidth_hz must be positive"
            raise ValueError(msg)
        if self.constellation not in ("bpsk", "qpsk"):
            msg = f"unsupported constellation {self.constellation!r}"
            raise ValueError(msg)

    @classmethod
    def sparse(
        cls,
        m_total: int,
        loaded_count: int,
        bandwidth_hz: float,
        *,
        cp_len: int = 128,
        constellation: Constellation = "qpsk",
    ) -> "OfdmSpec":
        return cls(
            m_total,
            uniform_loading(m_total, loaded_count),
            bandwidth_hz,
            cp_len,
            constellation,
        )

    @classmethod
    def full(
        cls,
        m_total: int,
        bandwidth_hz: float,
        *,
        cp_len: int = 128,
        constellation: Constellation = "qpsk",
    ) -> "OfdmSpec":
        return cls.sparse(
            m_total,
            m_total,
            bandwidth_hz,
            cp_len=cp_len,
            constellation=constellation,
        )

    @property
    def loaded_count(self) -> int:
        return int(self.loaded_indices.size)

    @property
    def bin_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.m_total

    def loaded_offsets_hz(self) -> FloatArray:
        return subcarrier_offsets(self.loaded_indices, self.m_total, self.bandwidth_hz)


def constellation_points(
    constellation: Constellation, shape: int | tuple[int, ...], rng: np.random.Generator
) -> ComplexArray:
    """Uniform random unit-energy symbols."""
    if constellation == "bpsk":
        return (2.0 * rng.integers(0, 2, size=shape) - 1).astype(np.complex128)
    bits = 2.0 * rng.integers(0, 2, size=(2, *np.atleast_1d(shape))) - 1
    return ((bits[0] + 1j * bits[1]) / math.sqrt(2)).reshape(shape)


def load_grid(
    spec: OfdmSpec,
    rng_seed: Seed,
    *,
    tx_power_w: float = 1.0,
    count: int | None = None,
) -> ComplexArray:
    """
    Frequency-domain grid(s) with pilots on the loaded bins.

    Loaded bins carry amplitude sqrt(P_T * M_tot / M), so the orthonormal IDFT
    body has mean power P_T whatever M is. With count set, returns a
    (count, M_tot) batch.
    """
    rng = make_rng(rng_seed)
    batch = () if count is None else (count,)
    grid = np.zeros((*batch, spec.m_total), dtype=np.complex128)
    scale = math.sqrt(tx_power_w * spec.m_total / spec.loaded_count)
    pilots = constellation_points(
        spec.constellation, (*batch, spec.loaded_count), rng
    )
    grid[..., spec.loaded_indices] = scale * pilots
    return grid


def modulate(
    grid: npt.ArrayLike, cp_len: int, *, oversampling: int = 1
) -> ComplexArray:
    """Orthonormal IDFT along the last axis, cyclic prefix prepended."""
    spectrum = np.asarray(grid, dtype=np.complex128)
    if oversampling < 1:
        msg = "oversampling must be >= 1"
        raise ValueError(msg)

    size = spectrum.shape[-1]
    if oversampling > 1:
        half = size // 2
        padded = np.zeros(
            (*spectrum.shape[:-1], size * oversampling), dtype=np.complex128
        )
        padded[..., :half] = spectrum[..., :half]
        padded[..., -(size - half) :] = spectrum[..., half:]
        body = np.fft.ifft(padded, norm="ortho", axis=-1) * math.sqrt(oversampling)
    else:
        body = np.fft.ifft(spectrum, norm="ortho", axis=-1)

    prefix = cp_len * oversampling
    if prefix == 0:
        return body
    return np.concatenate([body[..., -prefix:], body], axis=-1)


def generate_symbol(
    spec: OfdmSpec,
    rng_seed: Seed,
    *,
    tx_power_w: float = 1.0,
    oversampling: int = 1,
) -> ComplexArray:
    """One time-domain symbol of length (M_tot + cp_len) * oversampling."""
    grid = load_grid(spec, rng_seed, tx_power_w=tx_power_w)
    return modulate(grid, spec.cp_len, oversampling=oversampling)


def papr(symbol: npt.ArrayLike, *, prefix_len: int = 0) -> float:
    """10 log10(max|x|^2 / mean|x|^2), skipping the first prefix_len samples."""
    values = np.asarray(symbol, dtype=np.complex128).reshape(-1)[prefix_len:]
    if values.size == 0:
        msg = "papr needs a non-empty symbol"
        raise ValueError(msg)
    power = np.abs(values) ** 2
    mean = float(np.mean(power))
    if mean == 0:
        msg = "papr is undefined for an all-zero symbol"
        raise ValueError(msg)
    return 10 * math.log10(float(np.max(power)) / mean)


def _batch_papr(symbols: ComplexArray, prefix_len: int) -> FloatArray:
    power = np.abs(symbols[..., prefix_len:]) ** 2
    return 10 * np.log10(power.max(axis=-1) / power.mean(axis=-1))


@dataclass(frozen=True, eq=False)
class PaprCcdf:
    """Empirical PAPR distribution of independently drawn symbols."""

    samples_db: FloatArray
    constellation: Constellation
    loaded_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples_db", readonly(np.sort(self.samples_db)))

    def points(self) -> list[tuple[float, float]]:
        """(papr_db, Pr[PAPR > papr_db]) on the sorted sample grid."""
        n = self.samples_db.size
        exceed = (n - 1 - np.arange(n)) / n
        pairs = zip(self.samples_db, exceed, strict=True)
        return [(float(x), float(p)) for x, p in pairs]

    def ccdf_at(self, threshold_db: float) -> float:
        return float(np.mean(self.samples_db > threshold_db))

    def level_at(self, probability: float) -> float:
        """PAPR level exceeded with the given probability."""
        if not 0 < probability < 1:
            msg = "probability must lie in (0, 1)"
            raise ValueError(msg)
        return float(np.quantile(self.samples_db, 1 - probability))


def papr_ccdf(
    spec: OfdmSpec,
    trials: int,
    rng_seed: Seed,
    *,
    oversampling: int = 1,
    include_prefix: bool = True,
    progress: ProgressCallback | None = None,
) -> PaprCcdf:
    if trials < 1:
        msg = "trials must be positive"
        raise ValueError(msg)

    rng = make_rng(rng_seed)
    batch = max(1, _CCDF_BATCH // oversampling)
    prefix_len = 0 if include_prefix else spec.cp_len * oversampling
    samples: list[FloatArray] = []
    done = 0
    while done < trials:
        count = min(batch, trials - done)
        grid = load_grid(spec, rng, count=count)
        symbols = modulate(grid, spec.cp_len, oversampling=oversampling)
        samples.append(_batch_papr(symbols, prefix_len))
        done += count
        if progress is not None:
            progress(done, trials)

    logger.debug(
        "PAPR CCDF over %d symbols, M=%d of %d", trials, spec.loaded_count, spec.m_total
    )
    return PaprCcdf(np.concatenate(samples), spec.constellation, spec.loaded_count)


@dataclass(frozen=True)
class PaprGap:
    """Full-minus-sparse PAPR level at one CCDF probability, with a bootstrap CI."""

    probability: float
    gap_db: float
    ci_low_db: float
    ci_high_db: float


def papr_gap(
    sparse: PaprCcdf,
    full: PaprCcdf,
    probability: float = 1e-2,
    *,
    confidence: float = 0.95,
    n_resamples: int = 1000,
    rng_seed: Seed = 0,
) -> PaprGap:
    quantile = 1 - probability

    def statistic(
        full_db: FloatArray, sparse_db: FloatArray, axis: int = -1
    ) -> FloatArray:
        return np.asarray(
            np.quantile(full_db, quantile, axis=axis)
            - np.quantile(sparse_db, quantile, axis=axis)
        )

    gap = full.level_at(probability) - sparse.level_at(probability)
    result = stats.bootstrap(
        (full.samples_db, sparse.samples_db),
        statistic,
        n_resamples=n_resamples,
        batch=100,
        vectorized=True,
        confidence_level=confidence,
        method="percentile",
        rng=make_rng(rng_seed),
    )
    interval = result.confidence_interval
    return PaprGap(probability, gap, float(interval.low), float(interval.high))
