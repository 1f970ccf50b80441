"""Monte Carlo runtime for single-symbol rainbow beam training.

A TrainingSimulation fixes everything a scenario shares across trials (arrays,
codebook, dictionary, operating point). Trial i draws its truth, channel, tap
errors, pilots and noise from separate streams of SeedSequence(base_seed + i),
so a trial is reproducible on its own and paired across methods.
"""

import copy
import logging
import math

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from rainbow_ttd.array import (
    ArrayGeometry,
    ComplexArray,
    TapConfig,
    combiner_weights,
    ps_combiner,
)
from rainbow_ttd.channel import (
    ChannelRealization,
    detect_signal,
    effective_channel,
    element_snr,
    matched_precoder,
    post_combining_powers,
    realize_channel,
    received_signal,
)
from rainbow_ttd.codebook import build_rainbow_taps
from rainbow_ttd.config import ScenarioConfig, load_config
from rainbow_ttd.estimation import build_gain_dictionary, estimate, rmse
from rainbow_ttd.impairments import ImpairmentSpec, perturb_taps
from rainbow_ttd.seeding import ProgressCallback, TrialStreams, trial_streams
from rainbow_ttd.waveform import constellation_points, subcarrier_offsets


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial; angles in radians."""

    trial: int
    truth_rad: float
    coarse_rad: float
    refined_rad: float
    detected: bool
    snr_db: float


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    coarse_rmse_deg: float
    refined_rmse_deg: float
    detected_fraction: float


# Per-trial table: angles in deg, sigma_a in dB, sigma_p in deg, sigma_t in ps.
TRIAL_COLUMNS = (
    "trial",
    "truth_deg",
    "coarse_deg",
    "refined_deg",
    "snr_db",
    "sigma_a",
    "sigma_p",
    "sigma_t",
)


def trial_rows(
    records: Sequence[TrialRecord], impairment: ImpairmentSpec | None = None
) -> list[dict[str, Any]]:
    """One TRIAL_COLUMNS row per record, tagged with the tap error sigmas."""
    spec = ImpairmentSpec() if impairment is None else impairment
    return [
        {
            "trial": r.trial,
            "truth_deg": math.degrees(r.truth_rad),
            "coarse_deg": math.degrees(r.coarse_rad),
            "refined_deg": math.degrees(r.refined_rad),
            "snr_db": r.snr_db,
            "sigma_a": spec.sigma_gain_db,
            "sigma_p": math.degrees(spec.sigma_phase_rad),
            "sigma_t": spec.sigma_delay_s * 1e12,
        }
        for r in records
    ]


def summarize_trials(records: Sequence[TrialRecord]) -> TrialSummary:
    if not records:
        msg = "no trials to summarize"
        raise ValueError(msg)
    truth = [r.truth_rad for r in records]
    return TrialSummary(
        trials=len(records),
        coarse_rmse_deg=rmse([r.coarse_rad for r in records], truth),
        refined_rmse_deg=rmse([r.refined_rad for r in records], truth),
        detected_fraction=sum(r.detected for r in records) / len(records),
    )


@dataclass(frozen=True, eq=False)
class _Link:
    aoa_rad: float
    aod_rad: float
    channel: ChannelRealization
    precoder: ComplexArray


class TrainingSimulation:
    """Shared state of one scenario's Monte Carlo runs."""

    def __init__(self, config: ScenarioConfig, *, base_seed: int | None = None) -> None:
        self.config = config
        self.base_seed = config.base_seed if base_seed is None else base_seed

        arrays = config.arrays
        self.geometry_rx = ArrayGeometry.linear(arrays.n_rx, arrays.carrier_hz)
        self.geometry_tx = ArrayGeometry.linear(arrays.n_tx, arrays.carrier_hz)
        self.book = build_rainbow_taps(
            arrays.n_rx,
            config.ofdm.bandwidth_hz,
            config.codebook.diversity,
            math.radians(config.codebook.rotation_deg),
            loaded_count=config.ofdm.loaded_count,
            m_total=config.ofdm.m_total,
            carrier_hz=arrays.carrier_hz,
        )
        self.dictionary = build_gain_dictionary(
            self.book,
            self.geometry_rx,
            config.estimator.dictionary_size,
            metric=config.estimator.metric,
            frequency_flat=arrays.frequency_flat,
        )
        self.multipath = config.link.multipath.spec()
        self.noise_var = 1.0
        if config.link.snr_db is None:
            self.snr_linear = element_snr(
                config.link_budget(), config.ofdm.loaded_count
            )
        else:
            self.snr_linear = 10 ** (config.link.snr_db / 10)
        self.truth_limit_sine = math.sin(math.radians(config.estimator.truth_limit_deg))

    @property
    def snr_db(self) -> float:
        return 10 * math.log10(self.snr_linear)

    def at_distance(self, distance_m: float) -> "TrainingSimulation":
        """Same scenario with the element SNR of the link budget at distance_m."""
        budget = self.config.link_budget(distance_m)
        clone = copy.copy(self)
        clone.snr_linear = element_snr(budget, self.config.ofdm.loaded_count)
        return clone

    def _draw_link(self, streams: TrialStreams) -> _Link:
        limit = self.truth_limit_sine
        aoa = math.asin(streams.truth.uniform(-limit, limit))
        aod = math.asin(streams.truth.uniform(-limit, limit))
        channel = realize_channel(
            self.geometry_rx,
            self.geometry_tx,
            aoa,
            aod,
            math.sqrt(self.snr_linear * self.noise_var),
            self.book.loaded_freqs_hz(),
            streams.channel,
            multipath=self.multipath,
            frequency_flat=self.config.arrays.frequency_flat,
        )
        return _Link(aoa, aod, channel, matched_precoder(self.geometry_tx, aod))

    def fixed_taps(self, impairment: ImpairmentSpec) -> TapConfig:
        """One tap draw shared by every trial of a per-sweep-fixed run."""
        return perturb_taps(
            self.book.taps, impairment, trial_streams(self.base_seed, 0).impairment
        )

    def run_trial(
        self,
        trial: int,
        impairment: ImpairmentSpec | None = None,
        *,
        taps: TapConfig | None = None,
    ) -> TrialRecord:
        """
        One training symbol end to end: perturb, channel, receive, estimate.

        impairment defaults to the scenario's own; taps, when given, replaces
        the per-trial tap draw.
        """
        spec = self.config.impairments.spec() if impairment is None else impairment
        streams = trial_streams(self.base_seed, trial)
        link = self._draw_link(streams)
        if taps is None:
            taps = perturb_taps(self.book.taps, spec, streams.impairment)
        pilots = constellation_points(
            self.config.ofdm.constellation, self.book.loaded_count, streams.pilots
        )

        y = received_signal(
            self.book,
            link.channel,
            link.precoder,
            pilots,
            self.noise_var,
            streams.noise,
            taps=taps,
            delay_model=spec.delay_model,
        )
        result = estimate(y, self.book, self.dictionary, pilots=pilots)
        powers = post_combining_powers(
            self.book,
            link.channel,
            link.precoder,
            pilots,
            self.noise_var,
            taps=taps,
            delay_model=spec.delay_model,
        )
        refined = result.refined_angle_rad
        return TrialRecord(
            trial=trial,
            truth_rad=link.aoa_rad,
            coarse_rad=result.coarse_angle_rad,
            refined_rad=result.coarse_angle_rad if refined is None else refined,
            detected=detect_signal(powers.signal_w, powers.noise_w),
            snr_db=self.snr_db,
        )

    def run_trials(
        self,
        trials: int,
        impairment: ImpairmentSpec | None = None,
        *,
        progress: ProgressCallback | None = None,
    ) -> list[TrialRecord]:
        spec = self.config.impairments.spec() if impairment is None else impairment
        taps = None
        if not spec.redraw_per_trial:
            taps = self.fixed_taps(spec)

        records = []
        for trial in range(trials):
            records.append(self.run_trial(trial, spec, taps=taps))
            if progress is not None:
                progress(trial + 1, trials)
        return records

    def paa_sweep_trial(self, trial: int) -> TrialRecord:
        """
        Exhaustive phase-shifter sweep over the same draws as run_trial(trial).

        One fully loaded symbol per swept direction; the per-subcarrier SNR is
        M / M_tot of the sparse one since the power spreads over every bin.
        """
        streams = trial_streams(self.base_seed, trial)
        link = self._draw_link(streams)
        ofdm = self.config.ofdm
        freqs = self.geometry_rx.carrier_hz + subcarrier_offsets(
            np.arange(ofdm.m_total), ofdm.m_total, ofdm.bandwidth_hz
        )
        received = effective_channel(
            link.channel,
            self.geometry_rx,
            self.geometry_tx,
            link.precoder,
            freqs,
            frequency_flat=self.config.arrays.frequency_flat,
        )
        scale = math.sqrt(ofdm.loaded_count / ofdm.m_total)

        weights = np.stack(
            [
                combiner_weights(
                    ps_combiner(self.geometry_rx, d.angle_rad),
                    self.geometry_rx.carrier_hz,
                    self.geometry_rx.carrier_hz,
                )
                for d in self.book.directions
            ]
        )
        signal = scale * (weights.conj() @ received.T)
        noise_std = np.linalg.norm(weights, axis=1, keepdims=True) * math.sqrt(
            self.noise_var / 2
        )
        noise = noise_std * (
            streams.noise.standard_normal(signal.shape)
            + 1j * streams.noise.standard_normal(signal.shape)
        )
        beam_power = np.mean(np.abs(signal + noise) ** 2, axis=1)
        winner = int(np.argmax(beam_power))
        angle = self.book.directions[winner].angle_rad
        return TrialRecord(
            trial=trial,
            truth_rad=link.aoa_rad,
            coarse_rad=angle,
            refined_rad=angle,
            detected=True,
            snr_db=self.snr_db + 10 * math.log10(scale**2),
        )


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    overhead_symbols: int
    coarse_rmse_deg: float
    refined_rmse_deg: float | None
    records: tuple[TrialRecord, ...] = ()


def compare_sweeping(
    config: ScenarioConfig | str | Path,
    *,
    trials: int | None = None,
    progress: ProgressCallback | None = None,
) -> list[ComparisonRow]:
    """
    Paired TTD single-symbol training against exhaustive PAA beam sweeping.

    Both methods see identical truth and channel draws for every trial.
    """
    scenario = config if isinstance(config, ScenarioConfig) else load_config(config)
    count = scenario.trials if trials is None else trials
    simulation = TrainingSimulation(scenario)

    ttd, paa = [], []
    for trial in range(count):
        ttd.append(simulation.run_trial(trial))
        paa.append(simulation.paa_sweep_trial(trial))
        if progress is not None:
            progress(trial + 1, count)

    ttd_summary = summarize_trials(ttd)
    paa_summary = summarize_trials(paa)
    logger.debug(
        "Sweep comparison over %d trials: TTD %.3f deg, PAA %.3f deg",
        count,
        ttd_summary.coarse_rmse_deg,
        paa_summary.coarse_rmse_deg,
    )
    return [
        ComparisonRow(
            method="ttd",
            overhead_symbols=1,
            coarse_rmse_deg=ttd_summary.coarse_rmse_deg,
            refined_rmse_deg=ttd_summary.refined_rmse_deg,
            records=tuple(ttd),
        ),
        ComparisonRow(
            method="paa",
            overhead_symbols=simulation.book.direction_count,
            coarse_rmse_deg=paa_summary.coarse_rmse_deg,
            refined_rmse_deg=None,
            records=tuple(paa),
        ),
    ]
