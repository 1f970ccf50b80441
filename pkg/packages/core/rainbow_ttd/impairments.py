"""Statistical tap errors and Monte Carlo sensitivity sweeps."""

import logging
import math

from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np
import numpy.typing as npt

from rainbow_ttd.array import DelayModel, TapConfig
from rainbow_ttd.seeding import ProgressCallback, Seed, make_rng


if TYPE_CHECKING:
    from rainbow_ttd.config import ScenarioConfig
    from rainbow_ttd.simulation import TrialRecord


logger = logging.getLogger(__name__)

SweepAxis = Literal["gain", "phase", "delay"]

# Display unit of each sweep axis; grids are given in these units.
AXIS_UNITS: dict[str, str] = {"gain": "dB", "phase": "deg", "delay": "ps"}
MIN_SWEEP_TRIALS = 100


@dataclass(frozen=True)
class ImpairmentSpec:
    """
    Standard deviations of per-element tap errors.

    Attributes:
        sigma_delay_s: Gaussian delay error sigma_T
        sigma_phase_rad: Gaussian phase error sigma_P
        sigma_gain_db: Log-normal gain error, std of 10 log10(alpha)
        delay_model: Whether delays act at baseband (f - f_c) or RF (f)
        redraw_per_trial: Draw new errors every trial (else one draw per sweep point)
    """

    sigma_delay_s: float = 0.0
    sigma_phase_rad: float = 0.0
    sigma_gain_db: float = 0.0
    delay_model: DelayModel = "baseband"
    redraw_per_trial: bool = True

    def __post_init__(self) -> None:
        for name in ("sigma_delay_s", "sigma_phase_rad", "sigma_gain_db"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                msg = f"{name} must be finite and nonnegative, got {value!r}"
                raise ValueError(msg)
        if self.delay_model not in ("baseband", "rf"):
            msg = f"unknown delay model {self.delay_model!r}"
            raise ValueError(msg)

    @property
    def is_nominal(self) -> bool:
        return self.sigma_delay_s == self.sigma_phase_rad == self.sigma_gain_db == 0

    @classmethod
    def along(
        cls,
        axis: SweepAxis,
        value: float,
        *,
        delay_model: DelayModel = "baseband",
        redraw_per_trial: bool = True,
    ) -> "ImpairmentSpec":
        """Impairments along one axis only, value in that axis' display unit."""
        if axis == "gain":
            return cls(
                sigma_gain_db=value,
                delay_model=delay_model,
                redraw_per_trial=redraw_per_trial,
            )
        if axis == "phase":
            return cls(
                sigma_phase_rad=math.radians(value),
                delay_model=delay_model,
                redraw_per_trial=redraw_per_trial,
            )
        if axis == "delay":
            return cls(
                sigma_delay_s=value * 1e-12,
                delay_model=delay_model,
                redraw_per_trial=redraw_per_trial,
            )
        msg = f"unknown sweep axis {axis!r}; expected gain, phase or delay"
        raise ValueError(msg)


def perturb_taps(taps: TapConfig, spec: ImpairmentSpec, rng_seed: Seed) -> TapConfig:
    """
    Draw impaired taps, independent across elements.

    delay ~ N(tau_n, sigma_T^2), phase ~ N(phi_n, sigma_P^2), and the gain is
    multiplied by alpha with 10 log10(alpha) ~ N(0, sigma_A^2). All three are
    always drawn in that order, so zero sigmas return the taps unchanged.
    """
    rng = make_rng(rng_seed)
    n = taps.element_count
    delays = rng.normal(taps.delays_s, spec.sigma_delay_s, n)
    phases = rng.normal(taps.phases_rad, spec.sigma_phase_rad, n)
    gain_db = rng.normal(0.0, spec.sigma_gain_db, n)
    return TapConfig(
        gains=taps.gains * 10 ** (gain_db / 10),
        delays_s=delays,
        phases_rad=phases,
    )


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep, with the trials behind its RMSE."""

    grid_value: float
    unit: str
    coarse_rmse_deg: float
    refined_rmse_deg: float
    spec: ImpairmentSpec = ImpairmentSpec()
    records: "tuple[TrialRecord, ...]" = ()


def sensitivity_sweep(
    scenario: "ScenarioConfig",
    axis: SweepAxis,
    grid: npt.ArrayLike,
    trials: int,
    rng_seed: int,
    *,
    progress: ProgressCallback | None = None,
) -> list[SweepRow]:
    """
    RMSE of both estimators along one impairment axis, others at zero.

    Every grid point reuses trial seeds rng_seed + i, so points differ only in
    the tap errors.
    """
    from rainbow_ttd.simulation import TrainingSimulation, summarize_trials

    if axis not in AXIS_UNITS:
        msg = f"unknown sweep axis {axis!r}; expected gain, phase or delay"
        raise ValueError(msg)
    if trials < MIN_SWEEP_TRIALS:
        msg = f"sensitivity sweeps need at least {MIN_SWEEP_TRIALS} trials"
        raise ValueError(msg)

    values = np.atleast_1d(np.asarray(grid, dtype=float))
    simulation = TrainingSimulation(scenario, base_seed=rng_seed)
    base = scenario.impairments
    total = values.size * trials
    done = 0

    def tick(_: int, __: int) -> None:
        nonlocal done
        done += 1
        if progress is not None:
            progress(done, total)

    rows = []
    for value in values:
        spec = ImpairmentSpec.along(
            axis,
            float(value),
            delay_model=base.delay_model,
            redraw_per_trial=base.redraw_per_trial,
        )
        records = simulation.run_trials(trials, spec, progress=tick)
        summary = summarize_trials(records)
        logger.debug(
            "%s sigma=%g %s: coarse %.3f deg, refined %.3f deg",
            axis,
            value,
            AXIS_UNITS[axis],
            summary.coarse_rmse_deg,
            summary.refined_rmse_deg,
        )
        rows.append(
            SweepRow(
                grid_value=float(value),
                unit=AXIS_UNITS[axis],
                coarse_rmse_deg=summary.coarse_rmse_deg,
                refined_rmse_deg=summary.refined_rmse_deg,
                spec=spec,
                records=tuple(records),
            )
        )
    return rows
