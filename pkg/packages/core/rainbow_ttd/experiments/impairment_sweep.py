import math

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, JsonValue, model_validator

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.impairments import (
    AXIS_UNITS,
    MIN_SWEEP_TRIALS,
    SweepAxis,
    sensitivity_sweep,
)
from rainbow_ttd.simulation import TRIAL_COLUMNS, trial_rows


Sigmas = list[Annotated[float, Field(ge=0, allow_inf_nan=False)]]
Estimator = Literal["coarse", "refined"]

ESTIMATORS: tuple[Estimator, ...] = ("coarse", "refined")


class KneeCheck(BaseModel):
    """
    Bounds on one estimator's RMSE at level, as a multiple of its nominal RMSE.

    min_ratio marks a level where the estimator must have broken down,
    max_ratio one it must still tolerate.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    axis: SweepAxis
    level: float = Field(gt=0, allow_inf_nan=False)
    estimator: Estimator
    min_ratio: float | None = Field(None, gt=0)
    max_ratio: float | None = Field(None, gt=0)

    @property
    def key(self) -> str:
        unit = AXIS_UNITS[self.axis]
        return f"{self.estimator}_ratio_{self.axis}_{self.level:g}{unit}"


class ImpairmentSweepParams(ExperimentParams):
    """One grid of standard deviations per swept axis, in dB, deg and ps."""

    sweeps: dict[SweepAxis, Sigmas] = Field(
        default={
            "gain": [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            "phase": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0],
            "delay": [0.0, 1.5, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0],
        },
        min_length=1,
    )
    trials: int | None = Field(None, ge=MIN_SWEEP_TRIALS)
    knees: list[KneeCheck] = Field(default_factory=list)

    @model_validator(mode="after")
    def _knees_on_grid(self) -> "ImpairmentSweepParams":
        for knee in self.knees:
            grid = self.sweeps.get(knee.axis, [])
            if knee.level not in grid or 0.0 not in grid:
                msg = (
                    f"knee at {knee.axis}={knee.level:g} needs both 0 and "
                    f"{knee.level:g} on the {knee.axis} grid"
                )
                raise ValueError(msg)
        return self


class ImpairmentSweep(BaseExperiment[ImpairmentSweepParams]):
    """
    RMSE of the coarse and refined estimators along each impairment axis.

    The sweep table is long: one row per (error_type, level, estimator). Every
    trial behind it lands in the trials table with its sigmas.
    """

    name = "impairment-sweep"
    description = "Estimation RMSE versus TTD gain, phase and delay errors"
    params_model = ImpairmentSweepParams

    def run(self) -> ExperimentResult:
        p = self.params
        delay_model = self.config.impairments.delay_model
        trials = self.config.trials if p.trials is None else p.trials
        total = trials * sum(len(grid) for grid in p.sweeps.values())
        done = 0
        rows: list[dict[str, Any]] = []
        per_trial: list[dict[str, Any]] = []
        rmse_at: dict[tuple[str, float, str], float] = {}
        for axis, grid in p.sweeps.items():
            sweep = sensitivity_sweep(
                self.config,
                axis,
                grid,
                trials,
                self.config.base_seed,
                progress=self.progress_from(done, total),
            )
            done += trials * len(grid)
            for point in sweep:
                for estimator in ESTIMATORS:
                    value = getattr(point, f"{estimator}_rmse_deg")
                    rmse_at[axis, point.grid_value, estimator] = value
                    rows.append(
                        {
                            "error_type": axis,
                            "level": point.grid_value,
                            "estimator": estimator,
                            "rmse_deg": value,
                            "unit": point.unit,
                            "delay_model": delay_model,
                        }
                    )
                per_trial.extend(trial_rows(point.records, point.spec))

        summary: dict[str, JsonValue] = {
            "trials_per_point": trials,
            "delay_model": delay_model,
        }
        for axis, grid in p.sweeps.items():
            last = grid[-1]
            key = f"{axis}_{last:g}{AXIS_UNITS[axis]}"
            summary[f"coarse_rmse_deg_{key}"] = rmse_at[axis, last, "coarse"]
            summary[f"refined_rmse_deg_{key}"] = rmse_at[axis, last, "refined"]
            if 0.0 in grid:
                summary[f"refined_rmse_deg_{axis}_nominal"] = rmse_at[
                    axis, 0.0, "refined"
                ]
        for knee in p.knees:
            nominal = rmse_at[knee.axis, 0.0, knee.estimator]
            impaired = rmse_at[knee.axis, knee.level, knee.estimator]
            summary[knee.key] = impaired / nominal if nominal > 0 else math.inf

        return ExperimentResult(
            tables=(
                Table(
                    "impairment_sweep",
                    (
                        "error_type",
                        "level",
                        "estimator",
                        "rmse_deg",
                        "unit",
                        "delay_model",
                    ),
                    rows,
                ),
                Table("trials", TRIAL_COLUMNS, per_trial),
            ),
            plots=(
                PlotSpec(
                    table="impairment_sweep",
                    x="level",
                    y=("rmse_deg",),
                    group=("error_type", "estimator"),
                    title="AoA estimation RMSE under TTD impairments",
                    xlabel="Impairment standard deviation (dB / deg / ps)",
                    ylabel="RMSE (deg)",
                    log_y=True,
                ),
            ),
            summary=summary,
        )

    def check(self, result: ExperimentResult) -> None:
        rows = result.table("impairment_sweep").rows
        expected = len(ESTIMATORS) * sum(
            len(grid) for grid in self.params.sweeps.values()
        )
        check_invariant(
            len(rows) == expected,
            f"sweep produced {len(rows)} rows, expected {expected}",
            invariant="sweep-complete",
            observed=len(rows),
            expected=expected,
        )
        # Errors are folded to [-90, 90) deg.
        for row in rows:
            value = row["rmse_deg"]
            check_invariant(
                math.isfinite(value) and 0 <= value <= 90,
                f"{row['estimator']} rmse_deg {value!r} at "
                f"{row['error_type']}={row['level']:g}",
                invariant="rmse-range",
                observed=value,
            )

        # Zero sigmas leave the taps bit-identical, so every axis starts equal.
        for estimator in ESTIMATORS:
            nominal = {
                row["rmse_deg"]
                for row in rows
                if row["level"] == 0 and row["estimator"] == estimator
            }
            check_invariant(
                len(nominal) <= 1,
                f"nominal {estimator} RMSE differs between axes: {sorted(nominal)}",
                invariant="nominal-baseline",
                observed=sorted(nominal),
            )

        rmse_at = {
            (row["error_type"], row["level"], row["estimator"]): row["rmse_deg"]
            for row in rows
        }
        for knee in self.params.knees:
            nominal = rmse_at[knee.axis, 0.0, knee.estimator]
            impaired = rmse_at[knee.axis, knee.level, knee.estimator]
            ratio = impaired / nominal if nominal > 0 else math.inf
            check_invariant(
                knee.min_ratio is None or ratio >= knee.min_ratio,
                f"{knee.estimator} RMSE at {knee.axis}={knee.level:g} is only "
                f"{ratio:.2f}x nominal, expected at least {knee.min_ratio}x",
                invariant="impairment-knee",
                observed=ratio,
                expected=knee.min_ratio,
            )
            check_invariant(
                knee.max_ratio is None or ratio <= knee.max_ratio,
                f"{knee.estimator} RMSE at {knee.axis}={knee.level:g} is "
                f"{ratio:.2f}x nominal, expected at most {knee.max_ratio}x",
                invariant="impairment-knee",
                observed=ratio,
                expected=knee.max_ratio,
            )
