from typing import Annotated, Any

from pydantic import Field, JsonValue, field_validator

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.simulation import (
    TRIAL_COLUMNS,
    TrainingSimulation,
    TrialRecord,
    summarize_trials,
    trial_rows,
)


class DistanceRmseParams(ExperimentParams):
    distances_m: list[Annotated[float, Field(gt=0)]] = Field(
        default=[25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0, 250.0, 300.0],
        min_length=1,
    )
    trials: int | None = Field(None, ge=1)
    # Fraction of detected trials below which a distance counts as unsupported.
    detection_quorum: float = Field(0.5, gt=0, le=1)
    # Also run the exhaustive PAA sweep (D symbols) on the same draws.
    paa_sweep: bool = True

    @field_validator("distances_m")
    @classmethod
    def _increasing(cls, value: list[float]) -> list[float]:
        if any(b <= a for a, b in zip(value, value[1:], strict=False)):
            msg = "distances_m must be strictly increasing"
            raise ValueError(msg)
        return value


class DistanceRmse(BaseExperiment[DistanceRmseParams]):
    """
    Estimation RMSE and detection rate as the link budget shrinks with range.

    The element SNR at each distance follows from the scenario's link budget,
    whatever link.snr_db says. With paa_sweep set, every distance also runs
    the phase-shifter sweep on the same truth and channel draws.
    """

    name = "distance-rmse"
    description = "RMSE and detection versus distance under the link budget"
    params_model = DistanceRmseParams

    def run(self) -> ExperimentResult:
        p = self.params
        trials = self.config.trials if p.trials is None else p.trials
        simulation = TrainingSimulation(self.config)
        methods = 2 if p.paa_sweep else 1
        total = methods * trials * len(p.distances_m)

        rows: list[dict[str, Any]] = []
        per_trial: list[dict[str, Any]] = []
        for index, distance in enumerate(p.distances_m):
            at_distance = simulation.at_distance(distance)
            records = at_distance.run_trials(
                trials,
                progress=self.progress_from(methods * index * trials, total),
            )
            summary = summarize_trials(records)
            row: dict[str, Any] = {
                "distance_m": distance,
                "element_snr_db": at_distance.snr_db,
                "coarse_rmse_deg": summary.coarse_rmse_deg,
                "refined_rmse_deg": summary.refined_rmse_deg,
                "paa_rmse_deg": None,
                "detected_fraction": summary.detected_fraction,
            }
            per_trial.extend(
                {"method": "ttd", "distance_m": distance, **r}
                for r in trial_rows(records)
            )
            if p.paa_sweep:
                offset = (methods * index + 1) * trials
                paa: list[TrialRecord] = []
                for trial in range(trials):
                    paa.append(at_distance.paa_sweep_trial(trial))
                    self.report(offset + trial + 1, total)
                row["paa_rmse_deg"] = summarize_trials(paa).coarse_rmse_deg
                per_trial.extend(
                    {"method": "paa", "distance_m": distance, **r}
                    for r in trial_rows(paa)
                )
            rows.append(row)

        unsupported = [
            r["distance_m"]
            for r in rows
            if r["detected_fraction"] < p.detection_quorum
        ]
        result_summary: dict[str, JsonValue] = {
            "trials_per_distance": trials,
            "cutoff_distance_m": unsupported[0] if unsupported else None,
            "max_supported_distance_m": max(
                (
                    r["distance_m"]
                    for r in rows
                    if r["detected_fraction"] >= p.detection_quorum
                ),
                default=None,
            ),
            "refined_rmse_deg_nearest": rows[0]["refined_rmse_deg"],
            "paa_overhead_symbols": (
                simulation.book.direction_count if p.paa_sweep else None
            ),
            "paa_rmse_deg_nearest": rows[0]["paa_rmse_deg"],
        }

        return ExperimentResult(
            tables=(
                Table(
                    "distance_rmse",
                    (
                        "distance_m",
                        "element_snr_db",
                        "coarse_rmse_deg",
                        "refined_rmse_deg",
                        "paa_rmse_deg",
                        "detected_fraction",
                    ),
                    rows,
                ),
                Table("trials", ("method", "distance_m", *TRIAL_COLUMNS), per_trial),
            ),
            plots=(
                PlotSpec(
                    table="distance_rmse",
                    x="distance_m",
                    y=("coarse_rmse_deg", "refined_rmse_deg", "paa_rmse_deg"),
                    title="AoA estimation RMSE versus distance",
                    xlabel="Distance (m)",
                    ylabel="RMSE (deg)",
                    log_y=True,
                ),
            ),
            summary=result_summary,
        )

    def check(self, result: ExperimentResult) -> None:
        snrs = result.table("distance_rmse").column("element_snr_db")
        check_invariant(
            all(b < a for a, b in zip(snrs, snrs[1:], strict=False)),
            "element SNR does not fall with distance",
            invariant="snr-decreasing",
            observed=snrs,
        )
