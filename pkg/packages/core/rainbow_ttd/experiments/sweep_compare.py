from pydantic import Field

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.simulation import TRIAL_COLUMNS, compare_sweeping, trial_rows


class SweepCompareParams(ExperimentParams):
    trials: int | None = Field(None, ge=1)


class SweepCompare(BaseExperiment[SweepCompareParams]):
    """Single-symbol TTD training against exhaustive PAA beam sweeping."""

    name = "sweep-compare"
    description = "TTD rainbow training versus PAA beam sweeping, paired draws"
    params_model = SweepCompareParams

    def run(self) -> ExperimentResult:
        comparison = compare_sweeping(
            self.config, trials=self.params.trials, progress=self.progress
        )
        rows = [
            {
                "method": row.method,
                "overhead_symbols": row.overhead_symbols,
                "coarse_rmse_deg": row.coarse_rmse_deg,
                "refined_rmse_deg": row.refined_rmse_deg,
            }
            for row in comparison
        ]
        per_trial = [
            {"method": row.method, **record}
            for row in comparison
            for record in trial_rows(row.records)
        ]
        ttd, paa = comparison
        return ExperimentResult(
            tables=(
                Table(
                    "sweep_compare",
                    (
                        "method",
                        "overhead_symbols",
                        "coarse_rmse_deg",
                        "refined_rmse_deg",
                    ),
                    rows,
                ),
                Table("trials", ("method", *TRIAL_COLUMNS), per_trial),
            ),
            plots=(
                PlotSpec(
                    table="sweep_compare",
                    x="overhead_symbols",
                    y=("coarse_rmse_deg",),
                    kind="scatter",
                    title="Training overhead against RMSE",
                    xlabel="OFDM symbols spent on training",
                    ylabel="RMSE (deg)",
                ),
            ),
            summary={
                "ttd_overhead_symbols": ttd.overhead_symbols,
                "paa_overhead_symbols": paa.overhead_symbols,
                "ttd_coarse_rmse_deg": ttd.coarse_rmse_deg,
                "ttd_refined_rmse_deg": ttd.refined_rmse_deg,
                "paa_rmse_deg": paa.coarse_rmse_deg,
            },
        )

    def check(self, result: ExperimentResult) -> None:
        overhead = dict(
            zip(
                result.table("sweep_compare").column("method"),
                result.table("sweep_compare").column("overhead_symbols"),
                strict=True,
            )
        )
        expected = {"ttd": 1, "paa": self.config.direction_count}
        check_invariant(
            overhead == expected,
            "training overhead does not match one symbol against D symbols",
            invariant="sweep-overhead",
            observed=overhead,
            expected=expected,
        )
