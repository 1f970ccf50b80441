import math

from typing import Annotated

import numpy as np

from pydantic import Field, JsonValue

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.squint import (
    fractional_bandwidth_3db,
    max_error_curve,
    measure_fbw_3db,
)


class SquintErrorParams(ExperimentParams):
    fbws: list[Annotated[float, Field(gt=0, lt=2)]] = Field(
        default=[0.05, 0.15, 0.25], min_length=1
    )
    max_angle_deg: float = Field(60.0, gt=0, le=90)
    angle_step_deg: float = Field(1.0, gt=0)
    fbw_elements: list[Annotated[int, Field(ge=2)]] = Field(
        default=[8, 16, 32, 64], min_length=1
    )
    fbw_angles_deg: list[Annotated[float, Field(gt=0, le=90)]] = Field(
        default=[30.0, 45.0, 60.0], min_length=1
    )
    # Allowed relative gap between 1.772 / (N |sin|) and the measured width.
    fbw_tolerance: float = Field(0.05, gt=0)


class SquintError(BaseExperiment[SquintErrorParams]):
    """Worst-case phase-shifter pointing error and 3-dB fractional bandwidth."""

    name = "squint-error"
    description = "Maximum angular error versus AoA for several fractional bandwidths"
    params_model = SquintErrorParams

    def run(self) -> ExperimentResult:
        p = self.params
        steps = round(p.max_angle_deg / p.angle_step_deg)
        angles = np.radians(np.linspace(0.0, p.max_angle_deg, steps + 1))
        error_rows = [
            {"fbw": fbw, "angle_deg": angle, "max_error_deg": error}
            for fbw, angle, error in max_error_curve(angles, p.fbws)
        ]

        fbw_rows = []
        total = len(p.fbw_elements) * len(p.fbw_angles_deg)
        for n in p.fbw_elements:
            for angle_deg in p.fbw_angles_deg:
                angle = math.radians(angle_deg)
                predicted = fractional_bandwidth_3db(n, angle)
                measured = measure_fbw_3db(n, angle)
                fbw_rows.append(
                    {
                        "n_elements": n,
                        "angle_deg": angle_deg,
                        "predicted_fbw": predicted,
                        "measured_fbw": measured,
                        "relative_error": abs(measured - predicted) / predicted,
                    }
                )
                self.report(len(fbw_rows), total)

        summary: dict[str, JsonValue] = {
            f"peak_error_deg_fbw_{fbw:g}": max(
                r["max_error_deg"] for r in error_rows if r["fbw"] == fbw
            )
            for fbw in p.fbws
        }
        summary["max_fbw_relative_error"] = max(r["relative_error"] for r in fbw_rows)

        return ExperimentResult(
            tables=(
                Table(
                    "squint_error", ("fbw", "angle_deg", "max_error_deg"), error_rows
                ),
                Table(
                    "fbw_3db",
                    (
                        "n_elements",
                        "angle_deg",
                        "predicted_fbw",
                        "measured_fbw",
                        "relative_error",
                    ),
                    fbw_rows,
                ),
            ),
            plots=(
                PlotSpec(
                    table="squint_error",
                    x="angle_deg",
                    y=("max_error_deg",),
                    group="fbw",
                    title="Maximum angular error of a phase-shifter array",
                    xlabel="Actual AoA (deg)",
                    ylabel="Maximum angular error (deg)",
                ),
            ),
            summary=summary,
        )

    def check(self, result: ExperimentResult) -> None:
        rows = result.table("squint_error").rows
        for fbw in self.params.fbws:
            errors = [r["max_error_deg"] for r in rows if r["fbw"] == fbw]
            check_invariant(
                all(b >= a - 1e-12 for a, b in zip(errors, errors[1:], strict=False)),
                f"squint error is not monotone in the angle for fbw={fbw:g}",
                invariant="squint-monotone",
                observed=errors,
            )

        worst = max(result.table("fbw_3db").column("relative_error"))
        check_invariant(
            worst <= self.params.fbw_tolerance,
            f"measured 3-dB width departs {worst:.2%} from 1.772/(N|sin|)",
            invariant="fbw-closed-form",
            observed=worst,
            expected=self.params.fbw_tolerance,
        )
