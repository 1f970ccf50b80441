import math

from typing import Any

from pydantic import Field

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.codebook import (
    PlanarRainbowConfig,
    hemisphere_grid,
    planar_beam_contours,
)
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams


class PlanarContourParams(ExperimentParams):
    n_x: int = Field(4, ge=1)
    n_y: int = Field(2, ge=1)
    # Delay steps in units of 1 / BW.
    steps_x: float = Field(1.0, ge=0)
    steps_y: float = Field(7.0, ge=0)
    subcarrier_count: int = Field(10, ge=1)
    level_db: float = Field(3.0, ge=0)
    theta_points: int = Field(91, ge=2)
    phi_points: int = Field(181, ge=4)


class PlanarContour(BaseExperiment[PlanarContourParams]):
    """3-dB contours of a planar rainbow array's per-subcarrier beams."""

    name = "planar-contour"
    description = "Beam contours of a planar TTD array over the hemisphere"
    params_model = PlanarContourParams

    def run(self) -> ExperimentResult:
        p = self.params
        bandwidth = self.config.ofdm.bandwidth_hz
        carrier = self.config.arrays.carrier_hz
        planar = PlanarRainbowConfig.from_bandwidth_steps(
            p.n_x, p.n_y, p.steps_x, p.steps_y, bandwidth, p.subcarrier_count
        )
        budget = planar.delay_budget(bandwidth)
        contours = planar_beam_contours(
            planar,
            bandwidth,
            carrier_hz=carrier,
            level_db=p.level_db,
            grid=hemisphere_grid(p.theta_points, p.phi_points),
        )
        self.report(1, 1)

        offsets = planar.subcarrier_offsets_hz(bandwidth)
        cell_rows: list[dict[str, Any]] = []
        peak_rows: list[dict[str, Any]] = []
        for index, (offset, contour) in enumerate(zip(offsets, contours, strict=True)):
            cell_rows.extend(
                {
                    "subcarrier": index,
                    "theta_deg": math.degrees(theta),
                    "phi_deg": math.degrees(phi),
                }
                for theta, phi in contour.cells()
            )
            peak_rows.append(
                {
                    "subcarrier": index,
                    "baseband_freq_hz": float(offset),
                    "peak_theta_deg": math.degrees(contour.peak_theta_rad),
                    "peak_phi_deg": math.degrees(contour.peak_phi_rad),
                    "peak_gain": contour.peak_gain,
                    "cell_count": contour.cell_count,
                }
            )

        return ExperimentResult(
            tables=(
                Table(
                    "contour_cells", ("subcarrier", "theta_deg", "phi_deg"), cell_rows
                ),
                Table(
                    "contour_peaks",
                    (
                        "subcarrier",
                        "baseband_freq_hz",
                        "peak_theta_deg",
                        "peak_phi_deg",
                        "peak_gain",
                        "cell_count",
                    ),
                    peak_rows,
                ),
            ),
            plots=(
                PlotSpec(
                    table="contour_cells",
                    x="phi_deg",
                    y=("theta_deg",),
                    group="subcarrier",
                    kind="scatter",
                    title=f"{p.level_db:g} dB beam contours of a planar TTD array",
                    xlabel="Azimuth (deg)",
                    ylabel="Elevation from broadside (deg)",
                ),
            ),
            summary={
                "element_count": planar.element_count,
                "subcarriers": p.subcarrier_count,
                "max_delay_s": budget.max_delay_s,
                "required_delay_s": budget.required_s,
                "meets_delay_requirement": budget.meets_requirement,
                "max_peak_gain": max(r["peak_gain"] for r in peak_rows),
            },
        )

    def check(self, result: ExperimentResult) -> None:
        n = self.params.n_x * self.params.n_y
        for row in result.table("contour_peaks").rows:
            check_invariant(
                row["peak_gain"] <= n * (1 + 1e-9),
                f"subcarrier {row['subcarrier']} peak gain exceeds N={n}",
                invariant="gain-bound",
                observed=row["peak_gain"],
                expected=n,
            )
            check_invariant(
                row["cell_count"] >= 1,
                f"subcarrier {row['subcarrier']} has an empty contour",
                invariant="contour-nonempty",
                observed=row["cell_count"],
            )
