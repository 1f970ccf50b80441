import math

import numpy as np

from pydantic import Field

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.codebook import (
    RainbowCodebook,
    angle_frequency_map,
    argmax_pointing,
    build_rainbow_taps,
    codebook_rows,
    oracle_angle_grid,
)
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams


class CodebookMapParams(ExperimentParams):
    map_angle_points: int = Field(361, ge=2)
    oracle_points: int = Field(4096, ge=16)


class CodebookMap(BaseExperiment[CodebookMapParams]):
    """Subcarrier-to-angle map of a rainbow codebook, checked against its beams."""

    name = "codebook-map"
    description = "Frequency-angle map of the rainbow TTD codebook"
    params_model = CodebookMapParams

    def build_codebook(self) -> RainbowCodebook:
        c = self.config
        return build_rainbow_taps(
            c.arrays.n_rx,
            c.ofdm.bandwidth_hz,
            c.codebook.diversity,
            math.radians(c.codebook.rotation_deg),
            loaded_count=c.ofdm.loaded_count,
            m_total=c.ofdm.m_total,
            carrier_hz=c.arrays.carrier_hz,
        )

    def run(self) -> ExperimentResult:
        p = self.params
        book = self.build_codebook()
        rows = codebook_rows(book)

        angles = np.linspace(-np.pi / 2, np.pi / 2, p.map_angle_points)
        gains = angle_frequency_map(
            book, angles, frequency_flat=self.config.arrays.frequency_flat
        )
        map_rows = [
            {
                "subcarrier_index": row["subcarrier_index"],
                "angle_deg": math.degrees(float(angle)),
                "normalized_gain": float(gain),
            }
            for row, gain_row in zip(rows, gains, strict=True)
            for angle, gain in zip(angles, gain_row, strict=True)
        ]
        self.report(1, 2)

        grid = oracle_angle_grid(p.oracle_points)
        step = float(grid[1] - grid[0])
        argmax = argmax_pointing(book, grid)
        oracle_rows = []
        for row, found in zip(rows, argmax, strict=True):
            predicted = math.radians(row["angle_deg"])
            gap = abs(float(found) - predicted)
            # -90 and +90 deg are the same endfire direction of the sine map.
            gap = min(gap, math.pi - gap)
            oracle_rows.append(
                {
                    "subcarrier_index": row["subcarrier_index"],
                    "predicted_deg": row["angle_deg"],
                    "argmax_deg": math.degrees(float(found)),
                    "error_deg": math.degrees(gap),
                }
            )
        self.report(2, 2)

        return ExperimentResult(
            tables=(
                Table(
                    "codebook",
                    (
                        "subcarrier_index",
                        "baseband_freq_hz",
                        "angle_deg",
                        "direction_group",
                        "wrapped",
                    ),
                    rows,
                ),
                Table(
                    "angle_frequency_map",
                    ("subcarrier_index", "angle_deg", "normalized_gain"),
                    map_rows,
                ),
                Table(
                    "oracle",
                    ("subcarrier_index", "predicted_deg", "argmax_deg", "error_deg"),
                    oracle_rows,
                ),
            ),
            plots=(
                PlotSpec(
                    table="codebook",
                    x="baseband_freq_hz",
                    y=("angle_deg",),
                    kind="scatter",
                    title="Rainbow codebook: steered angle per subcarrier",
                    xlabel="f - f_c (Hz)",
                    ylabel="Angle (deg)",
                ),
                PlotSpec(
                    table="angle_frequency_map",
                    x="angle_deg",
                    y=("normalized_gain",),
                    group="subcarrier_index",
                    title="Beam pattern of every loaded subcarrier",
                    xlabel="Angle (deg)",
                    ylabel="|w^H a| / N",
                ),
            ),
            summary={
                "direction_count": book.direction_count,
                "diversity": book.diversity,
                "delta_tau_s": book.delta_tau_s,
                "oracle_step_deg": math.degrees(step),
                "max_oracle_error_deg": max(r["error_deg"] for r in oracle_rows),
            },
        )

    def check(self, result: ExperimentResult) -> None:
        step = math.degrees(math.pi / self.params.oracle_points)
        worst = max(result.table("oracle").column("error_deg"))
        check_invariant(
            worst <= step * (1 + 1e-9),
            f"beam argmax strays {worst:.4f} deg from the frequency-angle map",
            invariant="codebook-oracle",
            observed=worst,
            expected=step,
        )
