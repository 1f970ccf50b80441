import math

from typing import Annotated

import numpy as np

from pydantic import Field, JsonValue

from rainbow_ttd.array import ArrayGeometry, gain_pattern, ttd_combiner
from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.squint import gain_curve_db, measure_fbw_3db


class GainVsFreqParams(ExperimentParams):
    n_elements: list[Annotated[int, Field(ge=2)]] = Field(
        default=[16, 64], min_length=1
    )
    angle_deg: float = Field(45.0, ge=-90, le=90)
    # Half-width of the f/f_c grid around 1.
    span: float = Field(0.1, gt=0, lt=1)
    points: int = Field(401, ge=3)
    ttd_tolerance: float = Field(1e-9, gt=0)


class GainVsFreq(BaseExperiment[GainVsFreqParams]):
    """Phase-shifter versus delay-matched TTD gain across the band."""

    name = "gain-vs-freq"
    description = "Normalised beamforming gain versus frequency, PS against TTD"
    params_model = GainVsFreqParams

    def run(self) -> ExperimentResult:
        p = self.params
        carrier = self.config.arrays.carrier_hz
        angle = math.radians(p.angle_deg)
        normalized = np.linspace(1 - p.span, 1 + p.span, p.points)

        rows = []
        summary: dict[str, JsonValue] = {}
        for index, n in enumerate(p.n_elements):
            ps_db = gain_curve_db(n, angle, normalized, carrier_hz=carrier)
            geometry = ArrayGeometry.linear(n, carrier)
            ttd = gain_pattern(
                ttd_combiner(geometry, angle), geometry, angle, normalized * carrier
            )[0]
            ttd_db = 20 * np.log10(ttd / n)
            rows.extend(
                {
                    "n_elements": n,
                    "normalized_freq": float(f),
                    "ps_gain_db": float(ps),
                    "ttd_gain_db": float(t),
                }
                for f, ps, t in zip(normalized, ps_db, ttd_db, strict=True)
            )
            summary[f"ttd_max_deviation_n{n}"] = float(np.max(np.abs(ttd / n - 1)))
            summary[f"measured_fbw_3db_n{n}"] = measure_fbw_3db(
                n, angle, carrier_hz=carrier
            )
            self.report(index + 1, len(p.n_elements))

        return ExperimentResult(
            tables=(
                Table(
                    "gain_vs_freq",
                    ("n_elements", "normalized_freq", "ps_gain_db", "ttd_gain_db"),
                    rows,
                ),
            ),
            plots=(
                PlotSpec(
                    table="gain_vs_freq",
                    x="normalized_freq",
                    y=("ps_gain_db", "ttd_gain_db"),
                    group="n_elements",
                    title=f"Beamforming gain at {p.angle_deg:g} deg",
                    xlabel="f / f_c",
                    ylabel="G(f) / N (dB)",
                ),
            ),
            summary=summary,
        )

    def check(self, result: ExperimentResult) -> None:
        for n in self.params.n_elements:
            gains_db = [
                r["ttd_gain_db"]
                for r in result.table("gain_vs_freq").rows
                if r["n_elements"] == n
            ]
            deviation = max(abs(10 ** (g / 20) - 1) for g in gains_db)
            check_invariant(
                deviation <= self.params.ttd_tolerance,
                f"TTD gain of N={n} strays {deviation:.3g} from N across the band",
                invariant="ttd-squint-free",
                observed=deviation,
                expected=self.params.ttd_tolerance,
            )
