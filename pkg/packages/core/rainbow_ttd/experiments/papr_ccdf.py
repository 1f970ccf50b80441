from typing import Any

import numpy as np

from pydantic import Field, JsonValue, field_validator

from rainbow_ttd.artifacts import ExperimentResult, PlotSpec, Table
from rainbow_ttd.error_policy import check_invariant
from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.waveform import Constellation, OfdmSpec, papr_ccdf, papr_gap


class PaprCcdfParams(ExperimentParams):
    symbols: int = Field(10_000, ge=100)
    probability: float = Field(1e-2, gt=0, lt=1)
    oversampling: int = Field(1, ge=1)
    include_prefix: bool = True
    threshold_min_db: float = 3.0
    threshold_max_db: float = 14.0
    threshold_step_db: float = Field(0.05, gt=0)
    bootstrap_resamples: int = Field(1000, ge=100)
    constellations: list[Constellation] = Field(
        default=["bpsk", "qpsk"], min_length=1
    )

    @field_validator("constellations")
    @classmethod
    def _distinct(cls, value: list[Constellation]) -> list[Constellation]:
        if len(set(value)) != len(value):
            msg = "constellations must not repeat"
            raise ValueError(msg)
        return value


class PaprCcdfExperiment(BaseExperiment[PaprCcdfParams]):
    """
    PAPR distribution of sparse against fully loaded OFDM symbols.

    Every constellation gets a sparse and a full CCDF. The papr_ccdf table is
    long, one row per (constellation, loaded_count, threshold). Summary keys
    without a suffix describe the scenario's own ofdm.constellation.
    """

    name = "papr-ccdf"
    description = "PAPR CCDF of the sparse training symbol against full loading"
    params_model = PaprCcdfParams

    def run(self) -> ExperimentResult:
        p = self.params
        ofdm = self.config.ofdm
        count = round((p.threshold_max_db - p.threshold_min_db) / p.threshold_step_db)
        thresholds = np.linspace(p.threshold_min_db, p.threshold_max_db, count + 1)
        seeds = np.random.SeedSequence(self.config.base_seed).spawn(
            len(p.constellations)
        )
        total = 2 * p.symbols * len(p.constellations)

        ccdf_rows: list[dict[str, Any]] = []
        level_rows: list[dict[str, Any]] = []
        summary: dict[str, JsonValue] = {
            "symbols": p.symbols,
            "probability": p.probability,
        }
        for index, (constellation, seed) in enumerate(
            zip(p.constellations, seeds, strict=True)
        ):
            sparse_seed, full_seed, bootstrap_seed = seed.spawn(3)
            offset = 2 * index * p.symbols
            sparse = papr_ccdf(
                OfdmSpec.sparse(
                    ofdm.m_total,
                    ofdm.loaded_count,
                    ofdm.bandwidth_hz,
                    cp_len=ofdm.cp_len,
                    constellation=constellation,
                ),
                p.symbols,
                sparse_seed,
                oversampling=p.oversampling,
                include_prefix=p.include_prefix,
                progress=self.progress_from(offset, total),
            )
            full = papr_ccdf(
                OfdmSpec.full(
                    ofdm.m_total,
                    ofdm.bandwidth_hz,
                    cp_len=ofdm.cp_len,
                    constellation=constellation,
                ),
                p.symbols,
                full_seed,
                oversampling=p.oversampling,
                include_prefix=p.include_prefix,
                progress=self.progress_from(offset + p.symbols, total),
            )
            gap = papr_gap(
                sparse,
                full,
                p.probability,
                n_resamples=p.bootstrap_resamples,
                rng_seed=bootstrap_seed,
            )

            for loading, ccdf in (("sparse", sparse), ("full", full)):
                ccdf_rows.extend(
                    {
                        "papr_db": float(t),
                        "ccdf": ccdf.ccdf_at(float(t)),
                        "constellation": constellation,
                        "loaded_count": ccdf.loaded_count,
                    }
                    for t in thresholds
                )
                level_rows.append(
                    {
                        "constellation": constellation,
                        "loading": loading,
                        "loaded_count": ccdf.loaded_count,
                        "probability": p.probability,
                        "level_db": ccdf.level_at(p.probability),
                    }
                )

            sparse_level = sparse.level_at(p.probability)
            full_level = full.level_at(p.probability)
            suffixes = [f"_{constellation}"]
            if constellation == ofdm.constellation:
                suffixes.append("")
            for suffix in suffixes:
                summary[f"sparse_level_db{suffix}"] = sparse_level
                summary[f"full_level_db{suffix}"] = full_level
                summary[f"gap_db{suffix}"] = full_level - sparse_level
                summary[f"gap_ci_low_db{suffix}"] = gap.ci_low_db
                summary[f"gap_ci_high_db{suffix}"] = gap.ci_high_db

        return ExperimentResult(
            tables=(
                Table(
                    "papr_ccdf",
                    ("papr_db", "ccdf", "constellation", "loaded_count"),
                    ccdf_rows,
                ),
                Table(
                    "papr_levels",
                    (
                        "constellation",
                        "loading",
                        "loaded_count",
                        "probability",
                        "level_db",
                    ),
                    level_rows,
                ),
            ),
            plots=(
                PlotSpec(
                    table="papr_ccdf",
                    x="papr_db",
                    y=("ccdf",),
                    group=("constellation", "loaded_count"),
                    title="CCDF of the OFDM symbol PAPR",
                    xlabel="PAPR threshold (dB)",
                    ylabel="Pr[PAPR > threshold]",
                    log_y=True,
                ),
            ),
            summary=summary,
        )

    def check(self, result: ExperimentResult) -> None:
        levels = result.table("papr_levels").rows
        for constellation in self.params.constellations:
            by_loading = {
                row["loading"]: row["level_db"]
                for row in levels
                if row["constellation"] == constellation
            }
            sparse_level, full_level = by_loading["sparse"], by_loading["full"]
            check_invariant(
                sparse_level < full_level,
                f"{constellation} sparse loading PAPR {sparse_level:.2f} dB is not "
                f"below full loading {full_level:.2f} dB",
                invariant="papr-sparse-lower",
                observed=sparse_level,
                expected=full_level,
            )

        series: dict[tuple[str, int], list[float]] = {}
        for row in result.table("papr_ccdf").rows:
            key = (row["constellation"], row["loaded_count"])
            series.setdefault(key, []).append(row["ccdf"])
        for (constellation, loaded), values in series.items():
            check_invariant(
                all(b <= a for a, b in zip(values, values[1:], strict=False)),
                f"{constellation} CCDF with {loaded} loaded bins is not "
                "nonincreasing in the threshold",
                invariant="ccdf-monotone",
            )
