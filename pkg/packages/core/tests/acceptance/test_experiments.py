"""Every registered experiment run end to end with its shipped configuration."""

from pathlib import Path

import pytest

from rainbow_ttd.api import run_experiment

from tests.helpers import float_column, read_summary, read_table


pytestmark = pytest.mark.acceptance


def test_squint_error(output_dir: Path) -> None:
    report = run_experiment("squint-error", output_dir=output_dir)

    assert report.summary["peak_error_deg_fbw_0.25"] == pytest.approx(
        21.787, abs=0.01
    )
    assert report.summary["max_fbw_relative_error"] <= 0.05


def test_gain_vs_freq(output_dir: Path) -> None:
    report = run_experiment("gain-vs-freq", output_dir=output_dir)

    for n in (16, 64):
        assert report.summary[f"ttd_max_deviation_n{n}"] <= 1e-9
    # Larger arrays squint over a narrower band.
    assert report.summary["measured_fbw_3db_n64"] < report.summary[
        "measured_fbw_3db_n16"
    ]


def test_codebook_map(output_dir: Path) -> None:
    report = run_experiment("codebook-map", output_dir=output_dir)
    summary = report.summary

    assert summary["direction_count"] == 16
    assert summary["max_oracle_error_deg"] <= summary["oracle_step_deg"] * (1 + 1e-9)
    assert len(read_table(report.output_dir, "codebook")) == 16


def test_impairment_sweep(output_dir: Path) -> None:
    report = run_experiment("impairment-sweep", output_dir=output_dir)
    summary = report.summary
    rows = read_table(report.output_dir, "impairment_sweep")
    nominal = {
        r["estimator"]: float(r["rmse_deg"])
        for r in rows
        if r["error_type"] == "phase" and float(r["level"]) == 0
    }

    assert summary["trials_per_point"] == 500
    assert len(rows) == 2 * (7 + 8 + 8)
    assert nominal["refined"] < nominal["coarse"]
    # Phase errors break the refinement; the coarse sweep tolerates all three.
    assert summary["refined_ratio_phase_30deg"] >= 3.0
    assert summary["coarse_ratio_phase_30deg"] <= 1.5
    assert summary["coarse_ratio_gain_2.5dB"] <= 1.5
    assert summary["coarse_ratio_delay_1.5ps"] <= 1.5
    # Under the baseband delay model 1.5 ps is negligible.
    assert summary["refined_ratio_delay_1.5ps"] <= 1.5
    assert (
        summary["refined_rmse_deg_phase_40deg"]
        >= summary["refined_rmse_deg_phase_nominal"]
    )
    assert len(read_table(report.output_dir, "trials")) == 500 * 23


def test_impairment_sweep_at_rf(output_dir: Path) -> None:
    report = run_experiment(
        "impairment-sweep", "impairment-sweep-rf", output_dir=output_dir
    )
    summary = report.summary

    assert summary["delay_model"] == "rf"
    rows = read_table(report.output_dir, "impairment_sweep")
    assert {r["delay_model"] for r in rows} == {"rf"}
    # At the carrier 1.5 ps is over half a radian of phase per element.
    assert summary["refined_ratio_delay_1.5ps"] >= 3.0
    assert summary["coarse_ratio_delay_1.5ps"] <= 1.5


def test_papr_ccdf(output_dir: Path) -> None:
    report = run_experiment("papr-ccdf", output_dir=output_dir)
    summary = report.summary
    rows = read_table(report.output_dir, "papr_ccdf")

    assert summary["symbols"] == 10_000
    assert set(rows[0]) == {"papr_db", "ccdf", "constellation", "loaded_count"}
    assert {(r["constellation"], r["loaded_count"]) for r in rows} == {
        ("bpsk", "128"),
        ("bpsk", "4096"),
        ("qpsk", "128"),
        ("qpsk", "4096"),
    }
    for suffix in ("", "_bpsk", "_qpsk"):
        assert summary[f"gap_db{suffix}"] >= 1.0
        assert summary[f"gap_ci_low_db{suffix}"] > 0
        assert summary[f"sparse_level_db{suffix}"] < summary[f"full_level_db{suffix}"]


def test_distance_rmse(output_dir: Path) -> None:
    report = run_experiment("distance-rmse", output_dir=output_dir)
    rows = read_table(report.output_dir, "distance_rmse")
    snrs = float_column(rows, "element_snr_db")

    assert report.summary["cutoff_distance_m"] == 175.0
    assert report.summary["max_supported_distance_m"] == 150.0
    assert report.summary["paa_overhead_symbols"] == 32
    assert snrs == sorted(snrs, reverse=True)
    assert set(float_column(rows, "detected_fraction")) == {0.0, 1.0}
    assert all(r["paa_rmse_deg"] for r in rows)
    trials = read_table(report.output_dir, "trials")
    assert {r["method"] for r in trials} == {"ttd", "paa"}
    assert len(trials) == 2 * 100 * len(rows)


def test_distance_rmse_with_32_elements(output_dir: Path) -> None:
    report = run_experiment(
        "distance-rmse", "distance-rmse-nr32", output_dir=output_dir
    )
    rows = read_table(report.output_dir, "distance_rmse")
    snrs = float_column(rows, "element_snr_db")

    # Twice the elements share the same power: 3 dB less per element.
    assert report.summary["paa_overhead_symbols"] == 64
    assert report.summary["cutoff_distance_m"] == 150.0
    assert report.summary["max_supported_distance_m"] == 125.0
    assert snrs == sorted(snrs, reverse=True)


def test_planar_contour(output_dir: Path) -> None:
    report = run_experiment("planar-contour", output_dir=output_dir)
    summary = report.summary

    assert summary["element_count"] == 8
    assert summary["subcarriers"] == 10
    assert summary["meets_delay_requirement"] is False
    assert summary["max_peak_gain"] <= 8 * (1 + 1e-9)
    assert summary["max_delay_s"] == pytest.approx(5e-9)
    assert summary["required_delay_s"] == pytest.approx(7e-9)


def test_sweep_compare(output_dir: Path) -> None:
    report = run_experiment("sweep-compare", output_dir=output_dir)
    summary = report.summary

    assert summary["ttd_overhead_symbols"] == 1
    assert summary["paa_overhead_symbols"] == 32
    assert abs(summary["ttd_coarse_rmse_deg"] - summary["paa_rmse_deg"]) <= 0.5
    assert summary["ttd_refined_rmse_deg"] < summary["ttd_coarse_rmse_deg"]


def test_seeded_runs_are_reproducible(tmp_path: Path) -> None:
    first = run_experiment("sweep-compare", seed=11, output_dir=tmp_path / "a")
    second = run_experiment("sweep-compare", seed=11, output_dir=tmp_path / "b")

    assert read_summary(first.output_dir) == read_summary(second.output_dir)
