import json

from pathlib import Path
from typing import Any

from rainbow_ttd.artifacts import read_csv
from rainbow_ttd.config import ScenarioConfig, apply_overrides, load_shipped_config


# N_R=8, N_T=16, M=32 of 256, R=4 (D=8), Q=64.
SMALL_OVERRIDES: dict[str, Any] = {
    "arrays.n_rx": 8,
    "arrays.n_tx": 16,
    "ofdm.m_total": 256,
    "ofdm.loaded_count": 32,
    "ofdm.cp_len": 16,
    "codebook.diversity": 4,
    "estimator.dictionary_size": 64,
    "trials": 20,
}


def small_config(**overrides: Any) -> ScenarioConfig:
    """Shipped table parameters scaled down; keyword names use __ for dots."""
    config = apply_overrides(load_shipped_config("table-parameters"), SMALL_OVERRIDES)
    extra = {key.replace("__", "."): value for key, value in overrides.items()}
    return apply_overrides(config, extra)


def read_summary(directory: Path) -> dict[str, Any]:
    return json.loads((directory / "summary.json").read_text(encoding="utf-8"))


def read_table(directory: Path, name: str) -> list[dict[str, str]]:
    """Rows of an experiment CSV, values left as the written text."""
    return read_csv(directory / f"{name}.csv")


def float_column(rows: list[dict[str, str]], column: str) -> list[float]:
    return [float(row[column]) for row in rows]
