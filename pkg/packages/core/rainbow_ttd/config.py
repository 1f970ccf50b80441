"""Scenario configuration: pydantic models, JSON files and key=value overrides."""

import json
import logging
import math
import os

from importlib import resources
from pathlib import Path
from typing import Any, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    JsonValue,
    ValidationError,
    model_validator,
)

from rainbow_ttd.array import DEFAULT_CARRIER_HZ, DelayModel
from rainbow_ttd.channel import LinkBudget, MultipathSpec, PathLossModel
from rainbow_ttd.error_policy import config_error_from_validation, raise_config_error
from rainbow_ttd.impairments import ImpairmentSpec
from rainbow_ttd.waveform import OfdmSpec


logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = os.getenv("RAINBOW_TTD_OUTPUT_DIR", "results")
CONFIG_PACKAGE = "rainbow_ttd.configs"


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ArraySection(_Section):
    """Receive (UE) and transmit (BS) uniform linear arrays, half-wavelength pitch."""

    n_rx: int = Field(16, ge=2)
    n_tx: int = Field(128, ge=1)
    carrier_hz: float = Field(DEFAULT_CARRIER_HZ, gt=0)
    # Evaluate spatial responses at the carrier (the UE model) or per subcarrier.
    frequency_flat: bool = True


class OfdmSection(_Section):
    m_total: int = Field(4096, ge=2)
    loaded_count: int = Field(128, ge=1)
    bandwidth_hz: float = Field(2e9, gt=0)
    cp_len: int = Field(128, ge=0)
    constellation: Literal["bpsk", "qpsk"] = "qpsk"

    def spec(self, *, loaded_count: int | None = None) -> OfdmSpec:
        return OfdmSpec.sparse(
            self.m_total,
            self.loaded_count if loaded_count is None else loaded_count,
            self.bandwidth_hz,
            cp_len=self.cp_len,
            constellation=self.constellation,
        )


class CodebookSection(_Section):
    diversity: int = Field(4, ge=1)
    rotation_deg: float = Field(0.0, ge=-90, le=90)


class MultipathSection(_Section):
    extra_paths: int = Field(0, ge=0)
    relative_power_db: float = -10.0
    max_excess_delay_ps: float = Field(0.0, ge=0)

    def spec(self) -> MultipathSpec:
        return MultipathSpec(
            extra_paths=self.extra_paths,
            relative_power_db=self.relative_power_db,
            max_excess_delay_s=self.max_excess_delay_ps * 1e-12,
        )


class LinkSection(_Section):
    """
    Operating point.

    snr_db sets the element-level SNR |g|^2 / sigma_N^2 directly; when it is
    null the SNR follows from the link budget at distance_m.
    """

    snr_db: float | None = 0.0
    tx_power_w: float = Field(1.0, gt=0)
    distance_m: float = Field(50.0, gt=0)
    noise_psd_dbm_per_hz: float = -164.0
    pathloss: Literal["free_space", "log_distance"] = "log_distance"
    pathloss_exponent: float = Field(3.0, gt=0)
    ref_loss_db: float = 91.3
    multipath: MultipathSection = MultipathSection()

    @property
    def noise_psd_w_per_hz(self) -> float:
        return 10 ** ((self.noise_psd_dbm_per_hz - 30) / 10)

    def pathloss_model(self) -> PathLossModel:
        return PathLossModel(self.pathloss, self.pathloss_exponent, self.ref_loss_db)


class ImpairmentSection(_Section):
    sigma_gain_db: float = Field(0.0, ge=0, allow_inf_nan=False)
    sigma_phase_deg: float = Field(0.0, ge=0, allow_inf_nan=False)
    sigma_delay_ps: float = Field(0.0, ge=0, allow_inf_nan=False)
    delay_model: DelayModel = "baseband"
    redraw_per_trial: bool = True

    def spec(self) -> ImpairmentSpec:
        return ImpairmentSpec(
            sigma_delay_s=self.sigma_delay_ps * 1e-12,
            sigma_phase_rad=math.radians(self.sigma_phase_deg),
            sigma_gain_db=self.sigma_gain_db,
            delay_model=self.delay_model,
            redraw_per_trial=self.redraw_per_trial,
        )


class EstimatorSection(_Section):
    dictionary_size: int = Field(1024, ge=1)
    metric: Literal["amplitude", "power", "coherent"] = "amplitude"
    truth_limit_deg: float = Field(60.0, gt=0, le=90)


class ScenarioConfig(_Section):
    """
    Everything one experiment run depends on.

    experiment holds the experiment's own parameters (validated by the
    experiment); full_overrides lists the key=value changes --full applies.
    """

    arrays: ArraySection = ArraySection()
    ofdm: OfdmSection = OfdmSection()
    codebook: CodebookSection = CodebookSection()
    link: LinkSection = LinkSection()
    impairments: ImpairmentSection = ImpairmentSection()
    estimator: EstimatorSection = EstimatorSection()
    trials: int = Field(500, ge=1)
    base_seed: int = Field(0, ge=0)
    output_dir: str = DEFAULT_OUTPUT_DIR
    experiment: dict[str, JsonValue] = Field(default_factory=dict)
    full_overrides: dict[str, JsonValue] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioConfig":
        ofdm = self.ofdm
        if ofdm.loaded_count > ofdm.m_total:
            msg = (
                f"ofdm.loaded_count ({ofdm.loaded_count}) exceeds "
                f"m_total ({ofdm.m_total})"
            )
            raise ValueError(msg)
        if ofdm.m_total % ofdm.loaded_count:
            msg = "ofdm.loaded_count must divide ofdm.m_total (uniform loading)"
            raise ValueError(msg)
        if ofdm.cp_len >= ofdm.m_total:
            msg = "ofdm.cp_len must be smaller than ofdm.m_total"
            raise ValueError(msg)
        if ofdm.loaded_count % self.codebook.diversity:
            msg = (
                f"codebook M = D*R: loaded_count {ofdm.loaded_count} is not a "
                f"multiple of diversity {self.codebook.diversity}"
            )
            raise ValueError(msg)
        if self.estimator.dictionary_size < self.direction_count:
            msg = f"estimator.dictionary_size must be >= D = {self.direction_count}"
            raise ValueError(msg)
        return self

    @property
    def direction_count(self) -> int:
        return self.ofdm.loaded_count // self.codebook.diversity

    def link_budget(self, distance_m: float | None = None) -> LinkBudget:
        link = self.link
        return LinkBudget(
            tx_power_w=link.tx_power_w,
            distance_m=link.distance_m if distance_m is None else distance_m,
            noise_psd_w_per_hz=link.noise_psd_w_per_hz,
            bandwidth_hz=self.ofdm.bandwidth_hz,
            m_total=self.ofdm.m_total,
            n_tx=self.arrays.n_tx,
            n_rx=self.arrays.n_rx,
            carrier_hz=self.arrays.carrier_hz,
            pathloss=link.pathloss_model(),
        )


def parse_config(text: str, *, source: str = "<config>") -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate_json(text)
    except ValidationError as e:
        raise config_error_from_validation(e, source=source) from e


def dump_config(config: ScenarioConfig) -> str:
    return config.model_dump_json(indent=2) + "\n"


def load_config(path: str | Path) -> ScenarioConfig:
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as e:
        raise_config_error(
            f"Cannot read config {file}: {e.strerror or e}",
            key=None,
            value=str(file),
            category="parse",
            cause=e,
        )
    logger.debug("Loaded config from %s", file)
    return parse_config(text, source=str(file))


def shipped_config_names() -> list[str]:
    root = resources.files(CONFIG_PACKAGE)
    return sorted(
        entry.name.removesuffix(".json")
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_shipped_config(name: str) -> ScenarioConfig:
    """Default config shipped for an experiment (or table-parameters)."""
    resource = resources.files(CONFIG_PACKAGE).joinpath(f"{name}.json")
    if not resource.is_file():
        raise_config_error(
            f"No shipped config named {name!r}",
            key=None,
            value=name,
            category="unknown_experiment",
        )
    return parse_config(resource.read_text(encoding="utf-8"), source=f"{name}.json")


def parse_override(item: str) -> tuple[str, JsonValue]:
    """Split key=value; the value is read as JSON, falling back to a string."""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise_config_error(
            f"Override {item!r} must look like key=value",
            key=key or None,
            value=item,
            category="parse",
        )
    try:
        value: JsonValue = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def apply_overrides(
    config: ScenarioConfig, overrides: list[str] | dict[str, Any]
) -> ScenarioConfig:
    """
    Apply dotted-path overrides and revalidate the whole tree.

    Keys under experiment.* may introduce new parameters; everywhere else the
    key must already exist.
    """
    pairs = (
        list(overrides.items())
        if isinstance(overrides, dict)
        else [parse_override(item) for item in overrides]
    )
    if not pairs:
        return config

    tree = config.model_dump(mode="json")
    for key, value in pairs:
        parts = key.split(".")
        node = tree
        for depth, part in enumerate(parts[:-1]):
            child = node.get(part)
            if not isinstance(child, dict):
                raise_config_error(
                    f"Unknown config key {key!r}",
                    key=key,
                    value=value,
                    category="unknown_key",
                )
            node = child
            if depth == 0 and part in {"experiment", "full_overrides"}:
                # Free-form subtrees: create intermediate levels on demand.
                for inner in parts[1:-1]:
                    node = node.setdefault(inner, {})
                break
        leaf = parts[-1]
        if leaf not in node and parts[0] not in {"experiment", "full_overrides"}:
            raise_config_error(
                f"Unknown config key {key!r}",
                key=key,
                value=value,
                category="unknown_key",
            )
        node[leaf] = value
        logger.debug("Override %s=%r", key, value)

    try:
        return ScenarioConfig.model_validate(tree)
    except ValidationError as e:
        raise config_error_from_validation(e, source="overrides") from e
