import logging

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import JsonValue

from rainbow_ttd.artifacts import write_artifacts
from rainbow_ttd.config import (
    ScenarioConfig,
    apply_overrides,
    load_config,
    load_shipped_config,
    shipped_config_names,
)
from rainbow_ttd.error_policy import raise_config_error
from rainbow_ttd.exceptions import RainbowTTDError
from rainbow_ttd.experiments import EXPERIMENT_REGISTRY, get_experiment_by_name
from rainbow_ttd.seeding import ProgressCallback


logging.getLogger(__name__).addHandler(logging.NullHandler())
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunReport:
    """What one experiment run produced."""

    experiment: str
    output_dir: Path
    files: list[Path]
    summary: dict[str, JsonValue] = field(default_factory=dict)


def resolve_config(
    name: str,
    config_path: str | Path | None = None,
    overrides: Sequence[str] = (),
    *,
    seed: int | None = None,
    output_dir: str | Path | None = None,
    full: bool = False,
) -> ScenarioConfig:
    """
    Build the scenario an experiment would run with.

    config_path may also name a shipped config (e.g. impairment-sweep-rf).

    Order: config file (or the experiment's shipped default), then the
    full_overrides when full is set, then --set overrides, then seed and
    output directory.
    """
    if config_path is None:
        config = load_shipped_config(name)
    elif not Path(config_path).exists() and str(config_path) in shipped_config_names():
        config = load_shipped_config(str(config_path))
    else:
        config = load_config(config_path)

    if full and config.full_overrides:
        logger.debug("Applying full-scale overrides %s", config.full_overrides)
        config = apply_overrides(config, dict(config.full_overrides))
    config = apply_overrides(config, list(overrides))

    extra: dict[str, JsonValue] = {}
    if seed is not None:
        extra["base_seed"] = seed
    if output_dir is not None:
        extra["output_dir"] = str(output_dir)
    return apply_overrides(config, extra)


def run_experiment(
    name: str,
    config_path: str | Path | None = None,
    overrides: Sequence[str] = (),
    *,
    seed: int | None = None,
    output_dir: str | Path | None = None,
    full: bool = False,
    progress: ProgressCallback | None = None,
) -> RunReport:
    """
    Run one registered experiment and write its artifacts.

    Artifacts go to <output_dir>/<name>/: one CSV per table, a matplotlib
    script per plot and summary.json.

    Args:
        name: Registered experiment name (see EXPERIMENT_REGISTRY).
        config_path: Scenario JSON; defaults to the experiment's shipped config.
        overrides: key=value items with dotted keys, applied after the file.
        seed: Replaces the config's base_seed.
        output_dir: Replaces the config's output_dir.
        full: Apply the config's full_overrides (full-scale run).
        progress: Called with (done, total) as Monte Carlo work completes.

    Returns:
        RunReport with the written files and the summary metrics.

    Raises:
        ConfigurationError: Unknown experiment, bad config or bad overrides.
        InvariantViolation: The results broke a property the experiment checks;
            the artifacts are written before this is raised.
        RainbowTTDError: Any other failure inside the experiment.

    Example:
        >>> report = run_experiment("squint-error", output_dir="results")
        >>> report.summary["peak_error_deg_fbw_0.25"]
    """
    experiment_class = get_experiment_by_name(name)
    if experiment_class is None:
        known = ", ".join(EXPERIMENT_REGISTRY)
        raise_config_error(
            f"Unknown experiment {name!r}; expected one of: {known}",
            value=name,
            category="unknown_experiment",
        )

    config = resolve_config(
        experiment_class.name,
        config_path,
        overrides,
        seed=seed,
        output_dir=output_dir,
        full=full,
    )
    logger.debug(
        "Running %s with seed %d into %s",
        experiment_class.name,
        config.base_seed,
        config.output_dir,
    )

    try:
        experiment = experiment_class(config, progress=progress)
        result = experiment.run()
    except RainbowTTDError:
        raise
    except Exception as e:
        logger.debug(
            "Unexpected error from %s: %r", experiment_class.name, e, exc_info=True
        )
        msg = f"Unexpected error from {experiment_class.name}: {e}"
        raise RainbowTTDError(msg) from e

    target = Path(config.output_dir) / experiment_class.name
    files = write_artifacts(result, target, experiment_class.name)
    experiment.check(result)
    return RunReport(
        experiment=experiment_class.name,
        output_dir=target,
        files=files,
        summary=result.summary,
    )
