import sys

from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path

import rainbow_ttd as rt

from rainbow_ttd.config import apply_overrides, dump_config, shipped_config_names
from rainbow_ttd.exceptions import (
    ConfigurationError,
    InvariantViolation,
    RainbowTTDError,
)
from rainbow_ttd.experiments import EXPERIMENT_REGISTRY
from rainbow_ttd.seeding import ProgressCallback
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TextColumn,
    TimeRemainingColumn,
)

from rainbow_ttd_cli.utils import console, format_metric


EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


@contextmanager
def _failures_to_exit_codes() -> Iterator[None]:
    """Print package errors and exit with 2 (config), 3 (invariant) or 1."""
    try:
        yield
    except ConfigurationError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        if e.key:
            console.print(f"[dim]Key: {e.key}[/dim]")
        sys.exit(EXIT_CONFIG)
    except InvariantViolation as e:
        console.print(f"[red]Invariant violated ({e.invariant}):[/red] {e}")
        if e.expected is not None:
            console.print(
                f"[dim]Observed {format_metric(e.observed)}, "
                f"expected {format_metric(e.expected)}[/dim]"
            )
        sys.exit(EXIT_INVARIANT)
    except RainbowTTDError as e:
        console.print(f"[red]Error:[/red] {e}")
        sys.exit(EXIT_ERROR)


@contextmanager
def _progress_bar(name: str) -> Iterator[ProgressCallback]:
    with Progress(
        TextColumn(f"[bold blue]{name}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeRemainingColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task("", total=None)

        def update(done: int, total: int) -> None:
            progress.update(task, completed=done, total=total)

        yield update


def run_command(
    experiment: str,
    config_path: str | None,
    overrides: Sequence[str],
    seed: int | None,
    output_dir: str | None,
    full: bool,
) -> None:
    """
    Handle run command logic.

    Runs the experiment with a progress bar, then prints the summary metrics
    and the artifacts written.
    """
    with _failures_to_exit_codes(), _progress_bar(experiment) as progress:
        report = rt.run_experiment(
            experiment,
            config_path,
            overrides,
            seed=seed,
            output_dir=output_dir,
            full=full,
            progress=progress,
        )

    console.print(f"[green]✓[/green] [bold]{report.experiment}[/bold] finished")
    for key, value in sorted(report.summary.items()):
        console.print(f"  [cyan]{key}[/cyan]: {format_metric(value)}")
    console.print(f"[dim]Wrote {len(report.files)} files to {report.output_dir}[/dim]")
    for path in report.files:
        console.print(f"  [dim]{path.name}[/dim]")


def validate_config_command(path: str, overrides: Sequence[str]) -> None:
    with _failures_to_exit_codes():
        config = rt.load_config(Path(path))
        config = apply_overrides(config, list(overrides))

    console.print(f"[green]✓[/green] {path} is a valid scenario")
    console.print(
        f"  [dim]N_R={config.arrays.n_rx} N_T={config.arrays.n_tx} "
        f"M={config.ofdm.loaded_count}/{config.ofdm.m_total} "
        f"R={config.codebook.diversity} D={config.direction_count} "
        f"Q={config.estimator.dictionary_size}[/dim]"
    )


def show_config_command(experiment: str, overrides: Sequence[str], full: bool) -> None:
    """Print the fully resolved scenario of an experiment or shipped config."""
    with _failures_to_exit_codes():
        config = rt.resolve_config(experiment, overrides=overrides, full=full)
    console.print_json(dump_config(config))


def list_command() -> None:
    console.print("\n[bold]Experiments:[/bold]\n")
    for name in sorted(EXPERIMENT_REGISTRY):
        description = EXPERIMENT_REGISTRY[name].description
        console.print(f"  • [cyan]{name:<18}[/cyan] {description}")

    console.print("\n[bold]Shipped configs:[/bold]\n")
    for name in shipped_config_names():
        console.print(f"  • {name}")
    console.print()
