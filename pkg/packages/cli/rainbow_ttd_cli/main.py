import click

from rainbow_ttd_cli import __version__
from rainbow_ttd_cli.commands import (
    list_command,
    run_command,
    show_config_command,
    validate_config_command,
)
from rainbow_ttd_cli.utils import setup_logging


_SET_HELP = "Override a config value, e.g. --set link.snr_db=-10 (repeatable)"


@click.group()
@click.version_option(version=__version__, prog_name="rainbow-ttd")
def cli() -> None:
    """
    rainbow-ttd: wideband phased-array and TTD beam training experiments.

    Examples:
      rainbow-ttd list
      rainbow-ttd run squint-error --out results
      rainbow-ttd run impairment-sweep --set trials=200 --seed 7
      rainbow-ttd validate-config my-scenario.json

    Exit codes: 0 success, 2 configuration error, 3 invariant violation,
    1 any other failure.
    """


@cli.command(name="run")
@click.argument("experiment")
@click.option(
    "--config",
    "config_path",
    help="Scenario JSON file or shipped config name (default: the experiment's)",
)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
@click.option("--seed", type=int, help="Base seed; trial i uses seed + i")
@click.option(
    "--out",
    "output_dir",
    type=click.Path(file_okay=False),
    help="Output directory (default: results or RAINBOW_TTD_OUTPUT_DIR)",
)
@click.option("--full", is_flag=True, help="Full-scale run (apply full_overrides)")
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging")
def run_cmd(
    experiment: str,
    config_path: str | None,
    overrides: tuple[str, ...],
    seed: int | None,
    output_dir: str | None,
    full: bool,
    verbose: bool,
) -> None:
    """
    Run EXPERIMENT and write its CSVs, plot scripts and summary.json.

    Artifacts land in OUT/EXPERIMENT/.
    """
    setup_logging(verbose)
    run_command(experiment, config_path, overrides, seed, output_dir, full)


@cli.command(name="validate-config")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging")
def validate_config_cmd(path: str, overrides: tuple[str, ...], verbose: bool) -> None:
    """Check a scenario file (plus overrides) without running anything."""
    setup_logging(verbose)
    validate_config_command(path, overrides)


@cli.command(name="show-config")
@click.argument("name")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help=_SET_HELP)
@click.option("--full", is_flag=True, help="Apply full_overrides first")
def show_config_cmd(name: str, overrides: tuple[str, ...], full: bool) -> None:
    """Print the resolved scenario of an experiment or shipped config NAME."""
    setup_logging(verbose=False)
    show_config_command(name, overrides, full)


@cli.command(name="list")
def list_cmd() -> None:
    """List experiments and shipped configs."""
    list_command()


if __name__ == "__main__":
    cli()
