import logging
import os

from rich.console import Console
from rich.logging import RichHandler


# Shared console instance
console = Console()

LOG_LEVEL_ENV = "RAINBOW_TTD_LOG_LEVEL"


def setup_logging(verbose: bool) -> None:
    """DEBUG with --verbose, else RAINBOW_TTD_LOG_LEVEL, else WARNING."""
    if verbose:
        level = logging.DEBUG
    else:
        name = os.getenv(LOG_LEVEL_ENV, "WARNING").upper()
        level = logging.getLevelNamesMapping().get(name, logging.WARNING)

    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[
            RichHandler(
                console=console,
                rich_tracebacks=True,
                markup=False,
            )
        ],
    )


def format_metric(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return "n/a"
    return str(value)
