"""
rainbow_ttd - Wideband phased-array and true-time-delay beam training simulation.

Basic usage:
    import rainbow_ttd as rt

    report = rt.run_experiment("squint-error", output_dir="results")
    print(report.summary)

    # Library level
    book = rt.build_rainbow_taps(16, 2e9, diversity=1)
    print(book.direction_angles())
"""

from rainbow_ttd._version import __version__
from rainbow_ttd.api import RunReport, resolve_config, run_experiment
from rainbow_ttd.array import ArrayGeometry, TapConfig
from rainbow_ttd.codebook import RainbowCodebook, build_rainbow_taps
from rainbow_ttd.config import ScenarioConfig, load_config
from rainbow_ttd.exceptions import (
    AngleDomainError,
    ConfigurationError,
    DimensionError,
    InvariantViolation,
    RainbowTTDError,
)
from rainbow_ttd.simulation import TrainingSimulation, compare_sweeping


__all__ = [
    "AngleDomainError",
    "ArrayGeometry",
    "ConfigurationError",
    "DimensionError",
    "InvariantViolation",
    "RainbowCodebook",
    "RainbowTTDError",
    "RunReport",
    "ScenarioConfig",
    "TapConfig",
    "TrainingSimulation",
    "__version__",
    "build_rainbow_taps",
    "compare_sweeping",
    "load_config",
    "resolve_config",
    "run_experiment",
]
