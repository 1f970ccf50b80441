from rainbow_ttd.experiments.base import BaseExperiment, ExperimentParams
from rainbow_ttd.experiments.registry import (
    EXPERIMENT_REGISTRY,
    get_experiment_by_name,
)


__all__ = [
    "EXPERIMENT_REGISTRY",
    "BaseExperiment",
    "ExperimentParams",
    "get_experiment_by_name",
]
