from typing import Any

from rainbow_ttd.experiments.base import BaseExperiment
from rainbow_ttd.experiments.codebook_map import CodebookMap
from rainbow_ttd.experiments.distance_rmse import DistanceRmse
from rainbow_ttd.experiments.gain_vs_freq import GainVsFreq
from rainbow_ttd.experiments.impairment_sweep import ImpairmentSweep
from rainbow_ttd.experiments.papr_ccdf import PaprCcdfExperiment
from rainbow_ttd.experiments.planar_contour import PlanarContour
from rainbow_ttd.experiments.squint_error import SquintError
from rainbow_ttd.experiments.sweep_compare import SweepCompare


ExperimentClass = type[BaseExperiment[Any]]

EXPERIMENT_REGISTRY: dict[str, ExperimentClass] = {
    "squint-error": SquintError,
    "gain-vs-freq": GainVsFreq,
    "codebook-map": CodebookMap,
    "impairment-sweep": ImpairmentSweep,
    "papr-ccdf": PaprCcdfExperiment,
    "distance-rmse": DistanceRmse,
    "planar-contour": PlanarContour,
    "sweep-compare": SweepCompare,
}


def get_experiment_by_name(name: str) -> ExperimentClass | None:
    return EXPERIMENT_REGISTRY.get(name.lower().strip())
