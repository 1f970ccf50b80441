import logging

from abc import ABC, abstractmethod
from typing import ClassVar, Generic, TypeVar

from pydantic import BaseModel, ConfigDict, ValidationError

from rainbow_ttd.artifacts import ExperimentResult
from rainbow_ttd.config import ScenarioConfig
from rainbow_ttd.error_policy import config_error_from_validation
from rainbow_ttd.seeding import ProgressCallback


logger = logging.getLogger(__name__)


class ExperimentParams(BaseModel):
    """Experiment-specific knobs, read from the config's experiment section."""

    model_config = ConfigDict(frozen=True, extra="forbid")


ParamsT = TypeVar("ParamsT", bound=ExperimentParams)


class BaseExperiment(ABC, Generic[ParamsT]):
    """Base class for figure-reproducing experiments.

    An experiment performs no file I/O of its own. run_experiment() resolves
    the name to a class, builds the scenario config, calls run() for the
    tables and summary, writes them, and then calls check() so a violated
    property still leaves its artifacts behind for inspection.

    Subclasses set name, description and params_model, and read their own
    parameters from self.params.
    """

    name: ClassVar[str]
    description: ClassVar[str]
    params_model: type[ParamsT]

    def __init__(
        self,
        config: ScenarioConfig,
        *,
        progress: ProgressCallback | None = None,
    ) -> None:
        self.config = config
        self.params = self.parse_params(config)
        self.progress = progress

    def parse_params(self, config: ScenarioConfig) -> ParamsT:
        try:
            return self.params_model.model_validate(config.experiment)
        except ValidationError as e:
            error = config_error_from_validation(e, source=f"experiment {self.name}")
            if error.key:
                error.key = f"experiment.{error.key}"
            raise error from e

    def report(self, done: int, total: int) -> None:
        if self.progress is not None:
            self.progress(done, total)

    def progress_from(self, offset: int, total: int) -> ProgressCallback:
        """Report a sub-task's progress as part of a larger total."""
        return lambda done, _: self.report(offset + done, total)

    @abstractmethod
    def run(self) -> ExperimentResult:
        """Compute the experiment's tables, plots and summary.

        Raises:
            ConfigurationError: Parameters the experiment cannot use.
        """

    def check(self, result: ExperimentResult) -> None:
        """Override to assert the properties the experiment must hold.

        Raises:
            InvariantViolation: On the first property that fails.
        """
