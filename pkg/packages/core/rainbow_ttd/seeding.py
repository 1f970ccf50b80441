"""Seed handling shared by every random draw in the package.

Trial i of a Monte Carlo run always derives its generators from
SeedSequence(base_seed + i), so trials are independent of execution order.
"""

from collections.abc import Callable
from typing import NamedTuple

import numpy as np


Seed = int | np.random.SeedSequence | np.random.Generator

# Called with the completed and total counts after every finished unit of work.
ProgressCallback = Callable[[int, int], None]


def make_rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class TrialStreams(NamedTuple):
    truth: np.random.Generator
    channel: np.random.Generator
    impairment: np.random.Generator
    pilots: np.random.Generator
    noise: np.random.Generator


def trial_streams(base_seed: int, trial: int) -> TrialStreams:
    """Independent sub-streams of trial `trial`, one per random concern."""
    if trial < 0:
        msg = "trial index must be nonnegative"
        raise ValueError(msg)
    sequence = np.random.SeedSequence(base_seed + trial)
    children = sequence.spawn(len(TrialStreams._fields))
    return TrialStreams(*(np.random.default_rng(child) for child in children))
