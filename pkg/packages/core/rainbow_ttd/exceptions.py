from typing import Any


class RainbowTTDError(Exception):
    """Base exception for all rainbow_ttd errors."""


class ConfigurationError(RainbowTTDError):
    """Scenario or experiment configuration that cannot be used as given."""

    def __init__(
        self,
        detail: str,
        *,
        key: str | None = None,
        value: Any = None,
        category: str = "unknown",
        cause: Exception | None = None,
    ) -> None:
        super().__init__(detail)
        self.detail = detail
        self.key = key
        self.value = value
        self.category = category
        self.cause = cause

    def __str__(self) -> str:
        return self.detail


class InvariantViolation(RainbowTTDError):
    """A computed result broke a property the experiment is required to hold."""

    def __init__(
        self,
        detail: str,
        *,
        invariant: str,
        observed: Any = None,
        expected: Any = None,
    ) -> None:
        super().__init__(detail)
        self.detail = detail
        self.invariant = invariant
        self.observed = observed
        self.expected = expected

    def __str__(self) -> str:
        return self.detail


class AngleDomainError(RainbowTTDError, ValueError):
    """Angle outside the [-pi/2, pi/2] field of view."""

    def __init__(self, angle_rad: float) -> None:
        super().__init__(f"Angle {angle_rad!r} rad is outside [-pi/2, pi/2]")
        self.angle_rad = angle_rad


class DimensionError(RainbowTTDError, ValueError):
    """Vectors or matrices that do not belong to the same array/waveform."""
