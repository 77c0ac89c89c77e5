"""Error hierarchy shared by the services and the command line."""
from __future__ import annotations

from typing import Optional


class AVFeasibilityError(Exception):
    """Base class for all package errors."""


class ValidationError(AVFeasibilityError):
    """Invalid user input (files, scenario values).

    Args:
        message: Reason the value was rejected
        field: Name of the offending field, when there is one
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.reason = message
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class WeatherFormatError(ValidationError):
    """A weather file does not follow the expected table format."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScenarioError(ValidationError):
    """A scenario value is missing, unknown or out of range.

    Args:
        key: Dotted locator of the offending key, e.g. ``av.pitch_over_height``
        message: Human readable reason
    """

    def __init__(self, key: str, message: str) -> None:
        self.key = key
        super().__init__(message, field=key)


class SimulationError(AVFeasibilityError):
    """The model cannot produce a result for otherwise valid input."""


class DegenerateInputError(SimulationError):
    """A baseline quantity the model divides by is zero."""


class SweepCellError(SimulationError):
    """A sweep cell failed; carries the grid coordinates."""

    def __init__(
        self, pitch_over_height: float, m_l: Optional[float], cause: Exception
    ) -> None:
        self.pitch_over_height = pitch_over_height
        self.m_l = m_l
        self.cause = cause
        where = f"p/h={pitch_over_height:g}"
        if m_l is not None:
            where += f", M_L={m_l:g}"
        super().__init__(f"sweep cell ({where}) failed: {cause}")
