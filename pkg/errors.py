"""Exceptions shared by the models, samplers, diagnostics and harness."""

from typing import Optional


class HmcBenchError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(HmcBenchError, ValueError):
    """A spec, config or CLI value is missing or invalid."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class OutOfSupportError(HmcBenchError, ValueError):
    """A position lies outside the support of the target model."""

    def __init__(self, message: str, coordinate: Optional[int] = None):
        super().__init__(message)
        self.coordinate = coordinate


class TrajectoryDiverged(HmcBenchError, ArithmeticError):
    """A numerical trajectory produced non-finite values or left the support.

    Samplers treat this as a rejected proposal, never as a failed run.
    """


class DegenerateSeriesError(HmcBenchError, ValueError):
    """A series has zero variance (or too few points) to be analysed."""


class NotConvergedError(HmcBenchError, RuntimeError):
    """Burn-in detection found no point where the chain settles."""


class DegenerateFitError(HmcBenchError, ValueError):
    """An order fit had nothing to fit (identical or zero drifts)."""
