"""Exception types shared across the package."""

from __future__ import annotations


class FracAdaptError(Exception):
    """Base class for all errors raised by fracadapt."""


class DomainError(FracAdaptError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(FracAdaptError, ValueError):
    """Spatial vector dimensions do not match the operator."""


class AccuracyError(FracAdaptError, ArithmeticError):
    """A requested tolerance could not be reached.

    ``achieved`` carries the best error estimate that was obtained.
    """

    def __init__(self, message: str, achieved: float) -> None:
        super().__init__(f"{message} (achieved estimate {achieved:.3e})")
        self.achieved = achieved


class NonConvergenceError(FracAdaptError, RuntimeError):
    """The adaptive controller exhausted its retry budget on one step."""

    def __init__(self, step: int, retries: int, last_ratio: float, t_trial: float) -> None:
        super().__init__(
            f"step {step}: no acceptable step after {retries} trials "
            f"(last worst ratio {last_ratio:.3e} at trial t={t_trial:.6e})"
        )
        self.step = step
        self.retries = retries
        self.last_ratio = last_ratio
        self.t_trial = t_trial


class StateError(FracAdaptError, RuntimeError):
    """Required data (e.g. a reference solution) is missing."""
