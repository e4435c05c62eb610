"""Exception types shared across the package."""

from __future__ import annotations


class SpinorEfimovError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(SpinorEfimovError, ValueError):
    """Quantum numbers, spins or parameters outside their allowed range."""


class PoleError(SpinorEfimovError, ArithmeticError):
    """Evaluation requested too close to a pole of the trigonometric factors."""

    def __init__(self, s: float, message: str | None = None):
        self.s = s
        super().__init__(message or f"s={s!r} lies within the pole threshold of an even integer")


class RootFindingError(SpinorEfimovError, RuntimeError):
    """A bracket failed to converge or the root count was inconsistent."""

    def __init__(self, message: str, interval: tuple[float, float] | None = None):
        self.interval = interval
        super().__init__(message if interval is None else f"{message} on interval {interval}")


class NonPlateauError(SpinorEfimovError, RuntimeError):
    """Region roots changed when the surrogate lengths were rescaled."""


class DomainError(SpinorEfimovError, ValueError):
    """Inputs outside the validity domain of a closed-form expression."""
