"""Exception types shared across the package."""

from __future__ import annotations


class TrimodeError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TrimodeError):
    """Malformed configuration: unknown key, bad value, bad section."""


class ConvergenceError(TrimodeError):
    """Fixed-point iteration exhausted its budget without meeting tolerance."""

    def __init__(self, message: str, last_residual: float = float("nan")):
        super().__init__(message)
        self.last_residual = last_residual


class DivergenceError(TrimodeError):
    """Iterates became NaN/Inf during the solve."""


class GaugeError(TrimodeError):
    """Effective coupling is not real after the global phase rotation."""


class PreconditionError(TrimodeError):
    """An operation received inputs violating its contract."""


class UnstableSystemError(PreconditionError):
    """Stationary covariance requested for a linearly unstable drift matrix."""


class NumericalError(TrimodeError):
    """A numerical routine failed beyond recoverable round-off."""
