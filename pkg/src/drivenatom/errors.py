"""Shared exception and warning types.

Exit-code mapping used by the command line front end:
ConfigError -> 2, IntegrationError / ConvergenceError -> 3, OSError -> 4.
"""
from __future__ import annotations


class DomainError(ValueError):
    """A mathematical argument is outside the supported domain."""


class ConfigError(ValueError):
    """Invalid or contradictory run configuration."""


class IntegrationError(RuntimeError):
    """The initial value solver failed to meet its step-control targets."""


class ConvergenceError(RuntimeError):
    """An iterative numerical scheme failed to converge."""


class DegenerateFloquetError(ConvergenceError):
    """The characteristic exponent sits in a band where a route is undefined."""


class IntegralityError(ConvergenceError):
    """Neither (or both) of the shifted exponents is close to an integer,
    so the sign rule for the semiclassical line extraction cannot be applied."""


class ProjectionConditioningError(ConvergenceError):
    """The least-squares design matrix is too ill-conditioned to trust."""


class NumericalConsistencyWarning(UserWarning):
    """An internal cross-check exceeded its expected tolerance."""


class ConditioningWarning(UserWarning):
    """A linear solve was ill-conditioned; a fallback path was taken."""


class ValidityWarning(UserWarning):
    """An asymptotic approximation is being used outside its comfort zone."""
