"""
Exception hierarchy.

Every error raised on purpose by the package derives from ABPairError and
carries the process exit code the CLI should return for it.
"""


class ABPairError(Exception):
    """Base class for package errors."""

    exit_code = 1


# ============ Physics input (exit 2) ============

class PhysicsInputError(ABPairError):
    """Invalid physical input."""

    exit_code = 2


class BelowThresholdError(PhysicsInputError):
    """Photon energy at or below the pair threshold 2M."""


class KinematicsError(PhysicsInputError):
    """Kinematically forbidden point or momentum-excess violation."""


class IncidenceError(PhysicsInputError):
    """Closed form requested for a photon that is not at normal incidence."""


class RegimeError(PhysicsInputError):
    """Limit form requested far outside its regime of validity."""


class BesselDomainError(PhysicsInputError, ValueError):
    """Bessel order outside the supported range or negative argument."""


class ConfigError(ABPairError):
    """Malformed configuration file, environment value or flag."""

    exit_code = 2


# ============ Numerical failures (exit 1) ============

class NumericalError(ABPairError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 1


class QuadratureError(NumericalError):
    """Quadrature did not converge or the tail extrapolation residual is too large."""


class TruncationError(NumericalError):
    """Requested truncation cannot meet the requested tolerance."""


# ============ Warnings ============

class RegimeWarning(UserWarning):
    """Limit form used moderately outside its regime."""
