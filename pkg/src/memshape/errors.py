"""Exception types shared across the package."""


class MemshapeError(Exception):
    """Base class for all package-specific errors."""


class InvalidProfileError(MemshapeError):
    """Curvature profile parameters violate the profile's constraints."""


class UnsupportedProfileError(MemshapeError):
    """Operation not defined for this curvature profile kind."""


class SingularStateError(MemshapeError):
    """State has x1 <= 0 where the equations divide by x1."""


class SingularSystemError(MemshapeError):
    """Newton linear system is singular.

    Carries the Newton iteration index at which factorization failed.
    """

    def __init__(self, iteration: int, message: str = ""):
        self.iteration = iteration
        super().__init__(message or f"singular Newton system at iteration {iteration}")


class OutOfDomainError(MemshapeError):
    """Evaluation point lies outside the solution domain."""


class InsufficientDataError(MemshapeError):
    """Not enough valid data points for the requested operation."""


class ConfigError(MemshapeError):
    """Run configuration is malformed or inconsistent."""
