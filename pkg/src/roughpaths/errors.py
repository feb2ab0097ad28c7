"""Exception types shared across the package."""


class RoughPathsError(Exception):
    """Base class for errors raised by this package."""


class NonConvergenceError(RoughPathsError):
    """A dyadic refinement did not stabilize within the allowed depth."""

    def __init__(self, message, delta=None, depth=None):
        super().__init__(message)
        self.delta = delta
        self.depth = depth


class CoverageGapError(RoughPathsError):
    """A collection of intervals fails to cover the requested span."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainExitError(RoughPathsError):
    """A trace left the region where a map or one-form is defined."""
