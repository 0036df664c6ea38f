"""Exception types shared across the package."""


class CutterKitError(Exception):
    """Base class for all cutterkit errors."""


class UsageError(CutterKitError, ValueError):
    """Invalid arguments or a violated precondition."""


class InfeasibleError(CutterKitError):
    """A requested intersection is empty."""


class DegenerateSubgradientError(UsageError):
    """Zero subgradient at a point where the function is positive."""


class DivergenceError(CutterKitError):
    """An iteration produced a non-finite iterate.

    Carries the partial trace recorded up to the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EstimationError(CutterKitError):
    """A modulus estimate had no usable samples."""


class ConfigError(CutterKitError):
    """An experiment configuration could not be parsed."""


class ProbeFailure(CutterKitError):
    """One or more diagnostic probes failed."""
