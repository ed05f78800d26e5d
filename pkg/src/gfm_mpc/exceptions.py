"""Exception hierarchy shared by all modules."""


class GfmError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GfmError, ValueError):
    """An input is non-finite or outside the domain of a formula."""


class DegenerateGridError(DomainError):
    """The grid condition makes a formula singular (e.g. zero voltage or reactance)."""


class ParameterError(GfmError, ValueError):
    """A parameter combination is invalid (e.g. a non-positive denominator)."""


class NoEquilibriumError(GfmError):
    """The grid cannot carry the reference power; no stable equilibrium exists."""


class IntegrationError(GfmError, ArithmeticError):
    """The plant integration produced a non-finite state."""


class ConfigError(GfmError, ValueError):
    """A scenario configuration is malformed or incomplete."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndeterminateError(GfmError):
    """A trajectory is too short to classify."""


class AnalysisDegenerateError(GfmError):
    """A study has no meaningful answer (e.g. unstable at zero fault duration)."""
