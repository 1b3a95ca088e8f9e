"""Exception hierarchy shared by every saturn module."""


class SaturnError(Exception):
    """Base class for all errors raised by saturn."""


class DomainError(SaturnError, ValueError):
    """A point lies outside the domain of the kernel or target function."""


class ParameterError(SaturnError, ValueError):
    """A numeric parameter (regularization, exponent, count) is out of range."""


class UnsupportedError(SaturnError, ValueError):
    """The requested object exists in the catalogue but lacks this capability."""


class ConfigError(SaturnError, ValueError):
    """Invalid experiment configuration or mismatched components."""


class FitError(SaturnError, ValueError):
    """A log-log rate fit cannot be performed on the supplied points."""


class NumericError(SaturnError, ArithmeticError):
    """Linear-algebra failure: non-finite Gram entries, indefinite spectrum."""


class EmptyDataError(SaturnError, ValueError):
    """A dataset with no samples was passed where n >= 1 is required."""
