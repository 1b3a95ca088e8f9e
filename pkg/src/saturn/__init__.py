"""Spectral regularization for kernel regression and the KRR saturation effect."""
from ._backend import BACKEND
from .errors import (ConfigError, DomainError, EmptyDataError, FitError, NumericError,
                     ParameterError, SaturnError, UnsupportedError)

__version__ = "0.1.0"
