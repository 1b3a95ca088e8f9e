"""Spectral regularization filters g_lambda(t).

A spectral estimator applies ``g_lambda`` to the eigenvalues of the normalised
Gram matrix.  ``t * g_lambda(t)`` stays in [0, 1]; the residual
``r_lambda(t) = 1 - t g_lambda(t)`` measures how much of an eigen-direction the
filter leaves un-fitted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnsupportedError


@dataclass(frozen=True)
class SpectralFilter:
    id: str
    name: str
    qualification: float  # reporting only


FILTERS = {
    "krr": SpectralFilter("krr", "kernel ridge regression", 1.0),
    "gf": SpectralFilter("gf", "gradient flow", float("inf")),
    "cut": SpectralFilter("cut", "spectral cut-off", float("inf")),
}


def get_filter(filt) -> SpectralFilter:
    if isinstance(filt, SpectralFilter):
        return filt
    try:
        return FILTERS[filt]
    except KeyError:
        raise UnsupportedError(f"unknown filter id {filt!r}; expected one of {sorted(FILTERS)}") from None


def _check_lambda(lam):
    if not np.all(np.asarray(lam) > 0):
        raise ParameterError(f"regularization parameter must be positive, got {lam}")


def filter_value(filt, t, lam):
    """g_lambda(t), vectorised over ``t``.

    krr: 1/(t + lambda).  gf: (1 - exp(-t/lambda))/t with value 1/lambda at
    t = 0 (stopping time 1/lambda).  cut: 1/t for t >= lambda, else 0.
    """
    filt = get_filter(filt)
    _check_lambda(lam)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ParameterError("filter argument must be nonnegative")
    if filt.id == "krr":
        out = 1.0 / (t_arr + lam)
    elif filt.id == "gf":
        # (1 - e^{-x})/x with x = t/lambda; the series branch covers tiny and subnormal t
        x = t_arr / lam
        safe = np.where(x > 1e-8, x, 1.0)
        out = np.where(x > 1e-8, -np.expm1(-safe) / safe, 1.0 - 0.5 * x) / lam
    else:
        keep = t_arr >= lam
        out = np.where(keep, 1.0 / np.where(keep, t_arr, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def residual_value(filt, t, lam):
    """r_lambda(t) = 1 - t g_lambda(t), computed without cancellation."""
    filt = get_filter(filt)
    _check_lambda(lam)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ParameterError("filter argument must be nonnegative")
    if filt.id == "krr":
        out = lam / (t_arr + lam)
    elif filt.id == "gf":
        out = np.exp(-t_arr / lam)
    else:
        out = np.where(t_arr >= lam, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
