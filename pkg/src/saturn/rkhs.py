"""Population quantities computed from a Mercer eigen-system.

Functions are represented by finitely many coordinates in the orthonormal
eigenbasis, ``f = sum_i a_i e_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ParameterError
from .kernels import EigenSystem

# explicit terms before switching to the integral tail
EFFDIM_MIN_TERMS = 4096


@dataclass(frozen=True)
class SourceFunction:
    """f = sum_i a_i e_i with finitely many nonzero coordinates."""

    indices: tuple[int, ...]
    coefficients: tuple[float, ...]
    eigsys: EigenSystem

    def __post_init__(self):
        if len(self.indices) != len(self.coefficients):
            raise ParameterError("indices and coefficients differ in length")
        if any(int(i) < 1 for i in self.indices):
            raise ParameterError("eigen indices start at 1")

    @classmethod
    def eigenfunction(cls, eigsys: EigenSystem, index: int, scale: float = 1.0) -> SourceFunction:
        return cls((int(index),), (float(scale),), eigsys)

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def _arrays(self):
        return np.asarray(self.indices, dtype=np.int64), np.asarray(self.coefficients, dtype=np.float64)

    def __call__(self, x):
        idx, a = self._arrays()
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if len(idx) == 0:
            return np.zeros_like(x)
        out = np.zeros_like(x)
        for i, ai in zip(idx, a):
            out += ai * np.atleast_1d(self.eigsys.eigenfunction(i, x))
        return out


def interpolation_norm(f: SourceFunction, alpha: float) -> float:
    """Norm of ``f`` in the interpolation space [H]^alpha:
    (sum_i a_i^2 lambda_i^{-alpha})^{1/2}."""
    if alpha < 0:
        raise ParameterError("alpha must be nonnegative")
    idx, a = f._arrays()
    if len(idx) == 0:
        return 0.0
    lam_i = f.eigsys.eigenvalue(idx)
    return float(np.sqrt(np.sum(a**2 * lam_i ** (-alpha))))


def effective_dimension(eigsys: EigenSystem, lam: float, p: float = 1.0) -> float:
    """N_p(lambda) = sum_i (lambda_i / (lambda_i + lambda))^p.

    The first M terms are summed explicitly, with M far enough past the knee
    lambda_i ~ lambda that lambda_M <= lambda / 100.  The remainder is the
    integral of the same summand over [M + 1/2, inf), treating the index as
    continuous; the midpoint shift makes its relative error O(M^-2).
    """
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    _, c2 = eigsys.decay_constants()
    m = max(EFFDIM_MIN_TERMS, int(math.ceil(10.0 * math.sqrt(c2 / lam))))
    lam_i = eigsys.eigenvalue(np.arange(1, m + 1))
    head = float(np.sum(((lam_i / (lam_i + lam)) ** p)[::-1]))

    def summand(x):
        li = float(eigsys.eigenvalue(x))
        return (li / (li + lam)) ** p

    tail, _ = integrate.quad(summand, m + 0.5, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return head + tail


def population_bias_sq(f: SourceFunction, lam: float) -> float:
    """lambda^2 ||(T + lambda)^{-1} f||^2 = lambda^2 sum_i a_i^2 / (lambda_i + lambda)^2."""
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    idx, a = f._arrays()
    if len(idx) == 0:
        return 0.0
    lam_i = f.eigsys.eigenvalue(idx)
    return float(lam**2 * np.sum(a**2 / (lam_i + lam) ** 2))


def population_variance_proxy(eigsys: EigenSystem, lam: float, n: int, sigma_bar: float) -> float:
    """(sigma_bar^2 / n) N_2(lambda)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return sigma_bar**2 / n * effective_dimension(eigsys, lam, 2.0)
