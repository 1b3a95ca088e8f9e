"""Reference implementations that share no code path with the package.

Everything here is plain numpy/mpmath written from the defining formulas,
used to freeze expected values in the tests.
"""
import math

import mpmath
import numpy as np


def n2_heavyside_series(lam):
    """sum_{n>=1} (lambda_n/(lambda_n + lam))^2 with lambda_n = 1/(pi n)^2.

    Uses sum_n 1/(n^2 + b^2)^2 = pi coth(pi b)/(4 b^3) + pi^2 csch^2(pi b)/(4 b^2) - 1/(2 b^4)
    with b^2 = 1/(lam pi^2), evaluated in 40-digit arithmetic.
    """
    with mpmath.workdps(40):
        a = mpmath.mpf(lam) * mpmath.pi**2
        b = 1 / mpmath.sqrt(a)
        s = (mpmath.pi * mpmath.coth(mpmath.pi * b) / (4 * b**3)
             + mpmath.pi**2 * mpmath.csch(mpmath.pi * b) ** 2 / (4 * b**2) - 1 / (2 * b**4))
        return float(s / a**2)


def n2_heavyside_nsum(lam):
    """Same series by direct mpmath summation (reliable for lam not too small)."""
    with mpmath.workdps(30):
        a = mpmath.mpf(lam) * mpmath.pi**2
        return float(mpmath.nsum(lambda n: 1 / (1 + a * n**2) ** 2, [1, mpmath.inf]))


def n2_heavyside_closed_form():
    """sum_n 1/(1 + n^2)^2 = (pi coth pi + pi^2 csch^2 pi - 2) / 4."""
    pi = math.pi
    return (pi / math.tanh(pi) + pi**2 / math.sinh(pi) ** 2 - 2.0) / 4.0


def k_min(x, y):
    return np.minimum.outer(np.asarray(x, float), np.asarray(y, float))


def k_heavyside(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return np.minimum.outer(x, y) * (1.0 - np.maximum.outer(x, y))


def k_truncpow(p, A, B):
    diff = A[:, None, :] - B[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    return np.clip(1.0 - dist, 0.0, None) ** p


def krr_solve(K, y, lam):
    n = len(y)
    return np.linalg.solve(K + n * lam * np.eye(n), y)


def truncated_bias_sq(kind, x, lam, target_index, m=4000):
    """lambda^2 ||(T_X + lambda)^{-1} f*||^2_{L2} for f* = e_k, computed in the
    eigenbasis truncated at m terms.

    T_X = (1/n) sum_i k(x_i, .) <k(x_i, .), .>_H acts on L2 coordinates as
    Lambda^{1/2} (Phi'Phi/n) Lambda^{1/2} in the basis {sqrt(lambda_i) e_i}
    of H; with g = sqrt(Lambda) h this becomes the matrix
    A = Lambda Phi'Phi / n on L2 coordinates.
    """
    freq = (np.arange(1, m + 1) - 0.5) * math.pi if kind == "min" else np.arange(1, m + 1) * math.pi
    lam_i = 1.0 / freq**2
    phi = math.sqrt(2.0) * np.sin(np.outer(x, freq))
    n = len(x)
    A = (lam_i[:, None] * (phi.T @ phi)) / n
    f = np.zeros(m)
    f[target_index - 1] = 1.0
    h = np.linalg.solve(A + lam * np.eye(m), f)
    return lam**2 * float(h @ h)


def ols_rate(n, err):
    """Negated slope of the least-squares line through (ln n, ln err)."""
    ln, le = np.log(n), np.log(err)
    slope = np.sum((ln - ln.mean()) * (le - le.mean())) / np.sum((ln - ln.mean()) ** 2)
    return -slope, le.mean() - slope * ln.mean()


def extrapolated_bias_sq(kind, x, lam, target_index, m=2000):
    """Richardson extrapolation of ``truncated_bias_sq`` in m (error is O(1/m))."""
    return 2.0 * truncated_bias_sq(kind, x, lam, target_index, 2 * m) - truncated_bias_sq(kind, x, lam, target_index, m)


def n1_min_closed_form(lam):
    """sum_n 1/(1 + lam pi^2 (n - 1/2)^2) = (pi/(2 sqrt a)) tanh(pi/sqrt a), a = lam pi^2."""
    z = math.pi / math.sqrt(lam * math.pi**2)
    return 0.5 * z * math.tanh(z)
