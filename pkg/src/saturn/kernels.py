"""Kernels on [0, 1] and on the sphere S^2, their Mercer eigen-systems, and the
spherical harmonics used as regression targets.

Points are plain numpy arrays: a 1-D array of abscissae for the interval and an
``(m, 3)`` array of unit vectors for the sphere.  Every public entry point
validates its points before touching them.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, ParameterError, UnsupportedError

INTERVAL = "interval"
SPHERE = "sphere"

SPHERE_TOL = 1e-12
DEFAULT_TRUNCATION = 2000

# rows of the cross-kernel block are produced in chunks of about this many bytes
_BLOCK_BYTES = 64 * 2**20


@dataclass(frozen=True)
class Kernel:
    """A positive semi-definite kernel with closed form.

    ``id`` is the stable string used in config files and CSV columns:
    ``"min"``, ``"heavyside"`` or ``"truncpow<p>"``.
    """

    id: str
    domain: str
    kappa_sq: float
    holder_exponent: float = 1.0
    power: int | None = None

    @property
    def has_eigen_system(self) -> bool:
        return self.id in _EIGEN_FREQ

    @property
    def is_markov(self) -> bool:
        """True when the Gram matrix of distinct interior points has a
        tridiagonal inverse (covariance of a Gauss-Markov process)."""
        return self.id in ("min", "heavyside")

    def __call__(self, x, y):
        return eval_kernel(self, x, y)


_TRUNCPOW = re.compile(r"^truncpow(\d+)$")


def make_kernel(kernel_id: str) -> Kernel:
    """Look up a kernel by its stable id."""
    if kernel_id == "min":
        return Kernel("min", INTERVAL, kappa_sq=1.0)
    if kernel_id == "heavyside":
        # sup_x x(1 - x) = 1/4 at x = 1/2
        return Kernel("heavyside", INTERVAL, kappa_sq=0.25)
    match = _TRUNCPOW.match(kernel_id)
    if match:
        p = int(match.group(1))
        if p < 1:
            raise ParameterError(f"truncated power kernel needs p >= 1, got {p}")
        return Kernel(kernel_id, SPHERE, kappa_sq=1.0, power=p)
    raise UnsupportedError(f"unknown kernel id {kernel_id!r}")


# ---------------------------------------------------------------------------
# point validation


def check_points(domain: str, x) -> np.ndarray:
    """Validate points for ``domain`` and return them as a float array.

    Sphere points off the unit sphere by more than ``SPHERE_TOL`` raise
    ``DomainError``; the survivors are renormalised.
    """
    if domain == INTERVAL:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim > 1:
            raise DomainError(f"interval points must be scalars, got shape {arr.shape}")
        arr = np.atleast_1d(arr)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("interval points must lie in [0, 1]")
        return arr
    if domain == SPHERE:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise DomainError(f"sphere points must have shape (m, 3), got {arr.shape}")
        norms = np.linalg.norm(arr, axis=1)
        if not np.all(np.abs(norms - 1.0) <= SPHERE_TOL):
            raise DomainError("sphere points must have unit Euclidean norm")
        return arr / norms[:, None]
    raise UnsupportedError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# evaluation


def _block(kernel: Kernel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kernel.domain == INTERVAL:
        code = _backend._blocks_numpy.MIN if kernel.id == "min" else _backend._blocks_numpy.HEAVYSIDE
        return _backend.interval_block(code, a, b)
    return _backend.sphere_block(kernel.power, a, b)


def eval_kernel(kernel: Kernel, x, y) -> float:
    """k(x, y) for a single pair of points."""
    a = check_points(kernel.domain, x)
    b = check_points(kernel.domain, y)
    if len(a) != 1 or len(b) != 1:
        raise DomainError("eval_kernel takes exactly one point per argument")
    return float(_block(kernel, a, b)[0, 0])


def cross_gram(kernel: Kernel, a, b) -> np.ndarray:
    """The matrix (k(a_i, b_j))_{ij}."""
    a = check_points(kernel.domain, a)
    b = check_points(kernel.domain, b)
    return _block(kernel, a, b)


def gram(kernel: Kernel, x) -> np.ndarray:
    """Unnormalised Gram matrix K(X, X)."""
    x = check_points(kernel.domain, x)
    g = _block(kernel, x, x)
    # enforce exact symmetry; the closed forms are symmetric but float
    # rounding in the sphere distance may differ in the last bit
    return 0.5 * (g + g.T)


def cross_apply(kernel: Kernel, q, x, coef) -> np.ndarray:
    """Compute ``K(q, x) @ coef`` without holding the whole block in memory.

    ``coef`` may be a vector (n,) or a matrix (n, k).
    """
    q = check_points(kernel.domain, q)
    x = check_points(kernel.domain, x)
    coef = np.asarray(coef, dtype=np.float64)
    if coef.shape[0] != len(x):
        raise ParameterError(f"coefficient rows {coef.shape[0]} != number of anchors {len(x)}")
    if kernel.domain != INTERVAL:
        return _sphere_apply(kernel, q, x, coef)
    rows = max(1, _BLOCK_BYTES // (8 * max(len(x), 1)))
    out = np.empty((len(q),) + coef.shape[1:])
    for start in range(0, len(q), rows):
        stop = min(start + rows, len(q))
        out[start:stop] = _block(kernel, q[start:stop], x) @ coef
    return out


def _sphere_apply(kernel, q, x, coef):
    # The support is the cap of angular radius pi/3, so a query only meets
    # anchors whose polar angle is within pi/3 of its own.  With queries and
    # anchors both sorted by z each chunk of queries needs one band of anchors.
    xo = np.argsort(x[:, 2], kind="stable")
    xs, cs, xz = x[xo], coef[xo], x[xo, 2]
    qo = np.argsort(q[:, 2], kind="stable")
    out = np.empty((len(q),) + coef.shape[1:])
    rows = max(1, _BLOCK_BYTES // (8 * max(len(x), 1)))
    for start in range(0, len(q), rows):
        idx = qo[start:start + rows]
        qz = q[idx, 2]
        th_lo = np.arccos(min(qz[-1], 1.0))
        th_hi = np.arccos(max(qz[0], -1.0))
        z_hi = np.cos(max(th_lo - np.pi / 3, 0.0)) + 1e-9
        z_lo = np.cos(min(th_hi + np.pi / 3, np.pi)) - 1e-9
        j0, j1 = np.searchsorted(xz, [z_lo, z_hi])
        if j1 > j0:
            out[idx] = _block(kernel, q[idx], xs[j0:j1]) @ cs[j0:j1]
        else:
            out[idx] = 0.0
    return out


def iter_blocks(kernel: Kernel, q, x):
    """Yield ``(slice, K(q[slice], x))`` pieces covering all rows of ``q``."""
    q = check_points(kernel.domain, q)
    x = check_points(kernel.domain, x)
    rows = max(1, _BLOCK_BYTES // (8 * max(len(x), 1)))
    for start in range(0, len(q), rows):
        sl = slice(start, min(start + rows, len(q)))
        yield sl, _block(kernel, q[sl], x)


# ---------------------------------------------------------------------------
# analytic eigen-systems

# lambda_i = freq_i^{-2},  e_i(x) = sqrt(2) sin(freq_i x)
_EIGEN_FREQ = {
    "min": lambda i: (2.0 * i - 1.0) * math.pi / 2.0,
    "heavyside": lambda i: i * math.pi,
}
# (c1, c2) with c1 i^{-2} <= lambda_i <= c2 i^{-2}
_DECAY_CONSTANTS = {
    "min": (1.0 / math.pi**2, 4.0 / math.pi**2),
    "heavyside": (1.0 / math.pi**2, 1.0 / math.pi**2),
}


@dataclass(frozen=True)
class EigenSystem:
    """Mercer eigenpairs of the integral operator under the uniform measure."""

    kernel_id: str
    beta: float = 0.5
    truncation_m: int = DEFAULT_TRUNCATION

    def _freq(self, i):
        i = np.asarray(i)
        if np.any(i < 1):
            raise ParameterError("eigen indices start at 1")
        return _EIGEN_FREQ[self.kernel_id](i.astype(np.float64))

    def eigenvalue(self, i):
        """lambda_i, vectorised over integer arrays."""
        return 1.0 / self._freq(i) ** 2

    def eigenfunction(self, i, x):
        """e_i(x) = sqrt(2) sin(freq_i x)."""
        x = check_points(INTERVAL, x)
        val = math.sqrt(2.0) * np.sin(self._freq(i) * x)
        return val if val.size > 1 else float(val[0])

    def eigenvalues(self, m: int | None = None) -> np.ndarray:
        m = self.truncation_m if m is None else m
        return self.eigenvalue(np.arange(1, m + 1))

    def eigenfunctions(self, x, m: int | None = None) -> np.ndarray:
        """Matrix (e_j(x_i)) of shape (len(x), m)."""
        m = self.truncation_m if m is None else m
        x = check_points(INTERVAL, x)
        freq = self._freq(np.arange(1, m + 1))
        return math.sqrt(2.0) * np.sin(np.outer(x, freq))

    def decay_constants(self) -> tuple[float, float]:
        return _DECAY_CONSTANTS[self.kernel_id]

    @property
    def norm(self) -> float:
        """Operator norm ||T|| = lambda_1."""
        return float(self.eigenvalue(1))


def eigen_system(kernel: Kernel | str, truncation_m: int = DEFAULT_TRUNCATION) -> EigenSystem:
    if isinstance(kernel, str):
        kernel = make_kernel(kernel)
    if not kernel.has_eigen_system:
        raise UnsupportedError(
            f"kernel {kernel.id!r} has no analytic eigen-system; its decay rate is unknown"
        )
    if truncation_m < 1:
        raise ParameterError("truncation_m must be positive")
    return EigenSystem(kernel.id, beta=0.5, truncation_m=truncation_m)


def mercer_partial_sum(eigsys: EigenSystem, m: int, x, y) -> float:
    """sum_{i <= m} lambda_i e_i(x) e_i(y)."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    ex = eigsys.eigenfunctions(x, m)[0]
    ey = eigsys.eigenfunctions(y, m)[0]
    # add smallest terms first; ex * ey first keeps the result symmetric bit for bit
    return float(np.sum((eigsys.eigenvalues(m) * (ex * ey))[::-1]))


# ---------------------------------------------------------------------------
# spherical harmonics

_HARMONICS = {
    (1, 1): lambda p: math.sqrt(3.0 / (4.0 * math.pi)) * p[:, 0],
    (2, -2): lambda p: 0.5 * math.sqrt(15.0 / math.pi) * p[:, 0] * p[:, 1],
    (3, 2): lambda p: 0.25 * math.sqrt(105.0 / math.pi) * (p[:, 0] ** 2 - p[:, 1] ** 2) * p[:, 2],
}

# multiply by this to get unit L2 norm under the uniform probability measure
HARMONIC_PROBABILITY_SCALE = math.sqrt(4.0 * math.pi)


def spherical_harmonic(l: int, m: int, p):
    """Real spherical harmonic Y_l^m in Cartesian form (surface-measure normalised)."""
    try:
        fn = _HARMONICS[(l, m)]
    except KeyError:
        raise UnsupportedError(f"spherical harmonic ({l}, {m}) is not available") from None
    pts = check_points(SPHERE, p)
    val = fn(pts)
    return float(val[0]) if np.ndim(p) == 1 else val
