"""Conditional bias-variance decomposition and empirical checks of the
operator identities behind it.

Given a design X, the noise-averaged risk of a spectral estimator splits as

    E[ ||f_hat - f*||^2 | X ] = Bias^2 + Var,

    Bias^2 = || f* - (1/n) K(., X) g(K) f*[X] ||^2,
    Var    = (sigma^2 / n^2) int K(x, X) g(K)^2 K(X, x) dmu(x).

For KRR (g(K) = (K + lambda)^{-1}) the bias is lambda^2 ||(T_X + lambda)^{-1} f*||^2
by the resolvent identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import eigsh

from .errors import ParameterError
from .estimators import GramSpectrum, gram_spectrum, krr_direct
from .filters import filter_value
from .kernels import EigenSystem, Kernel, check_points, gram, iter_blocks
from .quadrature import Quadrature
from .rkhs import effective_dimension


@dataclass(frozen=True)
class BiasVarReport:
    bias_sq: float
    variance: float
    total: float
    lam: float
    n: int

    def as_row(self) -> dict:
        return {"lambda": self.lam, "n": self.n, "bias_sq": self.bias_sq,
                "variance": self.variance, "total": self.total}


def bias_variance_profile(kernel: Kernel, f_star, X, lams, sigma_bar: float, quad: Quadrature,
                          filt="krr", spectrum: GramSpectrum | None = None,
                          variance: bool = True) -> list[BiasVarReport]:
    """Bias^2 and Var for every lambda in ``lams`` on one design.

    One pass over the quadrature nodes serves all lambdas: the block
    K(nodes, X) U is reduced to per-eigenvector weights s_j = int (K(x, X) u_j)^2,
    after which Var(lambda) = sigma^2/n^2 sum_j g(d_j)^2 s_j.  For the
    piecewise-linear interval kernels the weights are integrated exactly
    instead (``markov_variance_weights``), which avoids the O(N n^2) product.
    """
    quad.require(kernel.domain)
    X = check_points(kernel.domain, X)
    lams = np.atleast_1d(np.asarray(lams, dtype=np.float64))
    if np.any(lams <= 0):
        raise ParameterError("lambda must be positive")
    if spectrum is None:
        spectrum = gram_spectrum(kernel, X)
    u, d, n = spectrum.eigenvectors, spectrum.eigenvalues, spectrum.n
    g = np.column_stack([filter_value(filt, d, lam) for lam in lams])
    # noiseless dual coefficients, one column per lambda
    coef = u @ (g * (u.T @ np.asarray(f_star(X), dtype=np.float64))[:, None]) / n

    exact_s = variance and kernel.is_markov
    bias = np.zeros(len(lams))
    s = markov_variance_weights(kernel, X, spectrum) if exact_s else np.zeros(n)
    for sl, block in iter_blocks(kernel, quad.nodes, X):
        w = quad.weights[sl]
        resid = block @ coef - np.asarray(f_star(quad.nodes[sl])).reshape(-1, 1)
        bias += w @ resid**2
        if variance and not exact_s:
            s += w @ (block @ u) ** 2
    var = sigma_bar**2 / n**2 * ((g**2).T @ s) if variance else np.full(len(lams), np.nan)
    return [BiasVarReport(float(b), float(v), float(b + v), float(lam), n)
            for b, v, lam in zip(bias, var, lams)]


def markov_variance_weights(kernel: Kernel, X, spectrum: GramSpectrum) -> np.ndarray:
    """s_j = int_0^1 (K(x, X) u_j)^2 dx, exactly, for the min and heavy-side kernels.

    Each K(., x_i) is piecewise linear with a kink at x_i, so K(., X) u_j is
    linear between consecutive sorted design points.  Its values there are
    K(X, X) u_j = n d_j u_j, it vanishes at 0, and at 1 it equals sum_i x_i u_ij
    (min) or 0 (heavy-side).  A linear piece with end values p, q over width h
    integrates to h (p^2 + p q + q^2) / 3.
    """
    X = check_points(kernel.domain, X)
    u, d, n = spectrum.eigenvectors, spectrum.eigenvalues, spectrum.n
    order = np.argsort(X, kind="stable")
    vals = (n * d) * u[order]
    at_one = X @ u if kernel.id == "min" else np.zeros(n)
    vals = np.vstack([np.zeros(n), vals, at_one])
    h = np.diff(np.concatenate([[0.0], X[order], [1.0]]))
    p, q = vals[:-1], vals[1:]
    return h @ (p * p + p * q + q * q) / 3.0


def empirical_bias_variance(kernel: Kernel, f_star, X, lam: float, sigma_bar: float,
                            quad: Quadrature, spectrum: GramSpectrum | None = None) -> BiasVarReport:
    """KRR conditional Bias^2 and Var for a single lambda."""
    return bias_variance_profile(kernel, f_star, X, [lam], sigma_bar, quad, "krr", spectrum)[0]


def monte_carlo_conditional_risk(kernel: Kernel, f_star, X, lam: float, sigma: float, quad: Quadrature,
                                 draws: int = 20000, seed: int = 0) -> tuple[float, float]:
    """Average of ||f_hat - f*||^2 over independent Gaussian noise draws with X
    held fixed.  KRR is fitted by direct linear solves, so this shares no code
    with ``bias_variance_profile`` beyond kernel evaluation and quadrature.

    Returns (mean, standard error).
    """
    quad.require(kernel.domain)
    X = check_points(kernel.domain, X)
    n = len(X)
    rng = np.random.default_rng(seed)
    fx = np.asarray(f_star(X), dtype=np.float64)
    Y = fx[:, None] + sigma * rng.standard_normal((n, draws))
    g = gram(kernel, X)
    A = sla.solve(g + n * lam * np.eye(n), Y, assume_a="pos")
    # ||K(., X) a - f||^2 = a'Ma - 2a'v + c under the quadrature
    M = np.zeros((n, n))
    v = np.zeros(n)
    c = 0.0
    for sl, block in iter_blocks(kernel, quad.nodes, X):
        w = quad.weights[sl]
        fq = np.asarray(f_star(quad.nodes[sl]), dtype=np.float64)
        M += block.T @ (w[:, None] * block)
        v += block.T @ (w * fq)
        c += float(w @ fq**2)
    risk = np.einsum("ik,ik->k", A, M @ A) - 2.0 * (v @ A) + c
    return float(risk.mean()), float(risk.std(ddof=1) / math.sqrt(draws))


# ---------------------------------------------------------------------------
# operator concentration


def operator_concentration_norm(eigsys: EigenSystem, X, lam: float, m: int | None = None) -> float:
    """Spectral norm of (T + lambda)^{-1/2} (T - T_X) (T + lambda)^{-1/2}.

    In the basis {sqrt(lambda_i) e_i} of H the operator is represented by
    diag(lambda_i/(lambda_i+lambda)) - S G S, where G_ij = (1/n) sum_k
    e_i(x_k) e_j(x_k) and S = diag(sqrt(lambda_i/(lambda_i+lambda))).
    """
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    m = eigsys.truncation_m if m is None else m
    X = check_points("interval", X)
    lam_i = eigsys.eigenvalues(m)
    ratio = lam_i / (lam_i + lam)
    phi = eigsys.eigenfunctions(X, m) * np.sqrt(ratio)
    mat = np.diag(ratio) - phi.T @ phi / len(X)
    if m <= 256:
        return float(np.max(np.abs(np.linalg.eigvalsh(mat))))
    val = eigsh(mat, k=1, which="LM", v0=np.ones(m), return_eigenvectors=False)
    return float(abs(val[0]))


def concentration_bound(eigsys: EigenSystem, lam: float, n: int, delta: float, kappa_sq: float) -> float:
    """Right-hand side 4 kappa^2 B/(3 lambda n) + sqrt(2 kappa^2 B/(lambda n)),
    B = ln(4 (||T|| + lambda) N(lambda) / (delta ||T||)), which holds with
    probability at least 1 - delta."""
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    t_norm = eigsys.norm
    b = math.log(4.0 * (t_norm + lam) * effective_dimension(eigsys, lam, 1.0) / (delta * t_norm))
    u = kappa_sq * b / (lam * n)
    return 4.0 * u / 3.0 + math.sqrt(2.0 * u)


def regularized_kernel_l2_norm(eigsys: EigenSystem, x: float, lam: float, m: int | None = None) -> float:
    """||(T + lambda)^{-1} k(x, .)||_{L2} from the truncated Mercer series."""
    m = eigsys.truncation_m if m is None else m
    lam_i = eigsys.eigenvalues(m)
    e = eigsys.eigenfunctions(x, m)[0]
    return float(np.sqrt(np.sum(((lam_i / (lam_i + lam)) * e)[::-1] ** 2)))


def sample_seminorm_check(kernel: Kernel, X, dual_c) -> tuple[float, float]:
    """Both sides of ||f||^2_{L2,n} = <T_X f, f>_H for f = K(., X) c.

    The left side is (1/n) f[X]' f[X].  For the right side T_X acts on the
    coefficient vector as the normalised Gram matrix, so T_X f = K(., X) (K c)
    and the H inner product of two sample expansions is b' K(X, X) c.
    """
    X = check_points(kernel.domain, X)
    c = np.asarray(dual_c, dtype=np.float64)
    g = gram(kernel, X)
    n = len(X)
    fx = g @ c
    lhs = float(fx @ fx) / n
    tx_coef = (g / n) @ c
    rhs = float(tx_coef @ (g @ c))
    return lhs, rhs
