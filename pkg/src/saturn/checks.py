"""Self-check suite behind ``saturn check``.

Each check is small (the whole suite runs in well under a minute) and returns
a ``CheckResult``; ``run_checks`` never raises for a failed check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import (bias_variance_profile, monte_carlo_conditional_risk,
                          regularized_kernel_l2_norm, sample_seminorm_check)
from .estimators import dual_coefficients, gram_spectrum, krr_direct
from .filters import filter_value
from .kernels import eigen_system, eval_kernel, gram, make_kernel, mercer_partial_sum
from .quadrature import simpson_interval, uniform_sphere
from .rkhs import SourceFunction, effective_dimension

# sum_n 1/(1 + n^2)^2 = (pi coth(pi) + pi^2 csch(pi)^2 - 2) / 4
N2_HEAVYSIDE_AT_INV_PI_SQ = 0.30683697542290869


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _krr_filter_bound():
    t = np.concatenate([[0.0], np.logspace(-8, 3, 4001)])
    worst = -np.inf
    for s in (0.0, 0.25, 0.5, 0.75, 1.0):
        for lam in (1e-3, 1e-2, 1e-1):
            lhs = np.max(t**s * filter_value("krr", t, lam))
            worst = max(worst, lhs / lam ** (s - 1.0))
    return worst <= 1 + 1e-12, f"max sup_t t^s g(t) / lambda^(s-1) = {worst:.12f}"


def _mercer():
    grid = np.linspace(0, 1, 21)
    worst = 0.0
    for kid in ("min", "heavyside"):
        kern, es = make_kernel(kid), eigen_system(kid)
        for x in grid:
            for y in grid:
                worst = max(worst, abs(mercer_partial_sum(es, 5000, x, y) - eval_kernel(kern, x, y)))
    return worst <= 1e-3, f"max |partial sum - k| = {worst:.2e}"


def _orthonormality():
    quad = simpson_interval(8193)
    worst = 0.0
    for kid in ("min", "heavyside"):
        e = eigen_system(kid).eigenfunctions(quad.nodes, 10)
        worst = max(worst, np.abs(e.T @ (quad.weights[:, None] * e) - np.eye(10)).max())
    return worst <= 1e-8, f"max |<e_i, e_j> - delta_ij| = {worst:.2e}"


def _gram_psd():
    rng = np.random.default_rng(1)
    worst = np.inf
    for kid in ("min", "heavyside", "truncpow3", "truncpow4"):
        kern = make_kernel(kid)
        for _ in range(50):
            m = int(rng.integers(2, 33))
            pts = rng.random(m) if kern.domain == "interval" else uniform_sphere(m, rng)
            worst = min(worst, np.linalg.eigvalsh(gram(kern, pts)).min())
    return worst >= -1e-9, f"smallest Gram eigenvalue = {worst:.2e}"


def _krr_oracle():
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(20):
        kern = make_kernel(("min", "heavyside", "truncpow3")[i % 3])
        n = int(rng.integers(2, 65))
        x = rng.random(n) if kern.domain == "interval" else uniform_sphere(n, rng)
        y = rng.standard_normal(n)
        lam = 10 ** rng.uniform(-3, -1)
        a = dual_coefficients(gram_spectrum(kern, x), y, "krr", lam)
        c = krr_direct(kern, x, y, lam)
        worst = max(worst, np.linalg.norm(a - c) / np.linalg.norm(c))
    return worst <= 1e-9, f"max relative gap = {worst:.2e}"


def _seminorm():
    rng = np.random.default_rng(3)
    kern = make_kernel("min")
    worst = 0.0
    for _ in range(10):
        x = rng.random(8)
        lhs, rhs = sample_seminorm_check(kern, x, rng.standard_normal(8))
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return worst <= 1e-10, f"max relative gap = {worst:.2e}"


def _decomposition():
    rng = np.random.default_rng(4)
    kern = make_kernel("min")
    es = eigen_system(kern)
    f = SourceFunction.eigenfunction(es, 2)
    quad = simpson_interval(2049)
    worst = 0.0
    for seed in range(2):
        x = rng.random(10)
        rep = bias_variance_profile(kern, f, x, [0.1], 0.2, quad)[0]
        mean, se = monte_carlo_conditional_risk(kern, f, x, 0.1, 0.2, quad, draws=5000, seed=seed)
        worst = max(worst, abs(rep.total - mean) / se)
    return worst <= 3.0, f"max |Bias^2 + Var - MC risk| = {worst:.2f} standard errors"


def _variance_monotone():
    rng = np.random.default_rng(5)
    kern = make_kernel("heavyside")
    f = SourceFunction.eigenfunction(eigen_system(kern), 1)
    lams = np.logspace(-4, 0, 9)
    reps = bias_variance_profile(kern, f, rng.random(64), lams, 1.0, simpson_interval(2049))
    var = np.array([r.variance for r in reps])
    return bool(np.all(np.diff(var) <= 1e-15)), f"variance over lambda grid: {var[0]:.3e} .. {var[-1]:.3e}"


def _norm_control():
    worst = 0.0
    for kid in ("min", "heavyside"):
        es, kern = eigen_system(kid), make_kernel(kid)
        kappa = math.sqrt(kern.kappa_sq)
        for lam in (1e-3, 1e-2):
            for x in np.linspace(0, 1, 11):
                worst = max(worst, regularized_kernel_l2_norm(es, x, lam) / (kappa / math.sqrt(lam)))
    return worst <= 1.0, f"max ||(T+lambda)^-1 k(x,.)|| / (kappa lambda^-1/2) = {worst:.3f}"


def _effective_dimension():
    val = effective_dimension(eigen_system("heavyside"), 1 / math.pi**2, 2.0)
    return abs(val - N2_HEAVYSIDE_AT_INV_PI_SQ) <= 1e-4, f"N_2(1/pi^2) = {val:.6f}"


CHECKS = {
    "krr-filter-bound": _krr_filter_bound,
    "mercer-reconstruction": _mercer,
    "eigenfunction-orthonormality": _orthonormality,
    "gram-psd": _gram_psd,
    "krr-linear-solve-oracle": _krr_oracle,
    "sample-seminorm-identity": _seminorm,
    "bias-variance-exactness": _decomposition,
    "variance-monotone-in-lambda": _variance_monotone,
    "regularized-kernel-norm-control": _norm_control,
    "effective-dimension-value": _effective_dimension,
}


def run_checks(names=None) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
