"""Quadrature rules for integrals against the uniform probability measure."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .kernels import INTERVAL, SPHERE

DEFAULT_SIMPSON_NODES = 8193
DEFAULT_SPHERE_NODES = 200_000


@dataclass(frozen=True)
class Quadrature:
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str  # "simpson_interval" | "monte_carlo_sphere"
    domain: str = field(default=INTERVAL)

    def integrate(self, values) -> float:
        """Weighted sum of ``values`` at the nodes (integral w.r.t. mu)."""
        return float(self.weights @ np.asarray(values))

    def integrate_with_error(self, values) -> tuple[float, float]:
        """Integral plus a standard error (zero for deterministic rules)."""
        values = np.asarray(values, dtype=np.float64)
        est = self.integrate(values)
        if self.scheme != "monte_carlo_sphere":
            return est, 0.0
        return est, float(values.std(ddof=1) / np.sqrt(len(values)))

    def require(self, domain: str) -> None:
        if domain != self.domain:
            raise ConfigError(
                f"quadrature scheme {self.scheme!r} integrates over the {self.domain}, "
                f"but the kernel lives on the {domain}"
            )


def simpson_interval(n_nodes: int = DEFAULT_SIMPSON_NODES) -> Quadrature:
    """Composite Simpson rule on [0, 1]; ``n_nodes`` must be odd and >= 3."""
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise ConfigError(f"Simpson's rule needs an odd node count >= 3, got {n_nodes}")
    nodes = np.linspace(0.0, 1.0, n_nodes)
    w = np.ones(n_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (1.0 / (n_nodes - 1)) / 3.0
    return Quadrature(nodes, w, "simpson_interval", INTERVAL)


def uniform_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. uniform points on S^2 (normalised Gaussians)."""
    z = rng.standard_normal((n, 3))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def monte_carlo_sphere(n_nodes: int = DEFAULT_SPHERE_NODES, seed: int = 0) -> Quadrature:
    if n_nodes < 2:
        raise ConfigError("Monte-Carlo quadrature needs at least 2 nodes")
    nodes = uniform_sphere(n_nodes, np.random.default_rng(seed))
    return Quadrature(nodes, np.full(n_nodes, 1.0 / n_nodes), "monte_carlo_sphere", SPHERE)


def default_quadrature(domain: str, seed: int = 0) -> Quadrature:
    if domain == INTERVAL:
        return simpson_interval()
    if domain == SPHERE:
        return monte_carlo_sphere(seed=seed)
    raise ConfigError(f"no quadrature for domain {domain!r}")
