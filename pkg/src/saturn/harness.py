"""Monte-Carlo convergence-rate experiments.

A sweep draws, for every sample size n and trial index, one dataset
``y = f*(x) + sigma * eps`` with x uniform on the domain, fits every configured
(algorithm, schedule value) pair on it, and records the squared L2 error.
Mean errors are then regressed on n in log-log scale; the negated slope is the
reported convergence rate.

Seeding: the dataset for ``(n, trial)`` is drawn from
``SeedSequence([base_seed, n, trial])``.  The key uses the sample size itself
rather than its grid position and excludes the algorithm and schedule, so
adding algorithms, schedule values or grid points never changes the data any
existing cell sees, and all cells of one ``(n, trial)`` share a design.
"""
from __future__ import annotations

import logging
import math
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, FitError, UnsupportedError
from .estimators import Dataset, fit_many, l2_errors
from .filters import FILTERS
from .kernels import (HARMONIC_PROBABILITY_SCALE, INTERVAL, SPHERE, Kernel, eigen_system,
                      make_kernel, spherical_harmonic)
from .quadrature import (DEFAULT_SIMPSON_NODES, DEFAULT_SPHERE_NODES, Quadrature,
                         monte_carlo_sphere, simpson_interval, uniform_sphere)
from .rkhs import SourceFunction

log = logging.getLogger(__name__)

DEFAULT_N_GRID = (256, 512, 1024, 2048, 4096)
DEFAULT_TRIALS = 100
EXPRESS_TRIALS = 20
DEFAULT_SIGMA = 0.2
DEFAULT_C = 0.01
SCHEDULE_KINDS = ("alpha", "theta")

_EIGEN_TARGET = re.compile(r"^e(\d+)$")
_HARMONIC_TARGETS = {"Y11": (1, 1), "Y2-2": (2, -2), "Y32": (3, 2)}


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: str
    fstar: str
    algorithms: tuple[str, ...]
    schedule: str
    schedule_values: tuple[float, ...]
    c: float = DEFAULT_C
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    trials: int = DEFAULT_TRIALS
    noise_sigma: float = DEFAULT_SIGMA
    base_seed: int = 0
    quadrature: str = "auto"
    quadrature_nodes: int | None = None
    quadrature_seed: int = 0
    fstar_normalize: bool = False
    workers: int = 1

    def __post_init__(self):
        for name in ("algorithms", "schedule_values", "n_grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        try:
            kernel = make_kernel(self.kernel)
        except (UnsupportedError, ValueError) as exc:
            raise ConfigError(f"kernel: {exc}") from None
        _parse_target(self.fstar, kernel)
        if not self.algorithms:
            raise ConfigError("algorithms: at least one algorithm is required")
        for alg in self.algorithms:
            if alg not in FILTERS:
                raise ConfigError(f"algorithms: unknown algorithm {alg!r}; expected one of {sorted(FILTERS)}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("algorithms: duplicate entries")
        if self.schedule not in SCHEDULE_KINDS:
            raise ConfigError(f"schedule: kind must be 'alpha' or 'theta', got {self.schedule!r}")
        if not self.schedule_values:
            raise ConfigError("schedule: at least one value is required")
        if len(set(self.schedule_values)) != len(self.schedule_values):
            raise ConfigError("schedule: duplicate values")
        if self.schedule == "alpha":
            if not kernel.has_eigen_system:
                raise ConfigError(
                    f"schedule: alpha schedules need the eigen-decay rate beta, which is unknown for "
                    f"kernel {self.kernel!r}; use a theta schedule (lambda = c n^-theta) instead"
                )
            if any(v <= 0 for v in self.schedule_values):
                raise ConfigError("schedule: alpha values must be positive")
        elif any(not 0 < v < 1 for v in self.schedule_values):
            raise ConfigError("schedule: theta values must lie in (0, 1)")
        if not self.c > 0:
            raise ConfigError(f"schedule.c: must be positive, got {self.c}")
        if len(self.n_grid) < 4:
            raise ConfigError(f"n_grid: rate fitting needs at least 4 sample sizes, got {len(self.n_grid)}")
        if any(int(n) != n or n < 1 for n in self.n_grid):
            raise ConfigError("n_grid: sample sizes must be positive integers")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid: must be strictly increasing")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials: must be a positive integer, got {self.trials}")
        if not self.noise_sigma >= 0:
            raise ConfigError(f"noise_sigma: must be nonnegative, got {self.noise_sigma}")
        if int(self.base_seed) != self.base_seed or self.base_seed < 0:
            raise ConfigError(f"base_seed: must be a nonnegative integer, got {self.base_seed}")
        if self.quadrature not in ("auto", "simpson", "monte_carlo"):
            raise ConfigError(f"quadrature.scheme: unknown scheme {self.quadrature!r}")
        scheme = self.resolved_quadrature()
        if (scheme == "simpson") != (kernel.domain == INTERVAL):
            raise ConfigError(f"quadrature.scheme: {scheme!r} does not integrate over the {kernel.domain}")
        if self.quadrature_nodes is not None and self.quadrature_nodes < 3:
            raise ConfigError("quadrature.nodes: need at least 3 nodes")
        if scheme == "simpson" and self.quadrature_nodes is not None and self.quadrature_nodes % 2 == 0:
            raise ConfigError("quadrature.nodes: Simpson's rule needs an odd node count")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers: must be a positive integer")

    @property
    def kernel_obj(self) -> Kernel:
        return make_kernel(self.kernel)

    def resolved_quadrature(self) -> str:
        if self.quadrature != "auto":
            return self.quadrature
        return "simpson" if make_kernel(self.kernel).domain == INTERVAL else "monte_carlo"

    def build_quadrature(self) -> Quadrature:
        if self.resolved_quadrature() == "simpson":
            return simpson_interval(self.quadrature_nodes or DEFAULT_SIMPSON_NODES)
        return monte_carlo_sphere(self.quadrature_nodes or DEFAULT_SPHERE_NODES, self.quadrature_seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = list(self.algorithms)
        d["schedule_values"] = list(self.schedule_values)
        d["n_grid"] = list(self.n_grid)
        return d


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class HarmonicTarget:
    l: int
    m: int
    scale: float = 1.0

    def __call__(self, p):
        return self.scale * spherical_harmonic(self.l, self.m, np.atleast_2d(p))


def _parse_target(fstar: str, kernel: Kernel):
    match = _EIGEN_TARGET.match(str(fstar))
    if match:
        if not kernel.has_eigen_system:
            raise ConfigError(f"fstar: eigenfunction targets need an analytic eigen-system; kernel {kernel.id!r} has none")
        idx = int(match.group(1))
        if idx < 1:
            raise ConfigError("fstar: eigen indices start at 1")
        return ("eigen", idx)
    if fstar in _HARMONIC_TARGETS:
        if kernel.domain != SPHERE:
            raise ConfigError(f"fstar: spherical harmonic {fstar!r} needs a sphere kernel")
        return ("harmonic", _HARMONIC_TARGETS[fstar])
    raise ConfigError(f"fstar: unknown target {fstar!r}; use e<k> or one of {sorted(_HARMONIC_TARGETS)}")


def target_function(kernel: Kernel, fstar: str, normalize: bool = False):
    """The regression function named ``fstar`` as a callable on arrays of points."""
    kind, spec = _parse_target(fstar, kernel)
    if kind == "eigen":
        return SourceFunction.eigenfunction(eigen_system(kernel), spec)
    scale = HARMONIC_PROBABILITY_SCALE if normalize else 1.0
    return HarmonicTarget(spec[0], spec[1], scale)


def make_target(cfg: ExperimentConfig):
    return target_function(cfg.kernel_obj, cfg.fstar, cfg.fstar_normalize)


# ---------------------------------------------------------------------------
# data


def trial_seed(base_seed: int, n: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(n), int(trial)])


def generate_dataset(domain: str, f_star, sigma: float, n: int, seed) -> Dataset:
    """n i.i.d. uniform inputs with y = f*(x) + sigma * N(0, 1)."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if domain == INTERVAL:
        x = rng.random(n)
    elif domain == SPHERE:
        x = uniform_sphere(n, rng)
    else:
        raise ConfigError(f"unknown domain {domain!r}")
    eps = rng.standard_normal(n)
    y = np.asarray(f_star(x), dtype=np.float64) + sigma * eps
    return Dataset(x, y, sigma)


def schedule_lambda(kind: str, value: float, n: int, c: float, beta: float | None = None) -> float:
    """c n^{-1/(alpha + beta)} or c n^{-theta}."""
    if kind == "alpha":
        if beta is None:
            raise ConfigError("alpha schedules need the eigen-decay rate beta")
        return c * n ** (-1.0 / (value + beta))
    if kind == "theta":
        return c * n ** (-value)
    raise ConfigError(f"unknown schedule kind {kind!r}")


# ---------------------------------------------------------------------------
# rate fitting


@dataclass(frozen=True)
class RateFit:
    """log err = -rate * log n + intercept."""

    rate: float
    intercept: float
    stderr: float
    n_points: int

    def predict(self, n):
        return np.exp(self.intercept) * np.asarray(n, dtype=np.float64) ** (-self.rate)


def fit_rate(points) -> RateFit:
    """Least-squares fit of ln(err) on ln(n) over ``(n, err)`` pairs."""
    pts = list(points)
    if len(pts) < 2:
        raise FitError(f"rate fit needs at least 2 points, got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=np.float64)
    err = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(~np.isfinite(err)) or np.any(err <= 0):
        raise FitError("rate fit needs strictly positive errors")
    if np.any(n <= 0) or len(np.unique(n)) < 2:
        raise FitError("rate fit needs at least two distinct positive sample sizes")
    design = np.column_stack([np.log(n), np.ones_like(n)])
    coef, *_ = np.linalg.lstsq(design, np.log(err), rcond=None)
    slope, intercept = coef
    resid = np.log(err) - design @ coef
    if len(pts) > 2:
        sxx = np.sum((design[:, 0] - design[:, 0].mean()) ** 2)
        stderr = math.sqrt(float(resid @ resid) / (len(pts) - 2) / sxx)
    else:
        stderr = 0.0
    return RateFit(float(-slope), float(intercept), stderr, len(pts))


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class TrialResult:
    algorithm: str
    schedule: str
    schedule_value: float
    n: int
    trial: int
    l2_error: float
    lambda_used: float

    @property
    def key(self):
        return (self.algorithm, self.schedule_value, self.n, self.trial)


@dataclass(frozen=True)
class CellStats:
    mean: float
    std: float
    count: int


@dataclass
class SweepResult:
    kernel: str
    fstar: str
    schedule: str
    trials: list[TrialResult]
    cells: dict = field(default_factory=dict)   # (alg, value, n) -> CellStats
    rates: dict = field(default_factory=dict)   # (alg, value) -> RateFit
    config: ExperimentConfig | None = None

    def rate(self, algorithm: str, value: float) -> float:
        return self.rates[(algorithm, value)].rate

    def rate_table(self) -> dict:
        """{algorithm: {schedule value: rate}}."""
        table = defaultdict(dict)
        for (alg, value), fit in sorted(self.rates.items()):
            table[alg][value] = fit.rate
        return dict(table)

    def cell_series(self, algorithm: str, value: float):
        keys = sorted(k for k in self.cells if k[0] == algorithm and k[1] == value)
        return [(k[2], self.cells[k]) for k in keys]


def aggregate(kernel: str, fstar: str, schedule: str, trials, config=None) -> SweepResult:
    """Per-cell mean/std (population std) and a rate fit per (algorithm, value)."""
    trials = sorted(trials, key=lambda t: t.key)
    groups = defaultdict(list)
    for t in trials:
        groups[(t.algorithm, t.schedule_value, t.n)].append(t.l2_error)
    cells = {k: CellStats(float(np.mean(v)), float(np.std(v)), len(v)) for k, v in sorted(groups.items())}
    series = defaultdict(list)
    for (alg, value, n), stats in cells.items():
        series[(alg, value)].append((n, stats.mean))
    rates = {}
    for key, pts in sorted(series.items()):
        if len(pts) >= 2:
            rates[key] = fit_rate(pts)
    return SweepResult(kernel, fstar, schedule, trials, cells, rates, config)


class _TrialRunner:
    """Shared read-only state for a sweep; callable on (n, trial)."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.kernel = cfg.kernel_obj
        self.target = make_target(cfg)
        self.quad = cfg.build_quadrature()
        self.beta = eigen_system(self.kernel).beta if cfg.schedule == "alpha" else None

    def settings(self, n):
        return [(alg, v, schedule_lambda(self.cfg.schedule, v, n, self.cfg.c, self.beta))
                for alg in self.cfg.algorithms for v in self.cfg.schedule_values]

    def __call__(self, job):
        n, trial = job
        cfg = self.cfg
        data = generate_dataset(self.kernel.domain, self.target, cfg.noise_sigma, n,
                                trial_seed(cfg.base_seed, n, trial))
        settings = self.settings(n)
        coef = fit_many(self.kernel, data, [(alg, lam) for alg, _, lam in settings])
        errs = l2_errors(self.kernel, data.inputs, coef, self.target, self.quad)
        return [TrialResult(alg, cfg.schedule, float(v), n, trial, float(e), float(lam))
                for (alg, v, lam), e in zip(settings, errs)]


_worker_runner = None


def _init_worker(cfg):
    global _worker_runner
    _worker_runner = _TrialRunner(cfg)


def _run_job(job):
    return _worker_runner(job)


def run_sweep(cfg: ExperimentConfig, progress=None) -> SweepResult:
    """Run every (n, trial) job and aggregate.

    ``progress`` is an optional callable receiving ``(done, total)``.  With
    ``cfg.workers > 1`` jobs run in a process pool; results are identical to
    the serial run because every job owns its seed.
    """
    jobs = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    results: list[TrialResult] = []
    if cfg.workers == 1:
        runner = _TrialRunner(cfg)
        for i, job in enumerate(jobs, 1):
            results.extend(runner(job))
            if progress:
                progress(i, len(jobs))
            if job[1] == cfg.trials - 1:
                log.info("finished n=%d (%d trials)", job[0], cfg.trials)
    else:
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            for i, chunk in enumerate(pool.map(_run_job, jobs), 1):
                results.extend(chunk)
                if progress:
                    progress(i, len(jobs))
    return aggregate(cfg.kernel, cfg.fstar, cfg.schedule, results, cfg)
