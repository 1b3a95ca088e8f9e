"""``saturn`` command-line entry point.

Exit codes: 0 success, 1 a self-check failed, 2 configuration or parameter
error, 3 numeric failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from .config import SEED_ENV, dump_config, parse_config
from .diagnostics import bias_variance_profile
from .errors import NumericError, SaturnError
from .harness import DEFAULT_SIGMA, generate_dataset, run_sweep, target_function, trial_seed
from .kernels import eigen_system, make_kernel
from .quadrature import default_quadrature, monte_carlo_sphere, simpson_interval
from .reporting import (BIASVAR_HEADER, bias_var_rows, emit_bias_var_csv, emit_loglog_plot_data,
                        emit_rate_table, emit_sweep_csv, fmt, format_rate_table, read_trials_csv)
from .rkhs import effective_dimension

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("saturn")


def _progress(done, total):
    if done == total or done % max(1, total // 20) == 0:
        print(f"\r{done}/{total} jobs", end="\n" if done == total else "", file=sys.stderr, flush=True)


def cmd_sweep(args) -> int:
    overrides = list(args.set or [])
    if args.express:
        overrides.append("express=true")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    cfg = parse_config(args.config, overrides)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(dump_config(cfg), encoding="utf-8")
    log.info("sweep %s/%s, %d trials, backend %s", cfg.kernel, cfg.fstar, cfg.trials, BACKEND)
    result = run_sweep(cfg, progress=None if args.quiet else _progress)
    emit_sweep_csv(result, out)
    emit_rate_table(result, out)
    emit_loglog_plot_data(result, out)
    print(format_rate_table(result), end="")
    print(f"results written to {out}")
    return EXIT_OK


def cmd_bias_var(args) -> int:
    kernel = make_kernel(args.kernel)
    f_star = target_function(kernel, args.fstar, args.normalize)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV) or 0)
    data = generate_dataset(kernel.domain, f_star, args.sigma, args.n, trial_seed(seed, args.n, 0))
    if args.quad_nodes:
        quad = simpson_interval(args.quad_nodes) if kernel.domain == "interval" else monte_carlo_sphere(args.quad_nodes)
    else:
        quad = default_quadrature(kernel.domain)
    reports = bias_variance_profile(kernel, f_star, data.inputs, args.lam, args.sigma, quad, args.filter)
    if args.out:
        emit_bias_var_csv(reports, args.out)
    else:
        print(",".join(BIASVAR_HEADER))
        for row in bias_var_rows(reports):
            print(",".join(str(v) for v in row))
    return EXIT_OK


def cmd_effective_dim(args) -> int:
    es = eigen_system(make_kernel(args.kernel))
    print("lambda,p,effective_dimension")
    for lam in args.lam:
        print(f"{fmt(lam)},{fmt(args.p)},{fmt(effective_dimension(es, lam, args.p))}")
    return EXIT_OK


def cmd_rates(args) -> int:
    result = read_trials_csv(args.source)
    print(format_rate_table(result), end="")
    if args.out:
        emit_rate_table(result, args.out)
        emit_loglog_plot_data(result, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks(args.only or None)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saturn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND})")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a convergence-rate sweep from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="results")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field (repeatable)")
    p.add_argument("--express", action="store_true", help="20 trials instead of the configured count")
    p.add_argument("--workers", type=int)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bias-var", help="conditional bias^2 and variance on one random design")
    p.add_argument("--kernel", required=True)
    p.add_argument("--fstar", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    p.add_argument("--filter", default="krr")
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--seed", type=int, help=f"design seed (default ${SEED_ENV} or 0)")
    p.add_argument("--normalize", action="store_true", help="scale harmonic targets to unit L2 norm")
    p.add_argument("--quad-nodes", type=int)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bias_var)

    p = sub.add_parser("effective-dim", help="N_p(lambda) for a kernel with a known eigen-system")
    p.add_argument("--kernel", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_effective_dim)

    p = sub.add_parser("rates", help="refit rates from an existing trials.csv")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--out", help="directory for rates.csv, rates.txt and plot data")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("check", help="run the invariant self-checks")
    p.add_argument("--only", nargs="+", metavar="NAME")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SaturnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
