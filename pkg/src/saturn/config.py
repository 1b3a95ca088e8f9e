"""YAML experiment configuration.

Schema (all keys except ``kernel``, ``fstar``, ``algorithms`` and the schedule
values are optional)::

    kernel: min                  # min | heavyside | truncpow<p>
    fstar: e2                    # e<k> | Y11 | Y2-2 | Y32
    fstar_normalize: false       # rescale harmonics to unit L2(mu) norm
    algorithms: [krr, gf, cut]
    schedule:
      alpha: [1.5, 2.0, 2.5, 3.0, 3.5]   # or  theta: [0.6, 0.4, 0.3, 0.2]
      c: 0.01
    n_grid: [256, 512, 1024, 2048, 4096]
    trials: 100
    express: false               # true forces 20 trials
    noise_sigma: 0.2
    base_seed: 0
    quadrature:
      scheme: auto               # auto | simpson | monte_carlo
      nodes: 8193
      seed: 0
    workers: 1

Precedence: file < ``SATURN_SEED`` environment variable (base_seed only) <
``--set key=value`` overrides.  Override keys use dots for nesting, e.g.
``schedule.c=0.02``; values are parsed as YAML.
"""
from __future__ import annotations

import os
import re

import yaml

from .errors import ConfigError
from .harness import EXPRESS_TRIALS, ExperimentConfig

SEED_ENV = "SATURN_SEED"

_TOP_KEYS = {"kernel", "fstar", "fstar_normalize", "algorithms", "schedule", "alphas", "thetas",
             "n_grid", "trials", "express", "noise_sigma", "base_seed", "quadrature", "workers"}
_SCHEDULE_KEYS = {"alpha", "theta", "c"}
_QUAD_KEYS = {"scheme", "nodes", "seed"}


def _line_map(text: str) -> dict:
    """Dotted key path -> 1-based line number of the key."""
    lines = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                path = f"{prefix}{key_node.value}"
                lines[path] = key_node.start_mark.line + 1
                walk(value_node, path + ".")

    walk(yaml.compose(text), "")
    return lines


def _where(lines, key):
    if lines.get(key) == "override":
        return " (override)"
    if key in lines:
        return f" (line {lines[key]})"
    return ""


def _fail(lines, key, msg):
    raise ConfigError(f"{key}{_where(lines, key)}: {msg}")


def _as_int(lines, key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(lines, key, f"expected an integer, got {value!r}")
    return value


def _as_float(lines, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(lines, key, f"expected a number, got {value!r}")
    return float(value)


def _as_list(lines, key, value, conv):
    if not isinstance(value, list):
        _fail(lines, key, f"expected a list, got {value!r}")
    return tuple(conv(lines, key, v) for v in value)


def _as_str(lines, key, value):
    if not isinstance(value, str):
        _fail(lines, key, f"expected a string, got {value!r}")
    return value


def _as_bool(lines, key, value):
    if not isinstance(value, bool):
        _fail(lines, key, f"expected true or false, got {value!r}")
    return value


def _apply_override(raw: dict, lines: dict, item: str):
    if "=" not in item:
        raise ConfigError(f"override {item!r}: expected key=value")
    key, text = item.split("=", 1)
    key = key.strip()
    if not re.fullmatch(r"[A-Za-z_]+(\.[A-Za-z_]+)*", key):
        raise ConfigError(f"override {item!r}: malformed key")
    try:
        value = yaml.safe_load(text) if text.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {item!r}: cannot parse value: {exc}") from None
    target = raw
    parts = key.split(".")
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ConfigError(f"override {item!r}: {part} is not a section")
    target[parts[-1]] = value
    lines[key] = "override"


def build_config(raw: dict, lines: dict | None = None) -> ExperimentConfig:
    """Validate a parsed mapping and apply defaults."""
    lines = lines or {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping at top level")
    for key in raw:
        if key not in _TOP_KEYS:
            _fail(lines, key, "unknown field")
    for key in ("kernel", "fstar", "algorithms"):
        if key not in raw:
            raise ConfigError(f"{key}: required field is missing")
    kw = {
        "kernel": _as_str(lines, "kernel", raw["kernel"]),
        "fstar": _as_str(lines, "fstar", raw["fstar"]),
        "algorithms": _as_list(lines, "algorithms", raw["algorithms"], _as_str),
    }

    sched = raw.get("schedule") or {}
    if not isinstance(sched, dict):
        _fail(lines, "schedule", "expected a section with alpha/theta and c")
    for key in sched:
        if key not in _SCHEDULE_KEYS:
            _fail(lines, f"schedule.{key}", "unknown field")
    kinds = {k: v for k, v in (("alpha", sched.get("alpha", raw.get("alphas"))),
                               ("theta", sched.get("theta", raw.get("thetas")))) if v is not None}
    if len(kinds) != 1:
        raise ConfigError("schedule: give exactly one of alpha or theta values")
    (kind, values), = kinds.items()
    kw["schedule"] = kind
    kw["schedule_values"] = _as_list(lines, f"schedule.{kind}", values, _as_float)
    if "c" in sched:
        kw["c"] = _as_float(lines, "schedule.c", sched["c"])

    if "n_grid" in raw:
        kw["n_grid"] = _as_list(lines, "n_grid", raw["n_grid"], _as_int)
    if "trials" in raw:
        kw["trials"] = _as_int(lines, "trials", raw["trials"])
    if "express" in raw and _as_bool(lines, "express", raw["express"]):
        kw["trials"] = EXPRESS_TRIALS
    if "noise_sigma" in raw:
        kw["noise_sigma"] = _as_float(lines, "noise_sigma", raw["noise_sigma"])
    if "base_seed" in raw:
        kw["base_seed"] = _as_int(lines, "base_seed", raw["base_seed"])
    if "fstar_normalize" in raw:
        kw["fstar_normalize"] = _as_bool(lines, "fstar_normalize", raw["fstar_normalize"])
    if "workers" in raw:
        kw["workers"] = _as_int(lines, "workers", raw["workers"])

    quad = raw.get("quadrature") or {}
    if not isinstance(quad, dict):
        _fail(lines, "quadrature", "expected a section with scheme/nodes/seed")
    for key in quad:
        if key not in _QUAD_KEYS:
            _fail(lines, f"quadrature.{key}", "unknown field")
    if "scheme" in quad:
        kw["quadrature"] = _as_str(lines, "quadrature.scheme", quad["scheme"])
    if quad.get("nodes") is not None:
        kw["quadrature_nodes"] = _as_int(lines, "quadrature.nodes", quad["nodes"])
    if "seed" in quad:
        kw["quadrature_seed"] = _as_int(lines, "quadrature.seed", quad["seed"])

    try:
        return ExperimentConfig(**kw)
    except ConfigError as exc:
        msg = str(exc)
        field_name = msg.split(":", 1)[0]
        lookup = f"schedule.{kind}" if field_name == "schedule" else field_name
        where = _where(lines, lookup)
        if where:
            raise ConfigError(f"{field_name}{where}:{msg.split(':', 1)[1]}") from None
        raise


def parse_config(path, overrides=(), env=None) -> ExperimentConfig:
    """Read, merge and validate an experiment configuration file."""
    env = os.environ if env is None else env
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
        lines = _line_map(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"cannot parse {path}{loc}: {getattr(exc, 'problem', exc)}") from None
    if raw is None:
        raise ConfigError(f"config file {path} is empty")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if env.get(SEED_ENV):
        try:
            raw["base_seed"] = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV}: expected an integer, got {env[SEED_ENV]!r}") from None
        lines.pop("base_seed", None)
    for item in overrides or ():
        _apply_override(raw, lines, item)
    return build_config(raw, lines)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Inverse of ``build_config``: the config echo written next to results."""
    out = {
        "kernel": cfg.kernel,
        "fstar": cfg.fstar,
        "fstar_normalize": cfg.fstar_normalize,
        "algorithms": list(cfg.algorithms),
        "schedule": {cfg.schedule: [float(v) for v in cfg.schedule_values], "c": float(cfg.c)},
        "n_grid": [int(n) for n in cfg.n_grid],
        "trials": int(cfg.trials),
        "noise_sigma": float(cfg.noise_sigma),
        "base_seed": int(cfg.base_seed),
        "quadrature": {"scheme": cfg.quadrature, "nodes": cfg.quadrature_nodes, "seed": int(cfg.quadrature_seed)},
        "workers": int(cfg.workers),
    }
    return out


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
