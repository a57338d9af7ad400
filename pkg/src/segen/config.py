"""Run configuration, presets and the ``key = value`` config-file format."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields

from .sampling import STRATEGIES

__all__ = ["RunConfig", "PRESETS", "ConfigError", "read_config_file", "resolve", "BUILTIN_GRAPH"]

BUILTIN_GRAPH = "builtin:sbm300"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _default_cores() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


@dataclass(frozen=True)
class RunConfig:
    graph_path: str = BUILTIN_GRAPH
    strategies: tuple = STRATEGIES
    # sampling
    k: int = 10
    pool_size: int = 200
    hs_bfs_prob: float = 0.5
    # evolution
    m: int = 10
    K: int = 30
    b: int = 10
    v_size: int = 10
    mutation_prob: float = 0.01
    # unit model
    alpha: float = 0.01
    beta: float = 1e-4
    gamma_recon: float = 5.0
    learning_rate: float = 0.01
    epochs_per_batch: int = 20
    hidden: tuple = (32,)
    d: int = 16
    # evaluation
    np_ratios: tuple = (1, 5, 10)
    cluster_counts: tuple = (5, 25, 50)
    prec_cutoff: int = 500
    seed: int = 0
    output_dir: str = "segen_out"
    threads: int = field(default_factory=_default_cores)

    def __post_init__(self):
        _validate(self)

    def snapshot(self) -> str:
        """``key = value`` text of every field except ``threads`` (machine dependent)."""
        lines = []
        for f in fields(self):
            if f.name == "threads":
                continue
            lines.append(f"{f.name} = {_render(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"


# named parameter settings; unspecified values fall back to defaults
PRESETS = {
    "ps1": dict(k=10, pool_size=200, b=10, m=10, K=30),
    "ps2": dict(k=50, pool_size=600, b=5, m=50, K=30),
    "ps3": dict(k=25, pool_size=300, b=35, m=5, K=30),
    "ps4": dict(k=50, pool_size=700, b=10, m=5, K=30),
    "ps5": dict(k=45, pool_size=500, b=50, m=5, K=30),
}


def _render(value) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def _int_list(key, text):
    try:
        vals = tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise ConfigError(key, f"expected comma-separated integers, got {text!r}") from None
    return vals


def _strategy_list(key, text):
    if isinstance(text, (tuple, list)):
        vals = tuple(str(t).strip().lower() for t in text)
    else:
        vals = tuple(t.strip().lower() for t in str(text).split(",") if t.strip())
    return vals


_PARSERS = {
    "graph_path": lambda key, v: str(v),
    "output_dir": lambda key, v: str(v),
    "strategies": _strategy_list,
    "hidden": lambda key, v: v if isinstance(v, tuple) else _int_list(key, v),
    "np_ratios": lambda key, v: v if isinstance(v, tuple) else _int_list(key, v),
    "cluster_counts": lambda key, v: v if isinstance(v, tuple) else _int_list(key, v),
}
for _name in ("k", "pool_size", "m", "K", "b", "v_size", "epochs_per_batch", "d", "prec_cutoff", "seed", "threads"):
    _PARSERS[_name] = "int"
for _name in ("hs_bfs_prob", "mutation_prob", "alpha", "beta", "gamma_recon", "learning_rate"):
    _PARSERS[_name] = "float"

FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def coerce(key: str, value):
    if key not in _PARSERS:
        raise ConfigError(key, "unknown configuration key")
    parser = _PARSERS[key]
    if parser == "int":
        try:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected an integer, got {value!r}") from None
    if parser == "float":
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected a number, got {value!r}") from None
    return parser(key, value)


def _validate(cfg: RunConfig) -> None:
    def need(ok, key, msg):
        if not ok:
            raise ConfigError(key, msg)

    need(len(cfg.strategies) > 0, "strategies", "at least one strategy is required")
    for s in cfg.strategies:
        need(s in STRATEGIES, "strategies", f"unknown strategy {s!r}; choose from {','.join(STRATEGIES)}")
    need(len(set(cfg.strategies)) == len(cfg.strategies), "strategies", "strategies must not repeat")
    need(cfg.k >= 1, "k", f"must be >= 1, got {cfg.k}")
    need("es" not in cfg.strategies or cfg.k >= 2, "k", "edge sampling needs k >= 2")
    need(cfg.pool_size >= 1, "pool_size", f"must be >= 1, got {cfg.pool_size}")
    need(0.0 <= cfg.hs_bfs_prob <= 1.0, "hs_bfs_prob", f"must lie in [0, 1], got {cfg.hs_bfs_prob}")
    need(cfg.m >= 2, "m", f"must be >= 2, got {cfg.m}")
    need(cfg.K >= 1, "K", f"must be >= 1, got {cfg.K}")
    need(1 <= cfg.b <= cfg.pool_size, "b", f"must lie in [1, pool_size={cfg.pool_size}], got {cfg.b}")
    need(1 <= cfg.v_size <= cfg.pool_size, "v_size", f"must lie in [1, pool_size={cfg.pool_size}], got {cfg.v_size}")
    need(0.0 <= cfg.mutation_prob <= 1.0, "mutation_prob", f"must lie in [0, 1], got {cfg.mutation_prob}")
    need(cfg.alpha >= 0, "alpha", f"must be >= 0, got {cfg.alpha}")
    need(cfg.beta >= 0, "beta", f"must be >= 0, got {cfg.beta}")
    need(cfg.gamma_recon > 1, "gamma_recon", f"must be > 1, got {cfg.gamma_recon}")
    need(cfg.learning_rate > 0, "learning_rate", f"must be > 0, got {cfg.learning_rate}")
    need(cfg.epochs_per_batch >= 1, "epochs_per_batch", f"must be >= 1, got {cfg.epochs_per_batch}")
    need(all(h >= 1 for h in cfg.hidden), "hidden", f"layer sizes must be >= 1, got {cfg.hidden}")
    need(cfg.d >= 1, "d", f"must be >= 1, got {cfg.d}")
    need(len(cfg.np_ratios) > 0 and all(r >= 1 for r in cfg.np_ratios), "np_ratios", "ratios must be >= 1")
    need(all(c >= 1 for c in cfg.cluster_counts), "cluster_counts", "cluster counts must be >= 1")
    need(cfg.prec_cutoff >= 1, "prec_cutoff", f"must be >= 1, got {cfg.prec_cutoff}")
    need(0 <= cfg.seed < 2**64, "seed", f"must be a 64-bit unsigned integer, got {cfg.seed}")
    need(cfg.threads >= 1, "threads", f"must be >= 1, got {cfg.threads}")


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = coerce(key, value)
    return values


def resolve(cli: dict | None = None, file_values: dict | None = None, preset: str | None = None) -> RunConfig:
    """Merge defaults < preset < config file < command line."""
    merged = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        merged.update(PRESETS[preset])
    for source in (file_values or {}, cli or {}):
        for key, value in source.items():
            merged[key] = coerce(key, value)
    return dataclasses.replace(RunConfig(), **merged)
