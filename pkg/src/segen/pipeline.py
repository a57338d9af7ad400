"""End-to-end orchestration: sample, evolve, ensemble, evaluate."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import evolution
from .autoencoder import LayerSpec, TrainConfig
from .config import BUILTIN_GRAPH, RunConfig
from .datasets import load_sbm300
from .ensemble import EmbeddingTable, global_ensemble, local_ensemble, propagate_missing, write_embeddings
from .evolution import EvolutionConfig, write_trace
from .graph import Graph, load_edge_list
from .metrics import community_detection, network_recovery, write_metrics
from .sampling import STRATEGIES, SamplerConfig, build_pool, dump_pool

__all__ = [
    "StageError",
    "StrategyResult",
    "load_graph",
    "sample_pools",
    "train_strategy",
    "embed",
    "evaluate",
    "run_experiment",
    "ARTIFACTS",
]

log = logging.getLogger(__name__)

ARTIFACTS = ("embeddings.csv", "fitness_trace.csv", "metrics.csv", "resolved_config.txt")

# sub-stream tags under the master seed
_EVOLVE, _PROPAGATE, _EVAL = 1, 2, 3


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the error."""

    def __init__(self, stage: str, error: BaseException):
        super().__init__(f"stage '{stage}' failed: {error}")
        self.stage = stage
        self.error = error


@dataclass
class StrategyResult:
    strategy: str
    pool: object
    final: object
    trace: list
    table: EmbeddingTable


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def load_graph(path: str) -> Graph:
    if path == BUILTIN_GRAPH:
        return load_sbm300()[0]
    return load_edge_list(path)


def sampler_config(cfg: RunConfig, strategy: str) -> SamplerConfig:
    return SamplerConfig(strategy=strategy, k=cfg.k, pool_size=cfg.pool_size, hs_bfs_prob=cfg.hs_bfs_prob, seed=cfg.seed)


def layer_spec(cfg: RunConfig) -> LayerSpec:
    return LayerSpec((cfg.k, *cfg.hidden, cfg.d))


def evolution_config(cfg: RunConfig) -> EvolutionConfig:
    return EvolutionConfig(m=cfg.m, K=cfg.K, b=cfg.b, mutation_prob=cfg.mutation_prob, v_size=cfg.v_size)


def train_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(alpha=cfg.alpha, beta=cfg.beta, gamma_recon=cfg.gamma_recon,
                       learning_rate=cfg.learning_rate, epochs_per_batch=cfg.epochs_per_batch)


def sample_pools(graph: Graph, cfg: RunConfig) -> dict:
    return {s: build_pool(graph, sampler_config(cfg, s)) for s in cfg.strategies}


def train_strategy(graph: Graph, pool, cfg: RunConfig) -> StrategyResult:
    """Evolve one strategy's pool and turn the final generation into embeddings."""
    tag = STRATEGIES.index(pool.strategy)
    final, trace = evolution.run(pool, evolution_config(cfg), train_config(cfg), layer_spec(cfg),
                                 _stream(cfg.seed, _EVOLVE, tag))
    table = local_ensemble(final, pool, graph)
    table = propagate_missing(table, graph, _stream(cfg.seed, _PROPAGATE, tag))
    return StrategyResult(pool.strategy, pool, final, trace, table)


def embed(graph: Graph, cfg: RunConfig, pools: dict | None = None):
    """Per-strategy results plus their global ensemble.

    Strategies train in parallel worker processes when ``cfg.threads > 1``;
    each uses its own seed sub-stream, so the result does not depend on the
    schedule.
    """
    if pools is None:
        pools = sample_pools(graph, cfg)
    jobs = min(cfg.threads, len(pools))
    if jobs > 1:
        results = Parallel(n_jobs=jobs)(delayed(train_strategy)(graph, pools[s], cfg) for s in cfg.strategies)
    else:
        results = [train_strategy(graph, pools[s], cfg) for s in cfg.strategies]
    results = {r.strategy: r for r in results}
    fused = global_ensemble([results[s].table for s in cfg.strategies])
    return results, fused


def evaluate(table, graph: Graph, cfg: RunConfig) -> list:
    """``(task, parameter, metric, value)`` rows for both evaluation tasks."""
    rows = []
    for i, ratio in enumerate(cfg.np_ratios):
        rep = network_recovery(table, graph, ratio, cfg.prec_cutoff, _stream(cfg.seed, _EVAL, 0, i))
        rows.append(("network_recovery", f"np_ratio={ratio}", "auc", rep.auc))
        rows.append(("network_recovery", f"np_ratio={ratio}", f"prec@{rep.k}", rep.prec_at_k))
    for i, c in enumerate(cfg.cluster_counts):
        if c > graph.node_count:
            raise ValueError(f"cluster count {c} exceeds the graph's {graph.node_count} nodes")
        rep = community_detection(table, graph, c, _stream(cfg.seed, _EVAL, 1, i))
        rows.append(("community_detection", f"clusters={c}", "density", rep.density))
        rows.append(("community_detection", f"clusters={c}", "silhouette", rep.silhouette))
    return rows


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, FloatingPointError, OSError, IndexError) as exc:
        raise StageError(name, exc) from exc


def write_config(cfg: RunConfig, out_dir: str) -> None:
    with open(os.path.join(out_dir, "resolved_config.txt"), "w", encoding="utf-8") as fh:
        fh.write(cfg.snapshot())


def run_experiment(cfg: RunConfig, stages=("sample", "train", "eval")) -> dict:
    """Run the requested stages and write their artifacts to ``cfg.output_dir``.

    Returns a dict with whatever was produced (``graph``, ``pools``,
    ``results``, ``embedding``, ``metrics``).
    """
    out_dir = cfg.output_dir
    _stage("setup", os.makedirs, out_dir, exist_ok=True)
    write_config(cfg, out_dir)
    produced = {"graph": _stage("load", load_graph, cfg.graph_path)}
    graph = produced["graph"]
    log.info("loaded %r", graph)

    pools = _stage("sample", sample_pools, graph, cfg)
    produced["pools"] = pools
    if "train" not in stages:
        for name, pool in pools.items():
            dump_pool(pool, os.path.join(out_dir, f"pool_{name}.txt"))
        return produced

    results, fused = _stage("train", embed, graph, cfg, pools)
    produced["results"] = results
    produced["embedding"] = fused
    write_embeddings(fused, os.path.join(out_dir, "embeddings.csv"))
    write_trace({s: results[s].trace for s in cfg.strategies}, os.path.join(out_dir, "fitness_trace.csv"))
    if "eval" not in stages:
        return produced

    rows = _stage("eval", evaluate, fused, graph, cfg)
    produced["metrics"] = rows
    write_metrics(rows, os.path.join(out_dir, "metrics.csv"))
    return produced


def evaluate_file(cfg: RunConfig, embeddings_path: str) -> list:
    """Score a saved embeddings CSV against the configured graph."""
    from .ensemble import read_embeddings

    os.makedirs(cfg.output_dir, exist_ok=True)
    graph = _stage("load", load_graph, cfg.graph_path)
    table = _stage("load", read_embeddings, embeddings_path)
    if table.n != graph.node_count:
        raise StageError("eval", ValueError(f"embeddings cover {table.n} nodes, graph has {graph.node_count}"))
    rows = _stage("eval", evaluate, table, graph, cfg)
    write_metrics(rows, os.path.join(cfg.output_dir, "metrics.csv"))
    return rows
