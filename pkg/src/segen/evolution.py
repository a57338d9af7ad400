"""Genetic evolution of unit-model populations.

A generation is trained, scored on a shared validation set with the
correlation-only loss, and bred into the next one by fitness-weighted
parent selection, uniform crossover and mutation. Generations fully
replace each other; there is no elitism.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .autoencoder import (
    AutoencoderParams,
    LayerSpec,
    TrainConfig,
    _subnet_terms,
    encode,
    from_chromosome,
    init_params,
    to_chromosome,
    train_on_batch,
)
from .sampling import SamplePool, plan_batches

__all__ = [
    "EvolutionConfig",
    "Generation",
    "ParentPairs",
    "TraceRow",
    "fitness",
    "selection_probs",
    "select_parent_pairs",
    "crossover",
    "mutate",
    "evolve",
    "run",
    "write_trace",
]


@dataclass(frozen=True)
class EvolutionConfig:
    m: int = 10
    K: int = 30
    b: int = 10
    mutation_prob: float = 0.01
    v_size: int = 10

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"population size m must be >= 2, got {self.m}")
        if self.K < 1:
            raise ValueError(f"generation count K must be >= 1, got {self.K}")
        if self.b < 1:
            raise ValueError(f"batch size b must be >= 1, got {self.b}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob must lie in [0, 1], got {self.mutation_prob}")
        if self.v_size < 1:
            raise ValueError(f"validation size v_size must be >= 1, got {self.v_size}")


@dataclass
class Generation:
    index: int
    models: list
    fitness: np.ndarray | None = None

    def __post_init__(self):
        lengths = {m.spec.n_params for m in self.models}
        if len(lengths) > 1:
            raise ValueError("all models in a generation must share one chromosome length")

    @property
    def size(self) -> int:
        return len(self.models)

    def best(self) -> AutoencoderParams:
        return self.models[int(np.argmin(self.fitness))]


@dataclass(frozen=True)
class ParentPairs:
    pairs: list = field(default_factory=list)


@dataclass(frozen=True)
class TraceRow:
    generation: int
    best_loss: float
    mean_loss: float
    worst_loss: float


def _correlation_loss(z: np.ndarray, sign: np.ndarray) -> float:
    sq = np.einsum("ij,ij->i", z, z)
    dist = sq[:, None] + sq[None, :] - 2.0 * (z @ z.T)
    np.fill_diagonal(dist, 0.0)
    return float(np.vdot(sign, dist))


def fitness(model: AutoencoderParams, validation) -> float:
    """Correlation-only loss summed over the validation sub-networks (lower is fitter)."""
    validation = list(validation)
    if not validation:
        raise ValueError("validation set is empty")
    total = 0.0
    width = model.spec.input_dim
    for s in validation:
        x, _, sign, _ = _subnet_terms(s, width)
        total += _correlation_loss(encode(model, x), sign)
    return total


def _minmax(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def _softmax_neg(values: np.ndarray) -> np.ndarray:
    e = np.exp(-(values - values.min()))
    return e / e.sum()


def selection_probs(losses) -> np.ndarray:
    """Softmax of the negated, min-max normalized losses."""
    losses = np.asarray(losses, dtype=np.float64)
    if losses.ndim != 1 or len(losses) < 2:
        raise ValueError("selection needs at least two losses")
    if not np.all(np.isfinite(losses)):
        raise FloatingPointError("losses must be finite")
    return _softmax_neg(_minmax(losses))


def select_parent_pairs(gen: Generation, probs, rng) -> ParentPairs:
    """``m`` pairs of distinct parents; a repeated second pick is redrawn."""
    probs = np.asarray(probs, dtype=np.float64)
    m = gen.size
    if len(probs) != m:
        raise ValueError(f"expected {m} selection probabilities, got {len(probs)}")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]

    def draw():
        return min(int(np.searchsorted(cdf, rng.random(), side="right")), m - 1)

    pairs = []
    for _ in range(m):
        i = draw()
        j = draw()
        while j == i:
            j = draw()
        pairs.append((i, j))
    return ParentPairs(pairs)


def inheritance_prob(loss_i: float, loss_j: float) -> float:
    """Chance that a child entry comes from parent ``i`` (pairwise softmax)."""
    return float(_softmax_neg(_minmax(np.array([loss_i, loss_j], dtype=np.float64)))[0])


def crossover(parent_i, parent_j, loss_i: float, loss_j: float, rng) -> np.ndarray:
    """Uniform crossover of two chromosomes, biased toward the fitter parent."""
    ci = np.asarray(parent_i, dtype=np.float64)
    cj = np.asarray(parent_j, dtype=np.float64)
    if ci.shape != cj.shape:
        raise ValueError(f"parent chromosome lengths differ: {ci.shape} vs {cj.shape}")
    from_i = rng.random(ci.shape) < inheritance_prob(loss_i, loss_j)
    return np.where(from_i, ci, cj)


def mutate(chromosome, mutation_prob: float, rng) -> np.ndarray:
    """Replace each entry, with probability ``mutation_prob``, by a uniform draw in [0, 1)."""
    if not 0.0 <= mutation_prob <= 1.0:
        raise ValueError(f"mutation_prob must lie in [0, 1], got {mutation_prob}")
    chromosome = np.array(chromosome, dtype=np.float64)
    hit = rng.random(chromosome.shape) < mutation_prob
    chromosome[hit] = rng.random(int(hit.sum()))
    return chromosome


def _model_streams(rng, count: int):
    root = np.random.SeedSequence(int(rng.integers(0, 2**63)))
    return [np.random.default_rng(s) for s in root.spawn(count)]


def _train_and_score(models, pool, plan, t_cfg, streams):
    validation = [pool[i] for i in plan.validation]
    trained, scores = [], []
    for model, batch_idx, stream in zip(models, plan.batches, streams):
        model = train_on_batch(model, [pool[i] for i in batch_idx], t_cfg, stream)
        trained.append(model)
        scores.append(fitness(model, validation))
    return trained, np.array(scores)


def evolve(gen: Generation, pool: SamplePool, plan, cfg: EvolutionConfig, train_cfg: TrainConfig, rng) -> Generation:
    """Breed, train and score the next generation."""
    if gen.fitness is None:
        raise ValueError("generation must be evaluated before it can evolve")
    if gen.size != cfg.m or len(plan.batches) != cfg.m:
        raise ValueError("population size, batch count and config m must agree")
    spec = gen.models[0].spec
    probs = selection_probs(gen.fitness)
    pairs = select_parent_pairs(gen, probs, rng)
    chromosomes = [to_chromosome(m) for m in gen.models]
    children = []
    for i, j in pairs.pairs:
        child = crossover(chromosomes[i], chromosomes[j], gen.fitness[i], gen.fitness[j], rng)
        child = mutate(child, cfg.mutation_prob, rng)
        children.append(from_chromosome(spec, child))
    models, scores = _train_and_score(children, pool, plan, train_cfg, _model_streams(rng, cfg.m))
    return Generation(gen.index + 1, models, scores)


def _trace_row(gen: Generation) -> TraceRow:
    f = gen.fitness
    return TraceRow(gen.index, float(f.min()), float(f.mean()), float(f.max()))


def run(pool: SamplePool, e_cfg: EvolutionConfig, t_cfg: TrainConfig, spec: LayerSpec, rng, callback=None):
    """Evolve ``e_cfg.K`` generations on one pool.

    The validation set is drawn once and shared by every generation; the
    training batches are redrawn each generation.

    Returns
    -------
    final : Generation
    trace : list of TraceRow
        Best, mean and worst validation loss per generation.
    """
    if len(pool) == 0:
        raise ValueError("sample pool is empty")
    if spec.input_dim < pool.k:
        raise ValueError(f"model input size {spec.input_dim} is smaller than sub-network size {pool.k}")
    plan = plan_batches(pool, e_cfg.m, e_cfg.b, e_cfg.v_size, rng)
    init_streams = _model_streams(rng, e_cfg.m)
    models = [init_params(spec, s) for s in init_streams]
    models, scores = _train_and_score(models, pool, plan, t_cfg, _model_streams(rng, e_cfg.m))
    gen = Generation(1, models, scores)
    trace = [_trace_row(gen)]
    if callback is not None:
        callback(gen)
    for _ in range(e_cfg.K - 1):
        plan = plan_batches(pool, e_cfg.m, e_cfg.b, e_cfg.v_size, rng, validation=plan.validation)
        gen = evolve(gen, pool, plan, e_cfg, t_cfg, rng)
        trace.append(_trace_row(gen))
        if callback is not None:
            callback(gen)
    return gen, trace


def write_trace(rows, path) -> None:
    """Write ``generation,best_loss,mean_loss,worst_loss`` rows.

    ``rows`` is either a list of :class:`TraceRow` or a mapping from strategy
    name to such lists; the mapping form adds a leading ``strategy`` column.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(rows, dict):
            writer.writerow(["strategy", "generation", "best_loss", "mean_loss", "worst_loss"])
            for name, trace in rows.items():
                for r in trace:
                    writer.writerow([name, r.generation, *(_fmt(v) for v in (r.best_loss, r.mean_loss, r.worst_loss))])
        else:
            writer.writerow(["generation", "best_loss", "mean_loss", "worst_loss"])
            for r in rows:
                writer.writerow([r.generation, *(_fmt(v) for v in (r.best_loss, r.mean_loss, r.worst_loss))])


def _fmt(v: float) -> str:
    return f"{v:.9g}"
