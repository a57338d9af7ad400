"""Sub-network sampling strategies, sample pools and batch plans.

Every sampler returns the sub-network with its nodes in selection order,
so local index 0 is always the first seed node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, SubNetwork, induced_subgraph

__all__ = [
    "STRATEGIES",
    "SamplerConfig",
    "SamplePool",
    "BatchPlan",
    "sample_bfs",
    "sample_dfs",
    "sample_hs",
    "sample_biased_node",
    "sample_biased_edge",
    "sample_subnetwork",
    "build_pool",
    "plan_batches",
    "dump_pool",
    "load_pool",
]

STRATEGIES = ("bfs", "dfs", "hs", "ns", "es")
# stable per-strategy stream tags for seed derivation
_STREAM_TAG = {name: i for i, name in enumerate(STRATEGIES)}


@dataclass(frozen=True)
class SamplerConfig:
    strategy: str = "bfs"
    k: int = 10
    pool_size: int = 200
    hs_bfs_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")
        if not 0.0 <= self.hs_bfs_prob <= 1.0:
            raise ValueError(f"hs_bfs_prob must lie in [0, 1], got {self.hs_bfs_prob}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SamplePool:
    strategy: str
    k: int
    subnetworks: tuple

    def __len__(self):
        return len(self.subnetworks)

    def __getitem__(self, i):
        return self.subnetworks[i]

    def __iter__(self):
        return iter(self.subnetworks)

    @property
    def nbytes(self) -> int:
        """Bytes held by the sub-network arrays."""
        return sum(s.nbytes for s in self.subnetworks)

    def node_coverage(self, n: int) -> np.ndarray:
        seen = np.zeros(n, dtype=bool)
        for s in self.subnetworks:
            seen[s.original_ids] = True
        return seen


@dataclass(frozen=True)
class BatchPlan:
    batches: list = field(default_factory=list)
    validation: list = field(default_factory=list)


def _check_k(g: Graph, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > g.node_count:
        raise ValueError(f"k={k} exceeds the graph's {g.node_count} nodes")


def _fresh_seed(selected: np.ndarray, rng) -> int:
    free = np.flatnonzero(~selected)
    return int(free[rng.integers(len(free))])


def sample_bfs(g: Graph, k: int, rng) -> SubNetwork:
    """Breadth-first sample of ``k`` nodes.

    Hop rings around the seed are consumed in order; a partially used ring
    contributes a uniform random subset. When the seed's component runs out,
    a new seed is drawn uniformly from the unselected nodes.
    """
    _check_k(g, k)
    selected = np.zeros(g.node_count, dtype=bool)
    order = []
    while len(order) < k:
        seed = _fresh_seed(selected, rng)
        selected[seed] = True
        order.append(seed)
        ring = [seed]
        while ring and len(order) < k:
            nxt = set()
            for v in ring:
                nxt.update(g.adjacency[v].tolist())
            ring = sorted(w for w in nxt if not selected[w])
            ring = [ring[i] for i in rng.permutation(len(ring))]
            take = ring[: k - len(order)]
            selected[take] = True
            order.extend(take)
    return induced_subgraph(g, order)


def sample_dfs(g: Graph, k: int, rng) -> SubNetwork:
    """Depth-first sample of ``k`` nodes using an explicit stack.

    Unvisited neighbors are pushed in shuffled order; same reseeding rule
    as :func:`sample_bfs`.
    """
    _check_k(g, k)
    selected = np.zeros(g.node_count, dtype=bool)
    order = []
    while len(order) < k:
        stack = [_fresh_seed(selected, rng)]
        while stack and len(order) < k:
            v = stack.pop()
            if selected[v]:
                continue
            selected[v] = True
            order.append(v)
            nbrs = g.adjacency[v][~selected[g.adjacency[v]]]
            stack.extend(nbrs[rng.permutation(len(nbrs))].tolist())
    return induced_subgraph(g, order)


class _Rings:
    """Lazily expanded hop rings around an anchor node."""

    def __init__(self, g: Graph, anchor: int):
        self.g = g
        self.seen = {anchor}
        self.current = [anchor]

    def nearest_unselected(self, selected: np.ndarray) -> list:
        while True:
            live = [v for v in self.current if not selected[v]]
            if live:
                return live
            nxt = set()
            for v in self.current:
                nxt.update(self.g.adjacency[v].tolist())
            nxt -= self.seen
            if not nxt:
                return []
            self.seen |= nxt
            self.current = sorted(nxt)


def sample_hs(g: Graph, k: int, hs_bfs_prob: float, rng) -> SubNetwork:
    """Hybrid search mixing breadth and depth steps.

    Each step tosses a coin. With probability ``hs_bfs_prob`` the next node
    is drawn uniformly from the unselected nodes nearest to the anchor
    (the current seed). Otherwise it is drawn uniformly from the unselected
    neighbors of the most recently selected node that still has any, which
    is exactly a randomized depth-first step with backtracking.
    """
    _check_k(g, k)
    if not 0.0 <= hs_bfs_prob <= 1.0:
        raise ValueError(f"hs_bfs_prob must lie in [0, 1], got {hs_bfs_prob}")
    selected = np.zeros(g.node_count, dtype=bool)
    order = []
    rings = None
    while len(order) < k:
        if rings is None:
            seed = _fresh_seed(selected, rng)
            selected[seed] = True
            order.append(seed)
            rings = _Rings(g, seed)
            continue
        if rng.random() < hs_bfs_prob:
            candidates = rings.nearest_unselected(selected)
        else:
            candidates = []
            for v in reversed(order):
                nbrs = g.adjacency[v]
                live = nbrs[~selected[nbrs]]
                if len(live):
                    candidates = live.tolist()
                    break
        if not candidates:
            # anchor's component is exhausted
            rings = None
            continue
        v = candidates[rng.integers(len(candidates))]
        selected[v] = True
        order.append(v)
    return induced_subgraph(g, order)


def _weighted_order(weights: np.ndarray, rng) -> np.ndarray:
    """Indices in the order of successive weighted draws without replacement.

    Uses exponential race keys: the item with the smallest ``E / w`` wins each
    round, which matches renormalizing the weights after every draw.
    Zero-weight items come last, in uniform random order.
    """
    with np.errstate(divide="ignore"):
        keys = rng.standard_exponential(len(weights)) / weights
    tie = rng.random(len(weights))
    return np.lexsort((tie, keys))


def sample_biased_node(g: Graph, k: int, rng) -> SubNetwork:
    """Draw ``k`` distinct nodes with probability proportional to degree.

    An edgeless graph falls back to uniform sampling.
    """
    _check_k(g, k)
    deg = g.degrees().astype(float)
    if deg.sum() == 0:
        deg = np.ones_like(deg)
    order = _weighted_order(deg, rng)[:k]
    return induced_subgraph(g, order)


def sample_biased_edge(g: Graph, k: int, rng) -> SubNetwork:
    """Accumulate edges drawn proportionally to ``d(u) + d(v)``.

    Edges are drawn without replacement until the next edge would push the
    node count past ``k`` or no edges are left. The result keeps only the
    sampled edges, so it can have fewer than ``k`` nodes (at least 2).
    """
    if g.edge_count == 0:
        raise ValueError("biased edge sampling needs at least one edge")
    if k < 2:
        raise ValueError(f"biased edge sampling needs k >= 2, got {k}")
    _check_k(g, k)
    deg = g.degrees()
    weights = (deg[g.edges[:, 0]] + deg[g.edges[:, 1]]).astype(float)
    cum = np.cumsum(weights)
    total = cum[-1]
    drawn = np.zeros(g.edge_count, dtype=bool)
    n_drawn = 0
    nodes: dict[int, int] = {}
    picked = []
    misses = 0
    while n_drawn < g.edge_count:
        if misses < 32:
            e = int(np.searchsorted(cum, rng.random() * total, side="right"))
            e = min(e, g.edge_count - 1)
            if drawn[e]:
                misses += 1
                continue
        else:
            # rejection is stalling; draw exactly from what is left
            rest = np.flatnonzero(~drawn)
            p = weights[rest] / weights[rest].sum()
            e = int(rest[rng.choice(len(rest), p=p)])
        misses = 0
        drawn[e] = True
        n_drawn += 1
        u, v = g.edges[e].tolist()
        grow = (u not in nodes) + (v not in nodes)
        if len(nodes) + grow > k:
            break
        for w in (u, v):
            if w not in nodes:
                nodes[w] = len(nodes)
        picked.append((nodes[u], nodes[v]))
    return SubNetwork.from_local_edges(list(nodes), picked)


def sample_subnetwork(g: Graph, strategy: str, k: int, rng, hs_bfs_prob: float = 0.5) -> SubNetwork:
    if strategy == "bfs":
        return sample_bfs(g, k, rng)
    if strategy == "dfs":
        return sample_dfs(g, k, rng)
    if strategy == "hs":
        return sample_hs(g, k, hs_bfs_prob, rng)
    if strategy == "ns":
        return sample_biased_node(g, k, rng)
    if strategy == "es":
        return sample_biased_edge(g, k, rng)
    raise ValueError(f"unknown strategy {strategy!r}")


def sample_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the sub-stream ``key`` of a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def build_pool(g: Graph, cfg: SamplerConfig) -> SamplePool:
    """Sample ``cfg.pool_size`` i.i.d. sub-networks.

    Sample ``i`` draws from its own sub-stream of ``cfg.seed``, so pools are
    reproducible and independent of evaluation order.
    """
    _check_k(g, cfg.k)
    tag = _STREAM_TAG[cfg.strategy]
    subs = tuple(
        sample_subnetwork(g, cfg.strategy, cfg.k, sample_stream(cfg.seed, 0, tag, i), cfg.hs_bfs_prob)
        for i in range(cfg.pool_size)
    )
    return SamplePool(cfg.strategy, cfg.k, subs)


def plan_batches(pool: SamplePool, m: int, b: int, v_size: int, rng, validation=None) -> BatchPlan:
    """Draw ``m`` training batches (with replacement) and a validation set.

    Pass an existing ``validation`` list to keep it fixed across generations;
    otherwise ``v_size`` distinct indices are drawn.
    """
    p = len(pool)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 1 <= b <= p:
        raise ValueError(f"batch size b={b} must lie in [1, {p}]")
    if validation is None:
        if not 1 <= v_size <= p:
            raise ValueError(f"validation size v_size={v_size} must lie in [1, {p}]")
        validation = sorted(rng.choice(p, size=v_size, replace=False).tolist())
    batches = [rng.integers(0, p, size=b).tolist() for _ in range(m)]
    return BatchPlan(batches=batches, validation=list(validation))


def _format_subnetwork(s: SubNetwork) -> str:
    ids = ",".join(str(v) for v in s.original_ids.tolist())
    edges = ",".join(f"({a},{b})" for a, b in s.local_edges)
    return f"ids: {ids} ; edges: {edges}"


_RECORD = re.compile(r"^ids:\s*(?P<ids>[\d,\s]*);\s*edges:\s*(?P<edges>.*)$")
_PAIR = re.compile(r"\((\d+),(\d+)\)")


def dump_pool(pool: SamplePool, path) -> None:
    """Write one ``ids: ... ; edges: ...`` record per sub-network."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# strategy: {pool.strategy} k: {pool.k} size: {len(pool)}\n")
        for s in pool:
            fh.write(_format_subnetwork(s) + "\n")


def load_pool(path) -> SamplePool:
    strategy, k, subs = "bfs", 0, []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                head = re.search(r"strategy:\s*(\w+)\s+k:\s*(\d+)", line)
                if head:
                    strategy, k = head.group(1), int(head.group(2))
                continue
            match = _RECORD.match(line)
            if match is None:
                raise ValueError(f"{path}:{lineno}: malformed pool record")
            ids = [int(t) for t in match.group("ids").split(",") if t.strip()]
            pairs = [(int(a), int(b)) for a, b in _PAIR.findall(match.group("edges"))]
            subs.append(SubNetwork.from_local_edges(ids, pairs))
    if not k:
        k = max(s.k for s in subs)
    return SamplePool(strategy, k, tuple(subs))
