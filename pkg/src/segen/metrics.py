"""Network recovery and community detection scores for node embeddings."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from .graph import Graph

__all__ = [
    "RecoveryReport",
    "ClusterReport",
    "link_score",
    "sample_negative_pairs",
    "auc_score",
    "precision_at_k",
    "network_recovery",
    "kmeans",
    "kmeans_objective",
    "density",
    "silhouette",
    "community_detection",
    "write_metrics",
]


@dataclass(frozen=True)
class RecoveryReport:
    np_ratio: int
    auc: float
    prec_at_k: float
    k: int = 500


@dataclass(frozen=True)
class ClusterReport:
    c: int
    density: float
    silhouette: float
    assignment: np.ndarray = field(repr=False)


def _vectors(table) -> np.ndarray:
    return table.vectors if hasattr(table, "vectors") else np.asarray(table, dtype=np.float64)


def link_score(z_u, z_v):
    """Negative squared Euclidean distance; works row-wise on 2-D input."""
    z_u = np.asarray(z_u, dtype=np.float64)
    z_v = np.asarray(z_v, dtype=np.float64)
    if z_u.shape != z_v.shape:
        raise ValueError(f"embedding shapes differ: {z_u.shape} vs {z_v.shape}")
    diff = z_u - z_v
    return -np.sum(diff * diff, axis=-1)


def sample_negative_pairs(graph: Graph, count: int, rng) -> np.ndarray:
    """``count`` distinct unordered non-adjacent pairs, drawn uniformly."""
    n = graph.node_count
    available = n * (n - 1) // 2 - graph.edge_count
    if count > available:
        raise ValueError(f"need {count} negative pairs but the graph has only {available} non-edges")
    taken = set((graph.edges[:, 0] * n + graph.edges[:, 1]).tolist())
    pairs = []
    while len(pairs) < count:
        batch = max(2 * (count - len(pairs)), 64)
        u = rng.integers(0, n, size=batch)
        v = rng.integers(0, n, size=batch)
        for a, b in zip(u.tolist(), v.tolist()):
            if a == b:
                continue
            if a > b:
                a, b = b, a
            key = a * n + b
            if key in taken:
                continue
            taken.add(key)
            pairs.append((a, b))
            if len(pairs) == count:
                break
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def auc_score(pos_scores, neg_scores) -> float:
    """Mann-Whitney AUC; ties earn half credit."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("AUC needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[: len(pos)].sum() - len(pos) * (len(pos) + 1) / 2
    return float(u / (len(pos) * len(neg)))


def precision_at_k(pos_scores, neg_scores, k: int) -> float:
    """Share of positives among the ``k`` best-scored pairs.

    ``k`` is capped at the number of candidates. Ties straddling the cutoff
    are credited at the tie group's positive rate, i.e. the expectation
    over random tie-breaking.
    """
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = min(k, len(scores))
    if k == 0:
        raise ValueError("no candidate pairs")
    cutoff = np.sort(scores)[::-1][k - 1]
    above = scores > cutoff
    at = scores == cutoff
    n_above = int(above.sum())
    hits = labels[above].sum() + (k - n_above) * labels[at].mean()
    return float(hits / k)


def network_recovery(table, graph: Graph, np_ratio: int = 1, k_cutoff: int = 500, rng=None) -> RecoveryReport:
    """Score every edge against ``np_ratio * |E|`` sampled non-edges."""
    if np_ratio < 1:
        raise ValueError(f"np_ratio must be >= 1, got {np_ratio}")
    if graph.edge_count == 0:
        raise ValueError("network recovery needs at least one edge")
    z = _vectors(table)
    if len(z) != graph.node_count:
        raise ValueError(f"embedding covers {len(z)} nodes, graph has {graph.node_count}")
    rng = np.random.default_rng(rng)
    neg = sample_negative_pairs(graph, np_ratio * graph.edge_count, rng)
    pos = graph.edges
    pos_s = link_score(z[pos[:, 0]], z[pos[:, 1]])
    neg_s = link_score(z[neg[:, 0]], z[neg[:, 1]])
    return RecoveryReport(
        np_ratio=np_ratio,
        auc=auc_score(pos_s, neg_s),
        prec_at_k=precision_at_k(pos_s, neg_s, k_cutoff),
        k=min(k_cutoff, len(pos_s) + len(neg_s)),
    )


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ centers.T + np.sum(centers * centers, axis=1)[None, :])
    return np.maximum(d, 0.0)


def _kmeans_pp(x: np.ndarray, c: int, rng) -> np.ndarray:
    n = len(x)
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(x, x[chosen])[:, 0]
    for _ in range(1, c):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a center; pick an unused index
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rest[rng.integers(len(rest))])
        chosen.append(nxt)
        closest = np.minimum(closest, _sq_dists(x, x[[nxt]])[:, 0])
    return x[chosen].copy()


def kmeans_objective(x, assignment, centers) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum((x - centers[assignment]) ** 2))


def kmeans(table, c: int, rng=None, max_iter: int = 300, tol: float = 1e-6, history=None) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding.

    Stops after ``max_iter`` rounds or once no centroid moves more than
    ``tol``. An empty cluster takes over the point farthest from its current
    centroid. If ``history`` is a list, the objective after every assignment
    step is appended.
    """
    x = _vectors(table)
    n = len(x)
    if not 1 <= c <= n:
        raise ValueError(f"cluster count c={c} must lie in [1, {n}]")
    rng = np.random.default_rng(rng)
    centers = _kmeans_pp(x, c, rng)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dists = _sq_dists(x, centers)
        labels = np.argmin(dists, axis=1)
        point_cost = dists[np.arange(n), labels]
        counts = np.bincount(labels, minlength=c)
        for empty in np.flatnonzero(counts == 0):
            movable = counts[labels] > 1
            far = int(np.argmax(np.where(movable, point_cost, -1.0)))
            counts[labels[far]] -= 1
            labels[far] = empty
            counts[empty] = 1
            point_cost[far] = 0.0
            centers[empty] = x[far]
        if history is not None:
            history.append(kmeans_objective(x, labels, centers))
        new_centers = np.zeros_like(centers)
        np.add.at(new_centers, labels, x)
        new_centers /= np.bincount(labels, minlength=c)[:, None]
        shift = np.sqrt(np.max(np.sum((new_centers - centers) ** 2, axis=1)))
        centers = new_centers
        if shift < tol:
            break
    return labels


def density(assignment, graph: Graph) -> float:
    """Fraction of edges whose endpoints share a cluster."""
    if graph.edge_count == 0:
        raise ValueError("density is undefined for an edgeless graph")
    assignment = np.asarray(assignment)
    if len(assignment) != graph.node_count:
        raise ValueError(f"assignment covers {len(assignment)} nodes, graph has {graph.node_count}")
    same = assignment[graph.edges[:, 0]] == assignment[graph.edges[:, 1]]
    return float(same.mean())


def silhouette(assignment, table) -> float:
    """Mean silhouette with Euclidean distance; singleton clusters score 0."""
    x = _vectors(table)
    labels = np.asarray(assignment)
    n = len(x)
    if n < 2 or len(labels) != n:
        raise ValueError("silhouette needs at least two points and one label per point")
    clusters, inverse = np.unique(labels, return_inverse=True)
    if len(clusters) < 2:
        raise ValueError("silhouette is undefined for a single cluster")
    dist = cdist(x, x)
    onehot = np.zeros((n, len(clusters)))
    onehot[np.arange(n), inverse] = 1.0
    sizes = onehot.sum(axis=0)
    per_cluster = dist @ onehot
    own = sizes[inverse]
    a = np.where(own > 1, per_cluster[np.arange(n), inverse] / np.maximum(own - 1, 1), 0.0)
    mean_other = per_cluster / sizes[None, :]
    mean_other[np.arange(n), inverse] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(np.clip(s, -1.0, 1.0).mean())


def community_detection(table, graph: Graph, c: int, rng=None) -> ClusterReport:
    z = _vectors(table)
    labels = kmeans(z, c, rng)
    sil = silhouette(labels, z) if len(np.unique(labels)) > 1 else 0.0
    return ClusterReport(c=c, density=density(labels, graph), silhouette=sil, assignment=labels)


def write_metrics(rows, path, append: bool = False) -> None:
    """Rows of ``(task, parameter, metric, value)``."""
    mode = "a" if append else "w"
    with open(path, mode, newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if not append or fh.tell() == 0:
            writer.writerow(["task", "parameter", "metric", "value"])
        for task, param, metric, value in rows:
            writer.writerow([task, param, metric, f"{value:.9g}"])
