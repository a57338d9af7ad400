"""Fusing unit-model outputs into one embedding per node."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .autoencoder import _subnet_terms, encode
from .graph import Graph

__all__ = [
    "EmbeddingTable",
    "local_ensemble",
    "propagate_missing",
    "global_ensemble",
    "write_embeddings",
    "read_embeddings",
]


@dataclass
class EmbeddingTable:
    """Dense ``(n, dim)`` vectors plus a mask of which rows are real.

    Rows of absent nodes are held as zeros and carry no meaning.
    """

    vectors: np.ndarray
    present: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.present = np.asarray(self.present, dtype=bool)
        if self.vectors.ndim != 2 or self.present.shape != (self.vectors.shape[0],):
            raise ValueError("vectors must be (n, dim) with a length-n present mask")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, node: int) -> np.ndarray | None:
        return self.vectors[node] if self.present[node] else None


def local_ensemble(final_gen, pool, graph: Graph) -> EmbeddingTable:
    """One ``m * d`` vector per node from the final generation.

    For every model, a node's codes across all pool sub-networks containing
    it are averaged; the per-model averages are then concatenated in model
    order. Nodes missing from the whole pool are marked absent.
    """
    if len(pool) == 0:
        raise ValueError("sample pool is empty")
    models = final_gen.models
    d = models[0].spec.latent_dim
    width = models[0].spec.input_dim
    n = graph.node_count
    sums = np.zeros((n, len(models) * d))
    counts = np.zeros(n)
    for s in pool:
        x = _subnet_terms(s, width)[0]
        codes = np.hstack([encode(model, x) for model in models])
        np.add.at(sums, s.original_ids, codes)
        np.add.at(counts, s.original_ids, 1)
    present = counts > 0
    sums[present] /= counts[present, None]
    return EmbeddingTable(sums, present)


def propagate_missing(table: EmbeddingTable, graph: Graph, rng) -> EmbeddingTable:
    """Fill absent nodes from their originally present neighbors.

    One pass: an absent node takes the mean of its neighbors that were
    present before the pass. Nodes with no such neighbor get a uniform
    random vector in ``[0, 1)``, drawn in ascending node order.
    """
    if table.n != graph.node_count:
        raise ValueError(f"table covers {table.n} nodes, graph has {graph.node_count}")
    before = table.present
    vectors = table.vectors.copy()
    for p in np.flatnonzero(~before):
        nbrs = graph.adjacency[p]
        nbrs = nbrs[before[nbrs]]
        if len(nbrs):
            vectors[p] = table.vectors[nbrs].mean(axis=0)
        else:
            vectors[p] = rng.random(table.dim)
    return EmbeddingTable(vectors, np.ones(table.n, dtype=bool))


def global_ensemble(tables) -> EmbeddingTable:
    """Equal-weight average across strategies.

    Absent entries count as zero vectors, so a node absent everywhere ends
    up exactly zero and is flagged absent.
    """
    tables = list(tables)
    if not tables:
        raise ValueError("need at least one embedding table")
    shape = tables[0].vectors.shape
    for t in tables[1:]:
        if t.vectors.shape != shape:
            raise ValueError(f"embedding tables disagree in shape: {shape} vs {t.vectors.shape}")
    total = np.zeros(shape)
    present = np.zeros(shape[0], dtype=bool)
    for t in tables:
        total[t.present] += t.vectors[t.present]
        present |= t.present
    return EmbeddingTable(total / len(tables), present)


def write_embeddings(table: EmbeddingTable, path) -> None:
    """CSV with header ``node_id,dim_0,...``; values to 9 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", *(f"dim_{i}" for i in range(table.dim))])
        for node in range(table.n):
            writer.writerow([node, *(f"{v:.9g}" for v in table.vectors[node].tolist())])


def read_embeddings(path) -> EmbeddingTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "node_id":
            raise ValueError(f"{path}: missing node_id header")
        dim = len(header) - 1
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise ValueError(f"{path}:{lineno}: expected {dim + 1} fields, got {len(row)}")
            rows[int(row[0])] = [float(v) for v in row[1:]]
    n = max(rows) + 1 if rows else 0
    vectors = np.zeros((n, dim))
    present = np.zeros(n, dtype=bool)
    for node, vec in rows.items():
        vectors[node] = vec
        present[node] = True
    return EmbeddingTable(vectors, present)
