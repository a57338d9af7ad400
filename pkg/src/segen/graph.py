"""Undirected simple graphs and induced sub-networks."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Graph",
    "SubNetwork",
    "GraphFormatError",
    "load_edge_list",
    "save_edge_list",
    "degree",
    "neighbors",
    "induced_subgraph",
    "adjacency_row",
]


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be turned into a simple graph."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on nodes ``0 .. n-1``.

    Build instances through :meth:`from_edges` (or :func:`load_edge_list`);
    the constructor trusts its arguments.

    Attributes
    ----------
    node_count : int
        Number of nodes ``n``.
    edges : ndarray of shape (n_edges, 2)
        Each undirected edge once, as ``(u, v)`` with ``u < v``, sorted
        lexicographically.
    adjacency : tuple of ndarray
        Sorted neighbor ids per node.
    """

    node_count: int
    edges: np.ndarray
    adjacency: tuple
    _edge_keys: frozenset = field(repr=False)

    @classmethod
    def from_edges(cls, edges, node_count: int | None = None) -> "Graph":
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"edges must have shape (n_edges, 2), got {arr.shape}")
        if (arr < 0).any():
            raise ValueError("node ids must be nonnegative")
        if (arr[:, 0] == arr[:, 1]).any():
            bad = arr[arr[:, 0] == arr[:, 1]][0]
            raise ValueError(f"self-loop on node {bad[0]}")
        n_seen = int(arr.max()) + 1 if len(arr) else 0
        if node_count is None:
            node_count = n_seen
        elif node_count < n_seen:
            raise ValueError(f"edge endpoint {n_seen - 1} out of range for {node_count} nodes")

        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0)
        arr.setflags(write=False)

        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        splits = np.searchsorted(rows, np.arange(node_count + 1))
        adjacency = []
        for v in range(node_count):
            nbrs = cols[splits[v]:splits[v + 1]].copy()
            nbrs.setflags(write=False)
            adjacency.append(nbrs)

        keys = frozenset((arr[:, 0] * node_count + arr[:, 1]).tolist())
        return cls(int(node_count), arr, tuple(adjacency), keys)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.node_count)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if u > v:
            u, v = v, u
        return u * self.node_count + v in self._edge_keys

    def to_scipy(self):
        """Symmetric CSR adjacency matrix."""
        from scipy import sparse

        n = self.node_count
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(len(rows), dtype=np.int8)
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.node_count, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.node_count}, edges={self.edge_count})"


@dataclass(frozen=True, eq=False)
class SubNetwork:
    """A sampled sub-network with local indices ``0 .. k-1``.

    The structure is held as a dense boolean ``k x k`` adjacency matrix, so
    storage is ``O(k^2)`` regardless of the parent graph's size.
    """

    original_ids: np.ndarray
    adjacency: np.ndarray

    def __post_init__(self):
        self.original_ids.setflags(write=False)
        self.adjacency.setflags(write=False)

    @classmethod
    def from_local_edges(cls, original_ids, local_edges) -> "SubNetwork":
        ids = np.asarray(original_ids, dtype=np.int64)
        k = len(ids)
        adj = np.zeros((k, k), dtype=bool)
        for a, b in local_edges:
            if a == b:
                raise ValueError("sub-network edges cannot be self-loops")
            adj[a, b] = adj[b, a] = True
        return cls(ids, adj)

    @property
    def k(self) -> int:
        return len(self.original_ids)

    @property
    def local_edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    @property
    def nbytes(self) -> int:
        return self.original_ids.nbytes + self.adjacency.nbytes

    def feature_matrix(self, width: int | None = None) -> np.ndarray:
        """Adjacency rows as float features, zero-padded to ``width`` columns."""
        k = self.k
        width = k if width is None else width
        if width < k:
            raise ValueError(f"cannot pad a {k}-node sub-network to width {width}")
        x = np.zeros((k, width))
        x[:, :k] = self.adjacency
        return x

    def __eq__(self, other):
        if not isinstance(other, SubNetwork):
            return NotImplemented
        return (np.array_equal(self.original_ids, other.original_ids)
                and np.array_equal(self.adjacency, other.adjacency))

    def __hash__(self):
        return hash((self.original_ids.tobytes(), self.adjacency.tobytes()))

    def __repr__(self):
        return f"SubNetwork(k={self.k}, ids={self.original_ids.tolist()}, edges={self.local_edges})"


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list.

    Blank lines and lines starting with ``#`` are skipped. Duplicate and
    reversed-duplicate edges collapse to one; ``n`` is one more than the
    largest id seen.
    """
    edges = []
    with open(os.fspath(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected two node ids, got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: node ids must be integers, got {line!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative node id in {line!r}")
            if u == v:
                raise GraphFormatError(f"{path}:{lineno}: self-loop on node {u}")
            edges.append((u, v))
    return Graph.from_edges(np.array(edges, dtype=np.int64).reshape(-1, 2))


def save_edge_list(graph: Graph, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {graph.node_count}\n")
        for u, v in graph.edges.tolist():
            fh.write(f"{u}\t{v}\n")


def _check_node(g: Graph, v) -> int:
    v = int(v)
    if not 0 <= v < g.node_count:
        raise IndexError(f"node {v} out of range for graph with {g.node_count} nodes")
    return v


def degree(g: Graph, v: int) -> int:
    return len(g.adjacency[_check_node(g, v)])


def neighbors(g: Graph, v: int, hops: int = 1) -> set[int]:
    """One-hop neighbors, or the strict two-hop ring.

    ``hops=2`` returns nodes reachable through an intermediate node that are
    neither ``v`` itself nor one of its direct neighbors.
    """
    v = _check_node(g, v)
    direct = set(g.adjacency[v].tolist())
    if hops == 1:
        return direct
    if hops != 2:
        raise ValueError(f"hops must be 1 or 2, got {hops!r}")
    ring = set()
    for w in direct:
        ring.update(g.adjacency[w].tolist())
    ring -= direct
    ring.discard(v)
    return ring


def induced_subgraph(g: Graph, ids) -> SubNetwork:
    ids = np.asarray(ids, dtype=np.int64).ravel()
    if len(np.unique(ids)) != len(ids):
        raise ValueError("sub-network node ids must be distinct")
    for v in ids:
        _check_node(g, v)
    k = len(ids)
    adj = np.zeros((k, k), dtype=bool)
    local = {int(v): i for i, v in enumerate(ids)}
    for i, v in enumerate(ids.tolist()):
        for w in g.adjacency[v].tolist():
            j = local.get(w)
            if j is not None:
                adj[i, j] = True
    return SubNetwork(ids, adj)


def adjacency_row(s: SubNetwork, i: int) -> np.ndarray:
    if not 0 <= i < s.k:
        raise IndexError(f"local index {i} out of range for sub-network of size {s.k}")
    return s.adjacency[i].astype(np.int64)
