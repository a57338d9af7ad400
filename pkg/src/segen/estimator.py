"""scikit-learn style front end."""

from __future__ import annotations

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .config import RunConfig
from .graph import Graph
from .pipeline import embed
from .sampling import STRATEGIES

__all__ = ["SEGEN", "check_graph"]


def check_graph(X) -> Graph:
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a ``Graph`` or a square adjacency matrix (dense or scipy
    sparse) that is symmetric, binary and has an empty diagonal.
    """
    if isinstance(X, Graph):
        return X
    if sparse.issparse(X):
        A = sparse.coo_matrix(X)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
        A.sum_duplicates()
        A.eliminate_zeros()
        rows, cols, vals = A.row, A.col, A.data
        n = A.shape[0]
    else:
        A = np.asarray(X)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A.astype(float))):
            raise ValueError("adjacency matrix contains non-finite values")
        rows, cols = np.nonzero(A)
        vals = A[rows, cols]
        n = A.shape[0]
    if np.any(vals != 1):
        raise ValueError("adjacency matrix must be binary (weighted graphs are not supported)")
    if np.any(rows == cols):
        raise ValueError("adjacency matrix has self-loops on its diagonal")
    forward = set(zip(rows.tolist(), cols.tolist()))
    if any((c, r) not in forward for r, c in forward):
        raise ValueError("adjacency matrix must be symmetric (directed graphs are not supported)")
    keep = rows < cols
    return Graph.from_edges(np.column_stack([rows[keep], cols[keep]]), node_count=n)


class SEGEN(TransformerMixin, BaseEstimator):
    """Node embeddings from sampled sub-networks and evolved autoencoders.

    ``fit`` samples a pool of sub-networks per strategy, evolves a
    population of small correlated autoencoders on each pool, and fuses the
    final populations' codes into one vector per node. The model is
    transductive: ``transform`` only accepts the graph it was fitted on.

    Parameters
    ----------
    strategies : tuple of str, default=("bfs", "dfs", "hs", "ns", "es")
        Sampling strategies whose embeddings are averaged.
    k : int, default=10
        Sub-network size.
    pool_size : int, default=200
        Sub-networks sampled per strategy.
    hs_bfs_prob : float, default=0.5
        Probability of a breadth step in hybrid sampling.
    m : int, default=10
        Population size.
    K : int, default=30
        Number of generations.
    b : int, default=10
        Training batch size per model and generation.
    v_size : int, default=10
        Validation sub-networks used for fitness.
    mutation_prob : float, default=0.01
        Per-entry mutation probability.
    alpha, beta : float, default=0.01, 1e-4
        Weights of the correlation and weight-decay terms.
    gamma_recon : float, default=5.0
        Reconstruction weight on existing links (must exceed 1).
    learning_rate : float, default=0.01
        Adam step size.
    epochs_per_batch : int, default=20
        Passes over the batch per generation.
    hidden : tuple of int, default=(32,)
        Hidden encoder widths.
    d : int, default=16
        Latent size per model; embeddings have ``m * d`` columns.
    random_state : int or None, default=None
        Master seed. ``None`` draws fresh entropy.
    n_jobs : int, default=1
        Worker processes used across strategies.

    Attributes
    ----------
    embedding_ : ndarray of shape (n_nodes, m * d)
    strategy_embeddings_ : dict of str to ndarray
    fitness_traces_ : dict of str to list of TraceRow
    generations_ : dict of str to Generation
    pools_ : dict of str to SamplePool
    n_nodes_ : int
    """

    def __init__(self, strategies=STRATEGIES, k=10, pool_size=200, hs_bfs_prob=0.5, m=10, K=30, b=10,
                 v_size=10, mutation_prob=0.01, alpha=0.01, beta=1e-4, gamma_recon=5.0, learning_rate=0.01,
                 epochs_per_batch=20, hidden=(32,), d=16, random_state=None, n_jobs=1):
        self.strategies = strategies
        self.k = k
        self.pool_size = pool_size
        self.hs_bfs_prob = hs_bfs_prob
        self.m = m
        self.K = K
        self.b = b
        self.v_size = v_size
        self.mutation_prob = mutation_prob
        self.alpha = alpha
        self.beta = beta
        self.gamma_recon = gamma_recon
        self.learning_rate = learning_rate
        self.epochs_per_batch = epochs_per_batch
        self.hidden = hidden
        self.d = d
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _run_config(self) -> RunConfig:
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % 2**64)
        strategies = (self.strategies,) if isinstance(self.strategies, str) else tuple(self.strategies)
        return RunConfig(
            strategies=strategies, k=self.k, pool_size=self.pool_size, hs_bfs_prob=self.hs_bfs_prob,
            m=self.m, K=self.K, b=self.b, v_size=self.v_size, mutation_prob=self.mutation_prob,
            alpha=self.alpha, beta=self.beta, gamma_recon=self.gamma_recon, learning_rate=self.learning_rate,
            epochs_per_batch=self.epochs_per_batch, hidden=tuple(self.hidden), d=self.d, seed=int(seed),
            threads=self.n_jobs or 1,
        )

    def fit(self, X, y=None):
        graph = check_graph(X)
        cfg = self._run_config()
        if cfg.k > graph.node_count:
            raise ValueError(f"k={cfg.k} exceeds the graph's {graph.node_count} nodes")
        results, fused = embed(graph, cfg)
        self.graph_ = graph
        self.n_nodes_ = graph.node_count
        self.embedding_ = fused.vectors
        self.strategy_embeddings_ = {s: r.table.vectors for s, r in results.items()}
        self.fitness_traces_ = {s: r.trace for s, r in results.items()}
        self.generations_ = {s: r.final for s, r in results.items()}
        self.pools_ = {s: r.pool for s, r in results.items()}
        return self

    def transform(self, X):
        check_is_fitted(self, "embedding_")
        graph = check_graph(X)
        if graph != self.graph_:
            raise ValueError("SEGEN is transductive; transform() needs the graph passed to fit()")
        return self.embedding_

    def fit_transform(self, X, y=None):
        return self.fit(X, y).embedding_
