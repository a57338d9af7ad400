"""Synthetic planted-community graphs and the bundled fixture."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .graph import Graph, load_edge_list

__all__ = ["make_sbm", "load_sbm300", "SBM300_RESOURCE"]

SBM300_RESOURCE = "sbm300.txt"


def make_sbm(sizes, p_intra: float, p_inter: float, seed=None):
    """Sample a stochastic block model graph.

    Blocks occupy contiguous id ranges in the order given by ``sizes``.

    Returns
    -------
    graph : Graph
    labels : ndarray of shape (n,)
        Block index of every node.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("block sizes must be positive")
    for name, p in (("p_intra", p_intra), ("p_inter", p_inter)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)

    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], p_intra, p_inter)
    keep = rng.random(len(iu)) < prob
    graph = Graph.from_edges(np.column_stack([iu[keep], ju[keep]]), node_count=n)
    return graph, labels


def load_sbm300():
    """The bundled 300-node, 2-block SBM (intra 0.1, inter 0.01).

    Nodes ``0..149`` form block 0 and ``150..299`` block 1.
    """
    ref = resources.files("segen.data").joinpath(SBM300_RESOURCE)
    with resources.as_file(ref) as path:
        graph = load_edge_list(path)
    labels = np.repeat([0, 1], 150)
    return graph, labels
