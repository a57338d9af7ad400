import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sklearn.metrics import roc_auc_score
from sklearn.metrics import silhouette_score as sk_silhouette

from segen.datasets import make_sbm
from segen.graph import Graph
from segen.metrics import (
    auc_score,
    community_detection,
    density,
    kmeans,
    kmeans_objective,
    link_score,
    network_recovery,
    precision_at_k,
    sample_negative_pairs,
    silhouette,
    write_metrics,
)

from conftest import path4, triangle

scores = st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=30)


def brute_auc(pos, neg):
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


def brute_silhouette(labels, x):
    n = len(x)
    out = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            out.append(0.0)
            continue
        a = np.mean([np.linalg.norm(x[i] - x[j]) for j in own])
        b = min(np.mean([np.linalg.norm(x[i] - x[j]) for j in range(n) if labels[j] == c])
                for c in set(labels) if c != labels[i])
        out.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return float(np.mean(out))


def two_clouds(rng, per=30, gap=100.0, spread=1.0):
    a = rng.normal(0, spread, (per, 3))
    b = rng.normal(gap, spread, (per, 3))
    return np.vstack([a, b]), np.repeat([0, 1], per)


# --- link score ----------------------------------------------------------

def test_link_score_examples():
    assert link_score([1.0, 2.0], [1.0, 2.0]) == 0
    assert link_score([0, 0], [1, 0]) == -1
    u, v = np.random.default_rng(0).random((2, 5))
    assert link_score(u, v) == link_score(v, u)
    with pytest.raises(ValueError):
        link_score([0, 0], [0, 0, 0])


# --- AUC / precision -----------------------------------------------------

def test_auc_worked_example():
    assert auc_score([3, 1], [2, 0]) == 0.75
    assert brute_auc([3, 1], [2, 0]) == 0.75


def test_auc_ties_and_perfect():
    assert auc_score([1, 1, 1], [1, 1]) == 0.5
    assert auc_score([5, 6], [1, 2, 3]) == 1.0


@settings(max_examples=150, deadline=None)
@given(scores, scores)
def test_auc_matches_oracles(pos, neg):
    ours = auc_score(pos, neg)
    assert ours == pytest.approx(brute_auc(pos, neg), abs=1e-12)
    y = [1] * len(pos) + [0] * len(neg)
    assert ours == pytest.approx(roc_auc_score(y, pos + neg), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(scores, scores)
def test_auc_label_swap(pos, neg):
    assert auc_score(neg, pos) == pytest.approx(1 - auc_score(pos, neg), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(scores, scores)
def test_auc_invariant_under_increasing_transform(pos, neg):
    f = lambda s: np.exp(np.asarray(s) / 50.0) * 3 + 7  # noqa: E731
    # the transform must stay strictly increasing after rounding
    assume(len(set(f(pos + neg).tolist())) == len(set(pos + neg)))
    assert auc_score(f(pos), f(neg)) == pytest.approx(auc_score(pos, neg), abs=1e-12)


def test_precision_at_k():
    assert precision_at_k([9, 8], [1, 2, 3], 2) == 1.0
    assert precision_at_k([9, 1], [5, 2], 2) == 0.5
    # cutoff capped at the candidate count
    assert precision_at_k([9, 1], [5, 2], 500) == 0.5
    # two tied pairs straddle the cutoff: half credit in expectation
    assert precision_at_k([9, 4], [4], 2) == pytest.approx(0.75)


def test_precision_tie_credit_matches_enumeration():
    pos, neg, k = [3, 2, 2], [2, 2, 1], 3
    scores = pos + neg
    labels = [1] * 3 + [0] * 3
    # average over every tie-breaking order
    vals = []
    for perm in itertools.permutations(range(6)):
        rank = {i: r for r, i in enumerate(perm)}
        order = sorted(range(6), key=lambda i: (-scores[i], rank[i]))
        vals.append(sum(labels[i] for i in order[:k]) / k)
    assert precision_at_k(pos, neg, k) == pytest.approx(np.mean(vals), abs=1e-12)


# --- network recovery ----------------------------------------------------

def test_negative_pairs_distinct_non_edges():
    g, _ = make_sbm([20, 20], 0.3, 0.05, seed=2)
    neg = sample_negative_pairs(g, 300, np.random.default_rng(0))
    assert len({tuple(p) for p in neg.tolist()}) == 300
    assert all(u < v and not g.has_edge(u, v) for u, v in neg.tolist())


def test_negative_pairs_insufficient():
    with pytest.raises(ValueError):
        sample_negative_pairs(path4(), 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        network_recovery(np.zeros((3, 2)), triangle(), 1)


def test_recovery_perfect_and_tied():
    # points on a line: edges join neighbors, so positives are closest pairs
    g = Graph.from_edges([(i, i + 1) for i in range(9)])
    z = np.arange(10, dtype=float)[:, None]
    rep = network_recovery(z, g, 2, 5, np.random.default_rng(0))
    assert rep.auc == 1.0 and rep.prec_at_k == 1.0
    rep = network_recovery(np.ones((10, 3)), g, 1, 500, np.random.default_rng(0))
    assert rep.auc == 0.5 and rep.k == 18


def test_recovery_deterministic():
    g, _ = make_sbm([15, 15], 0.3, 0.05, seed=3)
    z = np.random.default_rng(1).random((30, 4))
    assert network_recovery(z, g, 2, 50, 7) == network_recovery(z, g, 2, 50, 7)


# --- k-means -------------------------------------------------------------

def test_kmeans_one_cluster():
    x = np.random.default_rng(0).random((12, 2))
    assert set(kmeans(x, 1, 0).tolist()) == {0}


def test_kmeans_each_point_own_cluster():
    x = np.random.default_rng(1).random((9, 2))
    labels = kmeans(x, 9, 0)
    assert len(set(labels.tolist())) == 9
    centers = np.array([x[labels == c].mean(axis=0) for c in range(9)])
    assert kmeans_objective(x, labels, centers) == pytest.approx(0, abs=1e-20)


def test_kmeans_recovers_clouds():
    x, truth = two_clouds(np.random.default_rng(2))
    labels = kmeans(x, 2, 0)
    assert len(set(zip(labels.tolist(), truth.tolist()))) == 2


def test_kmeans_duplicate_points_still_fill_clusters():
    x = np.vstack([np.zeros((5, 2)), np.ones((1, 2))])
    labels = kmeans(x, 3, 0)
    assert len(set(labels.tolist())) == 3


def test_kmeans_bad_c():
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 2)), 4)
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 2)), 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 40), st.integers(1, 5), st.integers(0, 2**32))
def test_kmeans_objective_non_increasing(n, c, seed):
    x = np.random.default_rng(seed).normal(size=(n, 3))
    history = []
    kmeans(x, min(c, n), seed, history=history)
    assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(history, history[1:]))


# --- density / silhouette ------------------------------------------------

def test_density_examples():
    g = triangle()
    assert density([0, 0, 0], g) == 1.0
    assert density([0, 1, 2], g) == 0.0
    assert density([0, 0, 1], g) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        density([0, 0], Graph.from_edges([], node_count=2))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.data())
def test_density_monotone_under_merge(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=25))
    edges = [(u, v) for u, v in edges if u != v] or [(0, 1)]
    g = Graph.from_edges(edges, node_count=n)
    labels = np.array(data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n)))
    a, b = data.draw(st.integers(0, 4)), data.draw(st.integers(0, 4))
    merged = np.where(labels == b, a, labels)
    assert density(merged, g) >= density(labels, g)


def test_silhouette_examples():
    x, truth = two_clouds(np.random.default_rng(3), gap=100.0, spread=1.0)
    assert silhouette(truth, x) > 0.9
    assert silhouette([0, 0, 1, 1], np.zeros((4, 2))) == 0.0
    with pytest.raises(ValueError):
        silhouette([0, 0, 0], np.zeros((3, 2)))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 25), st.integers(2, 5), st.integers(0, 2**32))
def test_silhouette_matches_oracles(n, c, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    labels = rng.integers(0, min(c, n - 1), size=n)
    labels[:2] = [0, 1]
    ours = silhouette(labels, x)
    assert -1 <= ours <= 1
    assert ours == pytest.approx(brute_silhouette(labels.tolist(), x), abs=1e-10)
    assert ours == pytest.approx(sk_silhouette(x, labels), abs=1e-10)


def test_community_detection_report():
    g, truth = make_sbm([20, 20], 0.4, 0.01, seed=5)
    z = np.where(truth[:, None] == 0, 0.0, 10.0) + np.random.default_rng(0).normal(0, 0.1, (40, 2))
    rep = community_detection(z, g, 2, 0)
    assert rep.density > 0.9 and rep.silhouette > 0.9 and len(rep.assignment) == 40
    assert community_detection(z, g, 2, 0).assignment.tolist() == rep.assignment.tolist()


def test_write_metrics(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics([("network_recovery", "np_ratio=1", "auc", 0.123456789012)], path)
    write_metrics([("community_detection", "clusters=5", "density", 1.0)], path, append=True)
    assert path.read_text().splitlines() == [
        "task,parameter,metric,value",
        "network_recovery,np_ratio=1,auc,0.123456789",
        "community_detection,clusters=5,density,1",
    ]
