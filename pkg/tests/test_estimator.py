import numpy as np
import pytest
from scipy import sparse
from sklearn.base import clone
from sklearn.cluster import KMeans
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from segen import SEGEN
from segen.datasets import make_sbm
from segen.estimator import check_graph
from segen.graph import Graph

SMALL = dict(strategies=("bfs", "ns"), k=5, pool_size=20, m=2, K=2, b=2, v_size=3, epochs_per_batch=1,
             hidden=(4,), d=3)


@pytest.fixture(scope="module")
def graph():
    return make_sbm([15, 15], 0.3, 0.03, seed=8)[0]


def test_params_and_clone():
    est = SEGEN(k=7, random_state=3)
    params = est.get_params()
    assert params["k"] == 7 and params["random_state"] == 3 and params["strategies"] == ("bfs", "dfs", "hs", "ns", "es")
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(alpha=0.5)
    assert est.alpha == 0.5


def test_fit_attributes(graph):
    est = SEGEN(**SMALL, random_state=0).fit(graph)
    assert est.embedding_.shape == (30, 2 * 3)
    assert set(est.strategy_embeddings_) == {"bfs", "ns"}
    assert all(len(t) == 2 for t in est.fitness_traces_.values())
    assert est.n_nodes_ == 30 and len(est.pools_["bfs"]) == 20


def test_inputs_equivalent(graph):
    dense = graph.to_scipy().toarray()
    a = SEGEN(**SMALL, random_state=1).fit_transform(graph)
    b = SEGEN(**SMALL, random_state=1).fit_transform(dense)
    c = SEGEN(**SMALL, random_state=1).fit_transform(sparse.csr_matrix(dense))
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_transform_is_transductive(graph):
    est = SEGEN(**SMALL, random_state=2).fit(graph)
    assert np.array_equal(est.transform(graph), est.embedding_)
    with pytest.raises(ValueError, match="transductive"):
        est.transform(Graph.from_edges([(0, 1)], node_count=30))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SEGEN().transform(Graph.from_edges([(0, 1)]))


def test_random_state_none_varies(graph):
    a = SEGEN(**SMALL).fit_transform(graph)
    b = SEGEN(**SMALL).fit_transform(graph)
    assert not np.array_equal(a, b)


def test_in_sklearn_pipeline(graph):
    pipe = make_pipeline(SEGEN(**SMALL, random_state=4), KMeans(n_clusters=2, n_init=3, random_state=0))
    labels = pipe.fit_predict(graph.to_scipy().toarray())
    assert labels.shape == (30,)


def test_bad_hyperparameter_raises_on_fit(graph):
    with pytest.raises(ValueError, match="k"):
        SEGEN(**{**SMALL, "k": 0}).fit(graph)
    with pytest.raises(ValueError):
        SEGEN(**{**SMALL, "k": 40}).fit(graph)


@pytest.mark.parametrize("bad,msg", [
    (np.ones((2, 3)), "square"),
    (np.array([[0, 2], [2, 0]]), "binary"),
    (np.array([[1, 1], [1, 0]]), "self-loop"),
    (np.array([[0, 1], [0, 0]]), "symmetric"),
    (np.array([[0, np.nan], [np.nan, 0]]), "non-finite"),
    (sparse.csr_matrix(np.array([[0, 1], [0, 0]])), "symmetric"),
])
def test_check_graph_rejects(bad, msg):
    with pytest.raises(ValueError, match=msg):
        check_graph(bad)


def test_check_graph_keeps_isolated_nodes():
    a = np.zeros((4, 4))
    a[0, 1] = a[1, 0] = 1
    g = check_graph(a)
    assert g.node_count == 4 and g.edge_count == 1
