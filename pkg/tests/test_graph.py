import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segen.graph import (
    Graph,
    GraphFormatError,
    adjacency_row,
    degree,
    induced_subgraph,
    load_edge_list,
    neighbors,
    save_edge_list,
)

from conftest import path4, star5, triangle


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_two_edges(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2"))
    assert (g.n, g.edge_count) == (3, 2)


def test_load_dedups_reversed_lines(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 0\n0 1"))
    assert (g.n, g.edge_count) == (2, 1)


def test_load_rejects_self_loop(tmp_path):
    with pytest.raises(GraphFormatError, match="self-loop"):
        load_edge_list(write(tmp_path, "3 3"))


def test_load_reports_line_number(tmp_path):
    with pytest.raises(GraphFormatError, match=":3"):
        load_edge_list(write(tmp_path, "0 1\n# note\nfoo bar\n"))


@pytest.mark.parametrize("text", ["0 1 2\n", "-1 2\n", "0\n", "1.5 2\n"])
def test_load_rejects_malformed(tmp_path, text):
    with pytest.raises(GraphFormatError):
        load_edge_list(write(tmp_path, text))


def test_load_tabs_comments_blank_lines(tmp_path):
    g = load_edge_list(write(tmp_path, "# header\n\n0\t1\n  2 1  \n"))
    assert g == Graph.from_edges([(0, 1), (1, 2)])


def test_save_load_round_trip(tmp_path):
    g = star5()
    save_edge_list(g, tmp_path / "out.txt")
    assert load_edge_list(tmp_path / "out.txt") == g


def test_degree_examples():
    g = star5()
    assert degree(g, 0) == 4
    assert degree(g, 1) == 1
    iso = Graph.from_edges([(0, 1)], node_count=3)
    assert degree(iso, 2) == 0


@pytest.mark.parametrize("v", [-1, 5, 100])
def test_degree_out_of_range(v):
    with pytest.raises(IndexError):
        degree(star5(), v)


def test_neighbors_examples():
    assert neighbors(path4(), 0, 1) == {1}
    assert neighbors(path4(), 0, 2) == {2}
    assert neighbors(triangle(), 0, 2) == set()


def test_neighbors_bad_hops():
    with pytest.raises(ValueError):
        neighbors(path4(), 0, 3)


def test_induced_subgraph_examples():
    s = induced_subgraph(triangle(), [0, 1])
    assert s.k == 2 and s.local_edges == [(0, 1)]
    assert induced_subgraph(star5(), [1, 2]).local_edges == []
    assert len(induced_subgraph(path4(), [0, 1, 2]).local_edges) == 2


def test_induced_subgraph_keeps_order():
    s = induced_subgraph(path4(), [2, 0, 1])
    assert s.original_ids.tolist() == [2, 0, 1]
    # local 0 = node 2, local 2 = node 1
    assert sorted(s.local_edges) == [(0, 2), (1, 2)]


def test_induced_subgraph_rejects_duplicates():
    with pytest.raises(ValueError):
        induced_subgraph(path4(), [0, 0, 1])


def test_adjacency_row_examples():
    full = induced_subgraph(triangle(), [0, 1, 2])
    assert adjacency_row(full, 0).tolist() == [0, 1, 1]
    empty = induced_subgraph(star5(), [1, 2, 3])
    for i in range(3):
        assert adjacency_row(empty, i).tolist() == [0, 0, 0]
    p = induced_subgraph(path4(), [0, 1, 2])
    assert adjacency_row(p, 1).tolist() == [1, 0, 1]


def test_subnetwork_storage_depends_on_k_only():
    small = induced_subgraph(Graph.from_edges([(0, 1)], node_count=10), list(range(5)))
    big = induced_subgraph(Graph.from_edges([(0, 1)], node_count=10_000), list(range(5)))
    assert small.nbytes == big.nbytes


# random simple graphs as edge lists on up to 12 nodes
edge_lists = st.integers(2, 12).flatmap(
    lambda n: st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
        max_size=40,
    ).map(lambda es: (n, es))
)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_degree_matches_neighbors_and_handshake(data):
    n, es = data
    g = Graph.from_edges(es, node_count=n)
    degs = [degree(g, v) for v in range(n)]
    assert all(d == len(neighbors(g, v, 1)) for v, d in enumerate(degs))
    assert sum(degs) == 2 * g.edge_count
    for u in range(n):
        for v in neighbors(g, u, 1):
            assert u in neighbors(g, v, 1)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_two_hop_ring_matches_enumeration(data):
    n, es = data
    g = Graph.from_edges(es, node_count=n)
    for v in range(n):
        direct = neighbors(g, v, 1)
        reach = {w for u in direct for w in neighbors(g, u, 1)}
        assert neighbors(g, v, 2) == reach - direct - {v}


@settings(max_examples=60, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_induced_rows_form_symmetric_zero_diagonal(data, rnd):
    n, es = data
    g = Graph.from_edges(es, node_count=n)
    ids = rnd.sample(range(n), rnd.randint(1, n))
    s = induced_subgraph(g, ids)
    a = np.array([adjacency_row(s, i) for i in range(s.k)])
    assert np.array_equal(a, a.T)
    assert not np.any(np.diag(a))
    for i, j in itertools.combinations(range(s.k), 2):
        assert bool(a[i, j]) == g.has_edge(ids[i], ids[j])


@settings(max_examples=40, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_load_is_line_order_invariant(tmp_path_factory, data, rnd):
    n, es = data
    es = es or [(0, 1)]
    lines = [f"{u} {v}" for u, v in es]
    shuffled = [f"{v} {u}" if rnd.random() < 0.5 else f"{u} {v}" for u, v in es]
    rnd.shuffle(shuffled)
    d = tmp_path_factory.mktemp("perm")
    a = load_edge_list(write(d, "\n".join(lines), "a.txt"))
    b = load_edge_list(write(d, "\n".join(shuffled), "b.txt"))
    assert a == b
