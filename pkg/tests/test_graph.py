import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigspec.graph import (Graph, GraphFormatError, connected_components, degrees,
                           distance_metrics, load_edge_list, save_edge_list)

from oracles import adjacency_lists, components, largest_component_distances, tree_diameter


def test_load_unit_weights():
    g = load_edge_list("0 1\n1 2", directed=False)
    assert g.n == 3
    assert {k: v for k, v in g.edges.items() if k[0] < k[1]} == {(0, 1): 1.0, (1, 2): 1.0}


def test_load_string_labels_and_weight():
    g = load_edge_list("a b 2.5")
    assert g.n == 2 and g.labels == ["a", "b"]
    assert g.weight(0, 1) == 2.5 == g.weight(1, 0)


def test_load_drops_loops():
    g = load_edge_list("0 0\n0 1")
    assert g.n == 2 and g.edge_count == 1 and g.dropped_loops == 1


def test_load_comments_blank_and_duplicates():
    g = load_edge_list("# header\n\nx y 1\ny x 3\n")
    assert g.edge_count == 1 and g.weight(0, 1) == 3.0


def test_load_empty_document():
    g = load_edge_list("")
    assert g.n == 0 and g.edges == {}


@pytest.mark.parametrize("text, lineno", [("0 1\n0 1 2 3", 2), ("0", 1), ("0 1 abc", 1), ("0 1\n1 2 nan", 2), ("0 1 inf", 1)])
def test_load_errors_name_the_line(text, lineno):
    with pytest.raises(GraphFormatError, match=f"line {lineno}"):
        load_edge_list(text)


def test_directed_load_keeps_orientation():
    g = load_edge_list("0 1\n1 0 2", directed=True)
    assert g.weight(0, 1) == 1.0 and g.weight(1, 0) == 2.0


def test_save_format_and_roundtrip():
    g = load_edge_list("a b 0.1\nb c\n")
    text = save_edge_list(g)
    assert text == "a\tb\t0.1\nb\tc\t1.0\n"
    again = load_edge_list(text)
    assert again.edges == g.edges and again.labels == g.labels


def test_path_degrees(path3):
    out_s, in_s = degrees(path3)
    assert out_s.tolist() == [1, 2, 1] == in_s.tolist()


def test_directed_degrees():
    g = Graph.from_edges(2, [(0, 1)], directed=True)
    out_s, in_s = degrees(g)
    assert out_s.tolist() == [1, 0] and in_s.tolist() == [0, 1]


def test_karate_counts(karate):
    out_s, in_s = degrees(karate)
    assert karate.n == 34 and karate.edge_count == 78
    assert out_s.max() == 17 and out_s.sum() == 156
    assert np.array_equal(out_s, in_s)


def test_components_small():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert connected_components(g)[1] == [2, 2]
    assert connected_components(Graph(3))[1] == [1, 1, 1]


def test_karate_connected(karate):
    pairs = [(i, j) for i, j, _ in karate.unique_edges()]
    assert components(adjacency_lists(34, pairs)) == [34]
    assert connected_components(karate)[1] == [34]


def test_component_labels_largest_first():
    g = Graph.from_edges(5, [(3, 4), (2, 3)])
    labels, sizes = connected_components(g)
    assert sizes == [3, 1, 1]
    assert set(np.flatnonzero(labels == 0)) == {2, 3, 4}


def test_distances_path(path3):
    r = distance_metrics(path3)
    assert r.component_size == 3 and r.max_distance == 2
    assert r.avg_distance == pytest.approx(4 / 3)


def test_distances_star():
    r = distance_metrics(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
    assert (r.component_size, r.avg_distance, r.max_distance) == (4, 1.5, 2)


def test_distances_isolated_nodes():
    r = distance_metrics(Graph(3))
    assert (r.component_size, r.avg_distance, r.max_distance) == (1, 0.0, 0)


def test_distances_ignore_direction_and_weight():
    g = Graph.from_edges(3, [(0, 1, 5.0), (2, 1, 0.5)], directed=True)
    assert distance_metrics(g).max_distance == 2


edge_lists = st.integers(2, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30)))


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_distances_match_bfs_oracle(data):
    n, pairs = data
    g = Graph.from_edges(n, pairs)
    size, avg, worst = largest_component_distances(adjacency_lists(n, pairs))
    r = distance_metrics(g)
    assert r.component_size == size and r.max_distance == worst
    assert r.avg_distance == pytest.approx(avg)
    if size >= 2:
        assert 1 <= r.avg_distance <= r.max_distance < r.component_size
    assert sum(connected_components(g)[1]) == n


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=25))
def test_tree_diameter_double_bfs(seeds):
    # random recursive tree: node k attaches to an earlier node
    pairs = [(k + 1, s % (k + 1)) for k, s in enumerate(seeds)]
    n = len(seeds) + 1
    assert distance_metrics(Graph.from_edges(n, pairs)).max_distance == tree_diameter(adjacency_lists(n, pairs))


@settings(max_examples=40, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_undirected_strengths_equal_and_total(data, rnd):
    n, pairs = data
    g = Graph.from_edges(n, [(u, v, rnd.uniform(-2, 2)) for u, v in pairs])
    out_s, in_s = degrees(g)
    assert np.allclose(out_s, in_s)
    assert math.isclose(out_s.sum(), 2 * sum(w for _, _, w in g.unique_edges()), abs_tol=1e-9)
    # save/load keeps the edge set up to reindexing
    again = load_edge_list(save_edge_list(g))
    relabel = {lab: int(lab) for lab in again.labels}
    mapped = {(relabel[again.labels[i]], relabel[again.labels[j]]): w for (i, j), w in again.edges.items()}
    assert mapped == g.edges


def test_graph_invariants():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 1, float("inf"))])
    with pytest.raises(IndexError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(ValueError):
        Graph.from_adjacency(np.array([[0, 1], [0, 0]]))
