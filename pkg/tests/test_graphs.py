import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moranlab import (Digraph, GraphError, edge_boundary, graph_from_edgelist,
                      graph_from_json, graph_to_edgelist, graph_to_json,
                      is_biregular, is_strongly_connected)
from moranlab.generators import baseline_graph


def c3_plus_c24():
    tri = [(0, 1), (1, 2), (2, 0)]
    c24 = [(3 + i, 3 + (i + 1) % 24) for i in range(24)]
    return Digraph(27, tri + c24)


class TestEdgeBoundary:
    def test_complete_graph_single_vertex(self):
        assert edge_boundary(baseline_graph("complete", 4), [0]) == 3

    def test_cycle_arc(self):
        assert edge_boundary(baseline_graph("cycle", 6), [0, 1, 2]) == 2

    def test_disconnected_component(self):
        assert edge_boundary(c3_plus_c24(), [0, 1, 2]) == 0

    def test_two_set_form(self):
        G = baseline_graph("complete", 4)
        assert edge_boundary(G, [0], [1, 2, 3]) == 3
        assert edge_boundary(G, [0, 1], [2]) == 2

    def test_overlap_rejected(self):
        G = baseline_graph("complete", 4)
        with pytest.raises(GraphError):
            edge_boundary(G, [0, 1], [1, 2])

    def test_out_of_range_rejected(self):
        G = baseline_graph("complete", 4)
        with pytest.raises(GraphError):
            edge_boundary(G, [0, 9])

    def test_directed_counts_both_orientations(self):
        G = Digraph(3, [(0, 1), (2, 1)], directed=True)
        assert edge_boundary(G, [1]) == 2

    def test_complement_symmetry_regular(self):
        # d-regular: both sides of any cut see the same boundary
        G = baseline_graph("cycle", 9)
        rng = np.random.default_rng(0)
        for _ in range(20):
            S = [v for v in range(9) if rng.random() < 0.4]
            if 0 < len(S) < 9:
                comp = [v for v in range(9) if v not in S]
                assert edge_boundary(G, S) == edge_boundary(G, comp)


class TestConnectivity:
    def test_directed_cycle(self):
        assert is_strongly_connected(
            Digraph(3, [(0, 1), (1, 2), (2, 0)], directed=True))

    def test_directed_path(self):
        assert not is_strongly_connected(
            Digraph(3, [(0, 1), (1, 2)], directed=True))

    def test_connected_undirected(self):
        assert is_strongly_connected(baseline_graph("path", 5))

    def test_disconnected(self):
        assert not is_strongly_connected(c3_plus_c24())

    def test_single_vertex(self):
        assert is_strongly_connected(Digraph(1, []))


class TestBiregular:
    def test_complete_bipartite(self):
        G = Digraph(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
        assert is_biregular(G, [0, 1], [2, 3, 4]) == (True, (3, 2))

    def test_star(self):
        assert is_biregular(baseline_graph("star", 4), [0], [1, 2, 3]) \
            == (True, (3, 1))

    def test_path_split(self):
        assert is_biregular(baseline_graph("path", 3), [0, 2], [1]) \
            == (True, (1, 2))

    def test_not_biregular(self):
        G = baseline_graph("path", 4)
        ok, degs = is_biregular(G, [0, 1], [2, 3])
        assert not ok and degs is None

    def test_empty_side_rejected(self):
        with pytest.raises(GraphError):
            is_biregular(baseline_graph("path", 3), [], [1])


class TestConstruction:
    def test_self_loop_rejected(self):
        with pytest.raises(GraphError):
            Digraph(2, [(0, 0)])

    def test_duplicate_rejected(self):
        with pytest.raises(GraphError):
            Digraph(3, [(0, 1), (1, 0)])   # same undirected edge twice

    def test_duplicate_arc_rejected(self):
        with pytest.raises(GraphError):
            Digraph(3, [(0, 1), (0, 1)], directed=True)

    def test_out_of_range_edge(self):
        with pytest.raises(GraphError):
            Digraph(2, [(0, 5)])

    def test_degree_sums_match(self):
        G = Digraph(4, [(0, 1), (1, 2), (2, 0), (3, 0)], directed=True)
        assert G.out_degrees().sum() == G.in_degrees().sum() == 4

    def test_label_validation(self):
        with pytest.raises(GraphError):
            Digraph(3, [(0, 1)], labels={"V1": [0], "V2": [0]})
        with pytest.raises(GraphError):
            Digraph(3, [(0, 1)], labels={"V9": [0]})

    def test_adjacency_sorted(self):
        G = Digraph(4, [(0, 3), (0, 1), (0, 2)])
        assert list(G.out_neighbors(0)) == [1, 2, 3]


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 8))
    directed = draw(st.booleans())
    pairs = [(u, v) for u in range(n) for v in range(n)
             if (u != v if directed else u < v)]
    picked = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=14))
    labels = None
    if draw(st.booleans()) and n >= 3:
        labels = {"V1": [0], "V2": [1], "V3": [2]}
    return Digraph(n, picked, directed=directed, labels=labels)


class TestSerialization:
    @given(small_graphs())
    @settings(max_examples=60, deadline=None)
    def test_json_round_trip(self, G):
        assert graph_from_json(graph_to_json(G)) == G

    @given(small_graphs())
    @settings(max_examples=60, deadline=None)
    def test_edgelist_round_trip(self, G):
        H = graph_from_edgelist(graph_to_edgelist(G))
        assert (H.n, H.directed) == (G.n, G.directed)
        assert np.array_equal(H.out_idx, G.out_idx)

    def test_labels_survive_json(self):
        G = Digraph(4, [(0, 1), (1, 2)], labels={"V1": [0, 3], "V3": [1]})
        H = graph_from_json(graph_to_json(G))
        assert H.labels == G.labels

    def test_file_round_trip(self, tmp_path):
        from moranlab import load_graph, save_graph
        G = baseline_graph("cycle", 5)
        for name in ("g.json", "g.txt"):
            save_graph(G, tmp_path / name)
            H = load_graph(tmp_path / name)
            assert H.n == G.n and H.m == G.m
