import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperfed.errors import EmptyGraph
from hyperfed.hypergraph import (
    Hypergraph,
    build_incidence,
    compute_degrees,
    dedup_hyperedges,
    from_simple_graph,
    validate,
)
from hyperfed.synthetic import random_hypergraph

from conftest import dense_incidence


class TestIncidence:
    def test_transpose_of_two_edges(self, path3):
        idx = build_incidence(path3)
        assert [e.tolist() for e in idx.node_to_edges] == [[0], [0, 1], [1]]
        assert [e.tolist() for e in idx.edge_to_nodes] == [[0, 1], [1, 2]]

    def test_singleton(self):
        hg = Hypergraph.create(np.zeros((1, 1)), [[0]])
        assert [e.tolist() for e in build_incidence(hg).node_to_edges] == [[0]]

    def test_matches_brute_force(self):
        hg = random_hypergraph(50, 20, seed=11)
        idx = build_incidence(hg)
        np.testing.assert_array_equal(idx.dense(), dense_incidence(hg))

    def test_isolated_node_has_no_edges(self):
        hg = Hypergraph.create(np.zeros((3, 1)), [[0, 1]])
        assert build_incidence(hg).node_to_edges[2].size == 0


class TestDegrees:
    def test_unit_weights(self, path3):
        deg = compute_degrees(path3, build_incidence(path3))
        assert deg.node_degree.tolist() == [1, 2, 1]
        assert deg.edge_degree.tolist() == [2, 2]

    def test_weighted(self):
        hg = Hypergraph.create(np.zeros((3, 1)), [[0, 1], [1, 2]], edge_weights=[2, 3])
        assert compute_degrees(hg, build_incidence(hg)).node_degree.tolist() == [2, 5, 3]

    @pytest.mark.parametrize("seed", range(5))
    def test_against_dense(self, seed):
        hg = random_hypergraph(100 + 20 * seed, 40, weighted=True, seed=seed)
        deg = compute_degrees(hg, build_incidence(hg))
        h = dense_incidence(hg)
        # explicit ascending-edge loop: exact comparison needs a fixed summation order
        node_degree = [sum(hg.edge_weights[e] * h[v, e] for e in range(hg.num_edges)) for v in range(hg.num_nodes)]
        np.testing.assert_array_equal(deg.node_degree, node_degree)
        np.testing.assert_array_equal(deg.edge_degree, h.sum(axis=0))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 40),
    edges=st.lists(st.lists(st.integers(0, 39), min_size=1, max_size=6), max_size=15),
)
def test_transpose_consistency(n, edges):
    edges = [[v % n for v in e] for e in edges]
    edges, _ = dedup_hyperedges(edges)
    hg = Hypergraph.create(np.zeros((n, 1)), edges)
    idx = build_incidence(hg)
    for e, members in enumerate(idx.edge_to_nodes):
        for v in members:
            assert e in idx.node_to_edges[v]
    for v, incident in enumerate(idx.node_to_edges):
        for e in incident:
            assert v in idx.edge_to_nodes[e]


class TestFromSimpleGraph:
    def test_triangle_collapses_to_one_edge(self):
        hg = from_simple_graph([(0, 1), (1, 2), (0, 2)], np.zeros((3, 1)))
        assert hg.hyperedges == ((0, 1, 2),)
        assert hg.edge_weights.tolist() == [1.0]

    def test_path(self):
        hg = from_simple_graph([(0, 1), (1, 2)], np.zeros((3, 1)))
        assert sorted(hg.hyperedges) == [(0, 1), (0, 1, 2), (1, 2)]

    def test_both_directions_and_self_loops_tolerated(self):
        hg = from_simple_graph([(0, 1), (1, 0), (1, 1)], np.zeros((2, 1)))
        assert hg.hyperedges == ((0, 1),)

    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            from_simple_graph([], np.zeros((0, 3)))

    def test_dedup_idempotent(self):
        rng = np.random.default_rng(0)
        edges = [rng.choice(10, size=rng.integers(1, 4), replace=False).tolist() for _ in range(50)]
        once, w1 = dedup_hyperedges(edges)
        twice, w2 = dedup_hyperedges(once, w1)
        assert once == twice and w1 == w2

    def test_dedup_sums_weights(self):
        edges, weights = dedup_hyperedges([[1, 0], [0, 1], [2]], [1.0, 2.5, 1.0])
        assert edges == [(0, 1), (2,)]
        assert weights == [3.5, 1.0]


class TestValidate:
    def test_valid(self, path3):
        assert validate(path3) == []

    def test_out_of_range_member(self):
        hg = Hypergraph.create(np.zeros((2, 1)), [[0, 2]])
        report = validate(hg)
        assert len(report) == 1 and "out-of-range" in report[0]

    def test_negative_weight(self):
        hg = Hypergraph.create(np.zeros((2, 1)), [[0, 1]], edge_weights=[-1.0])
        assert any("non-positive weight" in p for p in validate(hg))

    def test_empty_and_duplicate_members(self):
        hg = Hypergraph.create(np.zeros((2, 1)), [[], [1, 1]])
        report = validate(hg)
        assert any("empty" in p for p in report)
        assert any("duplicate" in p for p in report)

    def test_weight_length(self):
        hg = Hypergraph.create(np.zeros((2, 1)), [[0, 1]], edge_weights=[1.0, 1.0])
        assert any("edge_weights" in p for p in validate(hg))

    def test_bad_label(self):
        hg = Hypergraph.create(np.zeros((2, 1)), [[0, 1]], labels=[0, 5], num_classes=2)
        assert any("label" in p for p in validate(hg))

    def test_immutable(self, path3):
        with pytest.raises(ValueError):
            path3.features[0, 0] = 1.0
