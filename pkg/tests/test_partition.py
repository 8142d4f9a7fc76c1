import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperfed.errors import NoLabels, RatioOverflow
from hyperfed.hypergraph import Hypergraph, build_incidence, compute_degrees
from hyperfed.partition import (
    PartitionSpec,
    apportion,
    dirichlet_partition,
    label_tv_distance,
    make_masks,
    split_subgraphs,
    trim_border,
    trimmed_hypergraph,
)
from hyperfed.synthetic import labeled_nodes, random_hypergraph


class TestApportion:
    def test_exact_sum(self):
        assert apportion(10, [1 / 3] * 3).tolist() == [4, 3, 3]

    @settings(max_examples=50, deadline=None)
    @given(total=st.integers(0, 500), p=st.lists(st.floats(0.01, 1), min_size=1, max_size=8))
    def test_sums_to_total(self, total, p):
        sizes = apportion(total, p)
        assert sizes.sum() == total and (sizes >= 0).all()
        quotas = total * np.array(p) / sum(p)
        assert np.all(np.abs(sizes - quotas) < 1)


class TestDirichlet:
    def test_single_client(self, small_random):
        assert not dirichlet_partition(small_random, PartitionSpec(1)).any()

    def test_deterministic(self, small_random):
        spec = PartitionSpec(4, 0.5, seed=3)
        np.testing.assert_array_equal(
            dirichlet_partition(small_random, spec), dirichlet_partition(small_random, spec)
        )

    def test_seed_changes_split(self, small_random):
        a = dirichlet_partition(small_random, PartitionSpec(4, 0.5, seed=3))
        b = dirichlet_partition(small_random, PartitionSpec(4, 0.5, seed=4))
        assert (a != b).any()

    def test_requires_labels(self):
        hg = Hypergraph.create(np.zeros((4, 1)), [[0, 1]], labels=[0, -1, 1, 0])
        with pytest.raises(NoLabels):
            dirichlet_partition(hg, PartitionSpec(2))
        with pytest.raises(NoLabels):
            dirichlet_partition(Hypergraph.create(np.zeros((4, 1)), [[0]]), PartitionSpec(2))

    def test_uniform_fallback(self):
        hg = Hypergraph.create(np.zeros((9, 1)), [[0, 1]], labels=[-1] * 9, num_classes=1)
        a = dirichlet_partition(hg, PartitionSpec(3, seed=1), allow_unlabeled=True)
        assert np.bincount(a).tolist() == [3, 3, 3]

    def test_iid_limit(self):
        hg = labeled_nodes(2708, [351, 217, 418, 818, 426, 298, 180])
        spec = PartitionSpec(3, 10000.0, seed=0)
        a = dirichlet_partition(hg, spec)
        assert label_tv_distance(hg.labels, a, 3, 7).max() < 0.05

    def test_small_beta_is_skewed(self):
        hg = labeled_nodes(2000, num_classes=5)
        a = dirichlet_partition(hg, PartitionSpec(4, 0.1, seed=0))
        assert label_tv_distance(hg.labels, a, 4, 5).max() > 0.2

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            PartitionSpec(0)
        with pytest.raises(ValueError):
            PartitionSpec(2, beta=0)


class TestSplit:
    def test_single_client_all_internal(self, small_random):
        subs, border = split_subgraphs(small_random, np.zeros(60, dtype=int), 1)
        assert len(border) == 0
        assert len(subs[0].internal_edges) == small_random.num_edges

    def test_hand_trace(self, path3):
        subs, border = split_subgraphs(path3, [0, 0, 1])
        assert [e.edge_id for e in subs[0].internal_edges] == [0]
        assert list(border.entries) == [1]
        assert border[1].clients == (0, 1) and border[1].counts == (1, 1) and border[1].total == 2
        assert subs[0].border_nodes.tolist() == [1]
        assert subs[1].border_nodes.tolist() == [0]
        assert border.edges_of(1) == [1]

    @pytest.mark.parametrize("seed", range(6))
    def test_invariants(self, seed):
        hg = random_hypergraph(80, 40, weighted=True, seed=seed)
        k = 2 + seed % 4
        a = dirichlet_partition(hg, PartitionSpec(k, 1.0, seed))
        subs, border = split_subgraphs(hg, a, k)
        # every node in exactly one client
        all_ids = np.concatenate([s.global_node_ids for s in subs])
        assert sorted(all_ids.tolist()) == list(range(80))
        glob = compute_degrees(hg, build_incidence(hg)).node_degree
        for s in subs:
            internal = {e.edge_id for e in s.internal_edges}
            border_ids = {e.edge_id for e in s.border_edges}
            assert not internal & border_ids
            for e in s.border_edges:
                full = hg.hyperedges[e.edge_id]
                assert 0 < e.members.size < len(full)
            # untrimmed local degree equals the global one
            np.testing.assert_array_equal(s.node_degree_local, glob[s.global_node_ids])
        for edge_id, entry in border.entries.items():
            assert len(entry.clients) >= 2 and sum(entry.counts) == entry.total
            union = sorted(
                int(subs[c].global_node_ids[m])
                for c in entry.clients
                for e in subs[c].border_edges if e.edge_id == edge_id
                for m in e.members
            )
            assert union == list(hg.hyperedges[edge_id])
        # E* = E minus the union of internal edge sets
        internal_all = {e.edge_id for s in subs for e in s.internal_edges}
        assert set(border.entries) == set(range(hg.num_edges)) - internal_all

    def test_deterministic_bytes(self, small_random):
        a = dirichlet_partition(small_random, PartitionSpec(3, 1.0, 5))
        s1, _ = split_subgraphs(small_random, a, 3)
        s2, _ = split_subgraphs(small_random, a, 3)
        for x, y in zip(s1, s2):
            assert x.global_node_ids.tobytes() == y.global_node_ids.tobytes()
            assert x.local_features.tobytes() == y.local_features.tobytes()


class TestTrim:
    def test_local_degree(self):
        hg = Hypergraph.create(np.zeros((4, 1)), [[0, 1, 2], [2, 3]], labels=[0, 0, 0, 0])
        subs, _ = split_subgraphs(hg, [0, 0, 1, 1])
        trimmed = trim_border(subs[0])
        assert [t.members.size for t in trimmed] == [2]

    def test_single_local_member_kept(self):
        hg = Hypergraph.create(np.zeros((3, 1)), [[0, 1, 2]], labels=[0, 0, 0])
        subs, _ = split_subgraphs(hg, [0, 1, 1])
        assert [t.members.tolist() for t in trim_border(subs[0])] == [[0]]

    @pytest.mark.parametrize("seed", range(4))
    def test_rebuild_oracle(self, seed):
        hg = random_hypergraph(50, 30, weighted=True, seed=seed)
        subs, _ = split_subgraphs(hg, dirichlet_partition(hg, PartitionSpec(3, 1.0, seed)), 3)
        for s in subs:
            # rebuild the standalone graph from global member lists restricted to V_i
            mine = set(s.global_node_ids.tolist())
            pos = {g: i for i, g in enumerate(s.global_node_ids.tolist())}
            ids = [e.edge_id for e in s.internal_edges] + [e.edge_id for e in s.border_edges]
            edges = [[pos[v] for v in hg.hyperedges[e] if v in mine] for e in ids]
            ref = Hypergraph.create(s.local_features, edges, edge_weights=hg.edge_weights[ids])
            got = trimmed_hypergraph(s)
            d_ref = compute_degrees(ref, build_incidence(ref))
            d_got = compute_degrees(got, build_incidence(got))
            np.testing.assert_allclose(d_got.node_degree, d_ref.node_degree, rtol=0, atol=1e-12)
            np.testing.assert_array_equal(d_got.edge_degree, d_ref.edge_degree)


class TestMasks:
    def test_counts(self):
        m = make_masks(100, 0.1, 0.2, 0.4, seed=0)
        assert (m.train.sum(), m.val.sum(), m.test.sum()) == (10, 20, 40)
        assert not (m.train & m.val).any() and not (m.train & m.test).any() and not (m.val & m.test).any()

    def test_at_least_one_train(self):
        assert make_masks(5, 0.1, 0.2, 0.4).train.sum() == 1

    def test_empty_client(self):
        m = make_masks(0, 0.1, 0.2, 0.4)
        assert m.train.size == 0 and m.val.size == 0

    def test_overflow(self):
        with pytest.raises(RatioOverflow):
            make_masks(10, 0.5, 0.3, 0.4)

    def test_deterministic(self):
        a, b = make_masks(50, 0.1, 0.2, 0.4, seed=9), make_masks(50, 0.1, 0.2, 0.4, seed=9)
        np.testing.assert_array_equal(a.train, b.train)
        np.testing.assert_array_equal(a.test, b.test)

    def test_full_ratios_do_not_overlap(self):
        m = make_masks(3, 0.0, 0.5, 0.5)
        assert m.train.sum() + m.val.sum() + m.test.sum() <= 3
