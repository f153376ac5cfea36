import numpy as np
import pytest

from rangesim.core import make_rng
from rangesim.metrics import (
    NetworkSnapshot,
    average_clustering,
    average_degree,
    average_shortest_path_length,
    components,
    metrics_snapshot,
    sample_gnm,
    small_world_index,
    transitivity,
)

from oracles import (
    aspl_oracle,
    clustering_oracle,
    components_oracle,
    degree_oracle,
    random_graph,
    small_world_oracle,
)


def snap(n, edges):
    return NetworkSnapshot.from_edges(n, edges)


def complete(n):
    return snap(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestWorkedExamples:
    def test_degree_empty(self):
        assert average_degree(snap(7, [])) == 0.0

    def test_degree_complete(self):
        assert average_degree(complete(6)) == 5.0

    def test_degree_path(self):
        assert average_degree(snap(3, [(0, 1), (1, 2)])) == pytest.approx(4 / 3)

    def test_clustering_one_third_node(self):
        # hub 0 linked to 1,2,3 with only 1-2 closed: local coefficient 1/3
        g = snap(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
        a = g.adj.astype(float)
        local_hub = ((a @ a) * a)[0].sum() / (3 * 2)
        assert local_hub == pytest.approx(1 / 3)
        assert average_clustering(g) == pytest.approx((1 / 3 + 1 + 1 + 0) / 4)

    def test_clustering_complete_is_one(self):
        assert average_clustering(complete(5)) == 1.0

    def test_aspl_no_edges(self):
        assert average_shortest_path_length(snap(6, [])) == 0.0

    def test_aspl_complete_is_one(self):
        assert average_shortest_path_length(complete(5)) == 1.0

    def test_aspl_path_three(self):
        assert average_shortest_path_length(snap(3, [(0, 1), (1, 2)])) == pytest.approx(4 / 3)

    def test_components_no_edges(self):
        assert components(snap(8, [])) == (8, 1)

    def test_components_connected(self):
        assert components(complete(6)) == (1, 6)

    def test_components_two_pairs(self):
        assert components(snap(5, [(0, 1), (2, 3)])) == (3, 2)

    def test_small_world_complete_is_one(self):
        assert small_world_index(complete(5), make_rng(1, 0), n_ref=4) == pytest.approx(1.0)

    def test_small_world_empty_missing(self):
        assert small_world_index(snap(5, []), make_rng(1, 0), n_ref=4) is None

    def test_transitivity_endpoints(self):
        assert transitivity(complete(5)) == 1.0
        assert transitivity(snap(3, [(0, 1), (1, 2)])) == 0.0
        assert transitivity(snap(3, [])) == 0.0


class TestMetricsSnapshot:
    def test_empty_graph_row(self):
        row = metrics_snapshot(snap(5, []), make_rng(1, 0), timestep=3)
        assert (row.avg_degree, row.clustering, row.aspl) == (0.0, 0.0, 0.0)
        assert (row.n_components, row.largest_component) == (5, 1)
        assert row.small_world is None
        assert row.timestep == 3

    def test_complete_graph_row(self):
        row = metrics_snapshot(complete(5), make_rng(1, 0))
        assert (row.avg_degree, row.clustering, row.aspl) == (4.0, 1.0, 1.0)
        assert (row.n_components, row.largest_component) == (1, 5)
        assert row.small_world == pytest.approx(1.0)

    def test_composition_matches_parts(self):
        g = snap(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
        row = metrics_snapshot(g, make_rng(4, 0), n_ref=6)
        assert row.avg_degree == average_degree(g)
        assert row.clustering == average_clustering(g)
        assert row.aspl == average_shortest_path_length(g)
        assert (row.n_components, row.largest_component) == components(g)
        assert row.small_world == small_world_index(g, make_rng(4, 0), n_ref=6)

    def test_small_world_disabled(self):
        row = metrics_snapshot(complete(4), make_rng(1, 0), small_world=False)
        assert row.small_world is None

    def test_single_node_row(self):
        row = metrics_snapshot(snap(1, []), make_rng(1, 0))
        assert (row.avg_degree, row.aspl, row.n_components, row.largest_component) == (
            0.0, 0.0, 1, 1)
        assert row.small_world is None


class TestOracleEquivalence:
    def test_random_graphs_match_oracles(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(1, 13))
            edges = random_graph(n, rng)
            g = snap(n, edges)
            assert abs(average_degree(g) - degree_oracle(n, edges)) <= 1e-12
            assert abs(average_clustering(g) - clustering_oracle(n, edges)) <= 1e-12
            assert abs(average_shortest_path_length(g) - aspl_oracle(n, edges)) <= 1e-12
            assert components(g) == components_oracle(n, edges)

    def test_small_world_matches_direct_formula(self):
        # same sampled references, independently coded C and L routines
        rng = np.random.default_rng(7)
        for seed in range(25):
            n = int(rng.integers(2, 13))
            edges = random_graph(n, rng)
            g = snap(n, edges)
            value = small_world_index(g, make_rng(seed, 0), n_ref=5)
            refs_rng = make_rng(seed, 0)
            refs = [sample_gnm(n, g.edge_count, refs_rng) for _ in range(5)]
            expected = small_world_oracle(n, edges, [(r.n, r.edges) for r in refs])
            if expected is None:
                assert value is None
            else:
                assert value == pytest.approx(expected, abs=1e-12)


class TestInvariants:
    def test_avg_degree_is_two_m_over_n(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = int(rng.integers(1, 15))
            g = snap(n, random_graph(n, rng))
            assert average_degree(g) == 2 * g.edge_count / n

    def test_clustering_in_unit_interval(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            g = snap(10, random_graph(10, rng))
            assert 0.0 <= average_clustering(g) <= 1.0

    def test_aspl_one_for_complete_graphs(self):
        # aspl averages connected pairs only, so any disjoint union of
        # cliques scores exactly 1; complete graphs always do
        from oracles import floyd_warshall_oracle

        for n in range(2, 8):
            assert average_shortest_path_length(complete(n)) == 1.0
        rng = np.random.default_rng(9)
        for _ in range(50):
            n = int(rng.integers(2, 10))
            edges = random_graph(n, rng)
            if average_shortest_path_length(snap(n, edges)) == 1.0:
                fw = floyd_warshall_oracle(n, edges)
                for i in range(n):
                    for j in range(i + 1, n):
                        assert fw[i][j] == 1 or fw[i][j] == np.inf

    def test_component_count_n_iff_edgeless(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            n = int(rng.integers(1, 10))
            g = snap(n, random_graph(n, rng))
            assert (components(g)[0] == n) == (g.edge_count == 0)

    def test_row_bounds(self):
        rng = np.random.default_rng(14)
        for seed in range(40):
            n = int(rng.integers(1, 14))
            row = metrics_snapshot(snap(n, random_graph(n, rng)), make_rng(seed, 0), n_ref=3)
            assert row.avg_degree <= n - 1 or n == 1
            assert row.largest_component <= n
            assert row.n_components + row.largest_component <= n + 1

    def test_pure_given_rng_state(self):
        g = snap(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5)])
        rows = [metrics_snapshot(g, make_rng(3, 1), n_ref=8) for _ in range(2)]
        assert rows[0] == rows[1]

    def test_relabelling_preserves_all_metrics(self):
        rng = np.random.default_rng(12)
        for seed in range(20):
            n = int(rng.integers(2, 11))
            edges = random_graph(n, rng)
            perm = rng.permutation(n)
            relabelled = {tuple(sorted((int(perm[i]), int(perm[j])))) for i, j in edges}
            a = metrics_snapshot(snap(n, edges), make_rng(seed, 0), n_ref=5)
            b = metrics_snapshot(snap(n, relabelled), make_rng(seed, 0), n_ref=5)
            assert a.avg_degree == b.avg_degree
            assert a.clustering == pytest.approx(b.clustering, abs=1e-12)
            assert a.aspl == pytest.approx(b.aspl, abs=1e-12)
            assert (a.n_components, a.largest_component) == (b.n_components, b.largest_component)
            if a.small_world is None:
                assert b.small_world is None
            else:
                assert a.small_world == pytest.approx(b.small_world, abs=1e-9)


class TestSampleGnm:
    def test_exact_edge_count_and_simple(self):
        rng = make_rng(5, 0)
        for m in (0, 1, 5, 10):
            g = sample_gnm(6, m, rng)
            assert g.edge_count == m
            assert not g.adj.diagonal().any()
            assert (g.adj == g.adj.T).all()

    def test_too_many_edges_rejected(self):
        with pytest.raises(ValueError):
            sample_gnm(4, 7, make_rng(1, 0))

    def test_rough_uniformity_over_pairs(self):
        rng = make_rng(9, 0)
        counts = np.zeros((5, 5))
        trials = 3000
        for _ in range(trials):
            counts += sample_gnm(5, 3, rng).adj
        frequency = counts[np.triu_indices(5, k=1)] / trials
        # each of the 10 pairs should be present in 3/10 of samples
        assert np.all(np.abs(frequency - 0.3) < 0.05)

    def test_snapshot_immutable(self):
        g = sample_gnm(5, 4, make_rng(2, 0))
        with pytest.raises(ValueError):
            g.adj[0, 1] = True
