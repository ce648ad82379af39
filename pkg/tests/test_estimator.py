import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import connected_graph
from graphgan import Graph, GraphGAN, TrainConfig, train
from graphgan.validation import check_graph, check_pairs, check_table, check_vertices

FAST = dict(dim=4, gen_samples=3, g_steps=2, d_steps=2, max_iterations=2)


class TestCheckGraph:
    def test_inputs_agree(self):
        g = connected_graph(15, 0.2, 0)
        nxg = nx.Graph()
        nxg.add_nodes_from(range(15))
        nxg.add_edges_from(g.edges().tolist())
        from_nx = check_graph(nxg)
        from_sparse = check_graph(g.to_scipy())
        from_array = check_graph(g.edges())
        for other in (from_nx, from_sparse, from_array):
            np.testing.assert_array_equal(other.indptr, g.indptr)
            np.testing.assert_array_equal(other.indices, g.indices)
        assert check_graph(g) is g

    def test_upper_triangular_sparse_is_symmetrised(self):
        m = sp.csr_matrix(([1, 1], ([0, 1], [1, 2])), shape=(3, 3))
        assert check_graph(m).edge_count == 2

    @pytest.mark.parametrize("bad", [np.zeros((3, 3)), np.array([[0.5, 1.0]]),
                                     sp.csr_matrix((2, 3))])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            check_graph(bad)

    def test_vertices_and_pairs(self):
        assert check_vertices(3, 5).tolist() == [3]
        with pytest.raises(IndexError):
            check_vertices([5], 5)
        with pytest.raises(ValueError):
            check_pairs([1, 2, 3], 5)
        with pytest.raises(ValueError):
            check_table(np.array([[np.inf]]))
        with pytest.raises(ValueError):
            check_table(np.zeros((2, 2)), n_vertices=3)


class TestGraphGAN:
    def test_params_round_trip(self):
        est = GraphGAN(dim=8, random_state=3)
        assert est.get_params()["dim"] == 8
        assert clone(est).get_params() == est.get_params()
        est.set_params(dim=5)
        assert est.dim == 5

    def test_fit_matches_train(self):
        g = connected_graph(20, 0.2, 1)
        est = GraphGAN(random_state=4, **FAST).fit(g)
        ref = train(g, TrainConfig(seed=4, **FAST))
        np.testing.assert_array_equal(est.embedding_, ref.generator)
        np.testing.assert_array_equal(est.discriminator_embeddings_, ref.discriminator)
        assert est.n_iter_ == len(ref.metrics)

    def test_transform_and_fit_transform(self):
        g = connected_graph(20, 0.2, 2)
        est = GraphGAN(**FAST)
        full = est.fit_transform(g)
        assert full.shape == (20, 4)
        np.testing.assert_array_equal(est.transform([3, 5]), full[[3, 5]])

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            GraphGAN().transform([0])

    def test_edge_proba_and_connectivity(self):
        g = connected_graph(12, 0.3, 3)
        est = GraphGAN(**FAST).fit(g.edges())
        p = est.edge_proba([(0, 1), (1, 0)])
        assert p[0] == p[1] and 0 < p[0] < 1
        dist = est.connectivity(0)
        assert dist[0] == 0 and abs(dist.sum() - 1) < 1e-12

    def test_invalid_params_raise_on_fit(self):
        with pytest.raises(ValueError):
            GraphGAN(dim=0).fit(Graph.from_edges([(0, 1)], 2))
