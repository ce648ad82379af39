"""Graph representation learning with a graph-softmax generator and a
sigmoid discriminator trained as a minimax game."""

__version__ = "0.1.0"

from .discriminator import LabeledPair, d_score, discriminator_step, log_likelihood, pair_gradient
from .estimator import GraphGAN
from .exceptions import (GraphFormatError, IsolatedRootError, NonFiniteUpdateError,
                         NotInComponentError, SamplingError)
from .generator import (RelevanceDistribution, RowGradient, SampleTrace, connectivity_distribution,
                        generator_step, graph_softmax, log_graph_softmax_grad, policy_weight,
                        relevance_distribution, sample_online)
from .graph import (BfsForest, BfsTree, Graph, TreePath, bfs_tree, load_bipartite_edge_list,
                    load_edge_list, path_to, shortcut_bipartite_tree, shortcut_graph,
                    shortest_distance)
from .params import export_embeddings, import_embeddings, init_table, pretrain_table
from .trainer import MetricsRecord, TrainConfig, TrainResult, read_metrics_csv, train, write_metrics_csv

__all__ = [
    "BfsForest", "BfsTree", "Graph", "GraphFormatError", "GraphGAN", "IsolatedRootError",
    "LabeledPair", "MetricsRecord", "NonFiniteUpdateError", "NotInComponentError",
    "RelevanceDistribution", "RowGradient", "SampleTrace", "SamplingError", "TrainConfig",
    "TrainResult", "TreePath", "bfs_tree", "connectivity_distribution", "d_score",
    "discriminator_step", "export_embeddings", "generator_step", "graph_softmax",
    "import_embeddings", "init_table", "load_bipartite_edge_list", "load_edge_list",
    "log_graph_softmax_grad", "log_likelihood", "pair_gradient", "path_to", "policy_weight",
    "pretrain_table", "read_metrics_csv", "relevance_distribution", "sample_online",
    "shortcut_bipartite_tree", "shortcut_graph", "shortest_distance", "train",
    "write_metrics_csv",
]
