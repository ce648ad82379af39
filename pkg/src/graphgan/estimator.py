"""scikit-learn style front end to the adversarial trainer."""

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .generator import connectivity_distribution
from .graph import bfs_tree
from .trainer import TrainConfig, train
from .validation import check_graph, check_pairs, check_vertices


class GraphGAN(TransformerMixin, BaseEstimator):
    """Vertex embeddings from a graph-softmax generator trained against a
    sigmoid discriminator.

    ``fit`` takes a graph (see :func:`graphgan.validation.check_graph` for
    accepted inputs); ``transform`` maps vertex indices to their generator
    vectors.

    Parameters
    ----------
    dim : int
        Embedding dimension.
    gen_samples : int
        Vertices generated per root in each generator step.
    dis_samples : int or None
        Positive and negative pairs per root in each discriminator step;
        ``None`` uses ``min(degree, 20)``.
    learning_rate : float
    g_steps, d_steps : int
        Generator and discriminator steps per iteration.
    max_iterations : int
    pretrain_epochs : int
        Edge-reconstruction epochs applied to both tables before the game.
    tol, patience : float, int
        Stop once the value estimate changes by less than ``tol``
        (relative) for ``patience`` consecutive iterations.
    random_state : int or None
    block_size : int or None
        Build trees lazily and process roots in blocks of this size.

    Attributes
    ----------
    embedding_ : ndarray of shape (n_vertices, dim)
        Generator vectors, the learned representation.
    discriminator_embeddings_ : ndarray of shape (n_vertices, dim)
    metrics_ : list of MetricsRecord
    n_iter_ : int
    graph_ : Graph
    """

    def __init__(self, dim=20, gen_samples=20, dis_samples=None, learning_rate=1e-3,
                 g_steps=30, d_steps=30, max_iterations=20, pretrain_epochs=0, tol=1e-4,
                 patience=5, random_state=0, block_size=None):
        self.dim = dim
        self.gen_samples = gen_samples
        self.dis_samples = dis_samples
        self.learning_rate = learning_rate
        self.g_steps = g_steps
        self.d_steps = d_steps
        self.max_iterations = max_iterations
        self.pretrain_epochs = pretrain_epochs
        self.tol = tol
        self.patience = patience
        self.random_state = random_state
        self.block_size = block_size

    def _config(self):
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
        return TrainConfig(
            dim=self.dim, gen_samples=self.gen_samples, dis_samples=self.dis_samples,
            learning_rate=self.learning_rate, g_steps=self.g_steps, d_steps=self.d_steps,
            max_iterations=self.max_iterations, pretrain_epochs=self.pretrain_epochs,
            seed=seed, tol=self.tol, patience=self.patience, block_size=self.block_size)

    def fit(self, X, y=None, forest=None, callback=None):
        """Train on graph ``X``; ``forest`` overrides the BFS-trees."""
        graph = check_graph(X)
        result = train(graph, self._config(), forest=forest, callback=callback)
        self.graph_ = graph
        self.embedding_ = result.generator
        self.discriminator_embeddings_ = result.discriminator
        self.metrics_ = result.metrics
        self.n_iter_ = len(result.metrics)
        return self

    @property
    def generator_embeddings_(self):
        return self.embedding_

    def transform(self, X):
        check_is_fitted(self, "embedding_")
        return self.embedding_[check_vertices(X, self.embedding_.shape[0])]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).embedding_.copy()

    def edge_proba(self, pairs):
        """Discriminator edge probability for each ``(u, v)`` row."""
        check_is_fitted(self, "discriminator_embeddings_")
        p = check_pairs(pairs, self.discriminator_embeddings_.shape[0])
        d = self.discriminator_embeddings_
        return expit(np.einsum("ij,ij->i", d[p[:, 0]], d[p[:, 1]]))

    def connectivity(self, root):
        """Generator distribution ``G(. | root)`` over all vertices."""
        check_is_fitted(self, "embedding_")
        return connectivity_distribution(bfs_tree(self.graph_, root), self.embedding_)
