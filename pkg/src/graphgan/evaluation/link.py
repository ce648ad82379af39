"""Link prediction: edge hold-out split and Hadamard-feature classifier."""

import math
from dataclasses import dataclass

import numpy as np

from .logistic import LogisticRegression
from .metrics import accuracy, binary_macro_f1


@dataclass(frozen=True)
class LinkSplit:
    """Training graph plus a balanced test set of hidden edges and non-edges."""

    train_graph: object
    test_positives: np.ndarray
    test_negatives: np.ndarray

    def check_disjoint(self):
        for u, v in self.test_positives.tolist():
            if self.train_graph.has_edge(u, v):
                raise ValueError(f"hidden edge ({u}, {v}) is still in the training graph")


def holdout_count(n_edges, fraction):
    """Round-half-up share of the edges."""
    return int(math.floor(n_edges * fraction + 0.5))


def sample_non_edges(graph, count, rng, exclude=(), max_tries=None):
    """``count`` distinct unordered vertex pairs that are not edges.

    Pairs in ``exclude`` are never returned. Raises ``ValueError`` when the
    graph is too dense to supply them.
    """
    n = graph.vertex_count
    seen = {(min(u, v), max(u, v)) for u, v in exclude}
    available = n * (n - 1) // 2 - graph.edge_count - len(seen)
    if count > available:
        raise ValueError(f"graph too dense: need {count} non-edges, only {available} exist")
    out = []
    tries = 0
    max_tries = max_tries or 1000 * (count + 10)
    while len(out) < count:
        batch = rng.integers(0, n, size=(2 * (count - len(out)) + 16, 2))
        for u, v in batch.tolist():
            tries += 1
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            if key in seen or graph.has_edge(u, v):
                continue
            seen.add(key)
            out.append(key)
            if len(out) == count:
                break
        if tries > max_tries:
            raise ValueError("could not find enough non-edges by rejection sampling")
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def split_edges(graph, holdout_fraction=0.1, seed=0):
    """Hide a random share of edges and draw as many non-edges for testing."""
    if not 0 < holdout_fraction < 1:
        raise ValueError("holdout_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    edges = graph.edges()
    n_hide = holdout_count(len(edges), holdout_fraction)
    hidden = edges[np.sort(rng.permutation(len(edges))[:n_hide])]
    negatives = sample_non_edges(graph, n_hide, rng)
    return LinkSplit(graph.without_edges(hidden), hidden, negatives)


def hadamard(embeddings, pairs):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return embeddings[pairs[:, 0]] * embeddings[pairs[:, 1]]


def link_prediction_eval(embeddings, split, seed=0, epochs=1000, learning_rate=0.5):
    """Accuracy and macro-F1 of a logistic model on Hadamard edge features.

    The classifier is fit on every training-graph edge against as many
    sampled training-graph non-edges (test pairs excluded), then scored on
    the split's test pairs at threshold 0.5.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.shape[0] != split.train_graph.vertex_count:
        raise ValueError("embeddings must have one row per vertex")
    split.check_disjoint()
    rng = np.random.default_rng(seed)
    pos = split.train_graph.edges()
    exclude = np.concatenate([split.test_positives, split.test_negatives]).tolist()
    neg = sample_non_edges(split.train_graph, len(pos), rng, exclude=exclude)
    X = np.concatenate([hadamard(embeddings, pos), hadamard(embeddings, neg)])
    y = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    clf = LogisticRegression(epochs=epochs, learning_rate=learning_rate).fit(X, y)
    X_test = np.concatenate([hadamard(embeddings, split.test_positives),
                             hadamard(embeddings, split.test_negatives)])
    y_test = np.concatenate([np.ones(len(split.test_positives)), np.zeros(len(split.test_negatives))])
    pred = clf.predict(X_test)
    return {"accuracy": accuracy(y_test, pred), "macro_f1": binary_macro_f1(y_test, pred)}
