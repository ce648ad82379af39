"""Input coercion shared by the estimator and the evaluation helpers."""

import numpy as np
import scipy.sparse as sp

from .graph import Graph


def check_graph(X):
    """Coerce ``X`` into a :class:`Graph`.

    Accepts a Graph, a networkx graph, a square scipy sparse adjacency
    matrix, or an ``(E, 2)`` integer array of edges.
    """
    if isinstance(X, Graph):
        return X
    if hasattr(X, "nodes") and hasattr(X, "edges") and callable(X.edges):
        nodes = list(X.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        edges = np.array([(index[a], index[b]) for a, b in X.edges()], dtype=np.int64)
        return Graph.from_edges(edges.reshape(-1, 2), len(nodes), [str(n) for n in nodes])
    if sp.issparse(X):
        if X.shape[0] != X.shape[1]:
            raise ValueError("adjacency matrix must be square")
        coo = sp.triu(X + X.T, k=1).tocoo()
        return Graph.from_edges(np.column_stack([coo.row, coo.col]), X.shape[0])
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (E, 2) edge array, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("edge array must hold integer vertex indices")
    return Graph.from_edges(arr)


def check_vertices(X, n_vertices):
    v = np.asarray(X)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or (v.size and not np.issubdtype(v.dtype, np.integer)):
        raise ValueError("expected a 1-D array of vertex indices")
    if v.size and (v.min() < 0 or v.max() >= n_vertices):
        raise IndexError(f"vertex index out of range [0, {n_vertices})")
    return v.astype(np.int64)


def check_pairs(X, n_vertices):
    p = np.asarray(X)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of vertex pairs, got shape {p.shape}")
    return check_vertices(p.reshape(-1), n_vertices).reshape(-1, 2)


def check_table(table, n_vertices=None):
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2:
        raise ValueError("embedding table must be 2-D")
    if n_vertices is not None and t.shape[0] != n_vertices:
        raise ValueError(f"embedding table has {t.shape[0]} rows, graph has {n_vertices} vertices")
    if not np.all(np.isfinite(t)):
        raise ValueError("embedding table contains non-finite values")
    return t
