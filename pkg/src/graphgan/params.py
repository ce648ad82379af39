"""Embedding tables: initialisation, optional pre-training and text I/O.

A table is a plain ``(V, k)`` float64 ndarray; row ``v`` is the vector of
vertex ``v``.
"""

import os

import numpy as np

from .exceptions import GraphFormatError, NonFiniteUpdateError


def init_table(n_vertices, dim, seed):
    """Entries i.i.d. uniform on ``[-0.5/dim, 0.5/dim]``."""
    if n_vertices < 1 or dim < 1:
        raise ValueError("need at least one vertex and one dimension")
    rng = np.random.default_rng(seed)
    bound = 0.5 / dim
    return rng.uniform(-bound, bound, size=(n_vertices, dim))


def check_finite(table, context=""):
    if not np.all(np.isfinite(table)):
        bad = np.argwhere(~np.isfinite(table))[0]
        raise NonFiniteUpdateError(
            f"non-finite value at row {bad[0]}, column {bad[1]}" + (f" ({context})" if context else ""))


def pretrain_table(table, graph, epochs, learning_rate, rng):
    """Fit ``sigmoid(x_u . x_v)`` to 1 on edges and 0 on random non-edges.

    Each epoch is one batched ascent step over every edge and an equal
    number of uniformly drawn non-adjacent pairs. Returns a new table.
    """
    from .discriminator import pair_gradient

    table = np.array(table, dtype=np.float64)
    edges = graph.edges()
    if epochs <= 0 or edges.size == 0:
        return table
    for epoch in range(epochs):
        neg = _sample_non_edges(graph, len(edges), rng)
        v = np.concatenate([edges[:, 0], neg[:, 0]])
        vc = np.concatenate([edges[:, 1], neg[:, 1]])
        labels = np.concatenate([np.ones(len(edges), np.int8), np.zeros(len(neg), np.int8)])
        grad, _ = pair_gradient(table, v, vc, labels)
        table += learning_rate * grad
        check_finite(table, f"pre-training epoch {epoch}")
    return table


def _sample_non_edges(graph, count, rng, max_rounds=100):
    n = graph.vertex_count
    out = []
    for _ in range(max_rounds):
        need = count - len(out)
        if need <= 0:
            break
        cand = rng.integers(0, n, size=(2 * need + 8, 2))
        for u, v in cand.tolist():
            if u != v and not graph.has_edge(u, v):
                out.append((u, v))
                if len(out) == count:
                    break
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _fmt(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def export_embeddings(table, labels, sink):
    """Write ``V k`` then ``<label> <f_1> ... <f_k>`` per vertex.

    Values use the shortest repr that round-trips exactly.
    """
    table = np.asarray(table, dtype=np.float64)
    check_finite(table, "export")
    if len(labels) != table.shape[0]:
        raise ValueError("one label per row required")
    lines = [f"{table.shape[0]} {table.shape[1]}"]
    for label, row in zip(labels, table.tolist()):
        lines.append(" ".join([str(label)] + [_fmt(x) for x in row]))
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sink.write(text)


def import_embeddings(source):
    """Inverse of :func:`export_embeddings`; returns ``(table, labels)``."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise GraphFormatError("empty embedding file")
    try:
        n, k = (int(x) for x in lines[0].split())
    except ValueError:
        raise GraphFormatError("header must be '<V> <k>'", 1) from None
    if len(lines) - 1 != n:
        raise GraphFormatError(f"header declares {n} rows, found {len(lines) - 1}")
    table = np.empty((n, k))
    labels = []
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != k + 1:
            raise GraphFormatError(f"expected {k} values, got {len(parts) - 1}", i + 2)
        labels.append(parts[0])
        table[i] = [float(x) for x in parts[1:]]
    return table, labels
