"""Undirected simple graphs, BFS-trees and BFS forests.

Vertices carry arbitrary string labels and are stored under dense indices
``0..V-1`` assigned in first-appearance order. Adjacency is kept in CSR form
with every neighbour list sorted ascending, which also fixes the BFS
expansion order and therefore makes every tree reproducible.
"""

import io
import os
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .exceptions import GraphFormatError, NotInComponentError

ROOT = _kernels.ROOT
UNREACHED = _kernels.UNREACHED


class Graph:
    """Immutable undirected graph without self-loops or multi-edges.

    Parameters
    ----------
    indptr, indices : ndarray
        CSR adjacency; ``indices[indptr[v]:indptr[v + 1]]`` are the sorted
        neighbours of ``v``. Use :meth:`from_edges` rather than building the
        arrays by hand.
    labels : sequence of str, optional
        External label of each vertex. Defaults to ``str(index)``.
    """

    def __init__(self, indptr, indices, labels=None):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        n = self.indptr.shape[0] - 1
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} vertices")
        self.labels = list(labels)
        self.index = {label: i for i, label in enumerate(self.labels)}
        if len(self.index) != n:
            raise ValueError("vertex labels must be unique")

    @classmethod
    def from_edges(cls, edges, n_vertices=None, labels=None):
        """Build a graph from an ``(E, 2)`` array of vertex indices.

        Self-loops are dropped and duplicates (in either orientation)
        collapsed.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n_vertices is None:
            n_vertices = len(labels) if labels is not None else (
                int(edges.max()) + 1 if edges.size else 0)
        if edges.size and (edges.min() < 0 or edges.max() >= n_vertices):
            raise ValueError("edge endpoint out of range")
        edges = edges[edges[:, 0] != edges[:, 1]]
        both = np.concatenate([edges, edges[:, ::-1]])
        adj = sp.coo_matrix(
            (np.ones(len(both), dtype=np.int8), (both[:, 0], both[:, 1])),
            shape=(n_vertices, n_vertices)).tocsr()
        adj.sum_duplicates()
        adj.sort_indices()
        return cls(adj.indptr, adj.indices, labels)

    @property
    def vertex_count(self):
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self):
        return self.indices.shape[0] // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def adjacency(self):
        """Per-vertex sorted neighbour arrays."""
        return [self.neighbors(v) for v in range(self.vertex_count)]

    @property
    def id_map(self):
        return dict(self.index)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u, v):
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.shape[0] and nbrs[i] == v)

    def edges(self):
        """``(E, 2)`` array of edges with ``u < v``, in CSR order."""
        rows = np.repeat(np.arange(self.vertex_count), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def without_edges(self, edges):
        """Copy of the graph with the given edges removed (vertices kept)."""
        drop = {(min(u, v), max(u, v)) for u, v in np.asarray(edges).reshape(-1, 2).tolist()}
        keep = [e for e in self.edges().tolist() if tuple(e) not in drop]
        return Graph.from_edges(np.array(keep, dtype=np.int64).reshape(-1, 2),
                                self.vertex_count, self.labels)

    def to_scipy(self):
        data = np.ones(self.indices.shape[0], dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr),
                             shape=(self.vertex_count, self.vertex_count))

    def vertex(self, label_or_index):
        """Resolve a label (or pass through an index) to a dense index."""
        if isinstance(label_or_index, (int, np.integer)):
            return int(label_or_index)
        return self.index[label_or_index]

    def __repr__(self):
        return f"Graph(V={self.vertex_count}, E={self.edge_count})"


def load_edge_list(source, min_rating=None, delimiter=None, comment="#",
                   extra_columns="error"):
    """Parse an edge list into a :class:`Graph`.

    Each non-empty, non-comment line holds two vertex labels and optionally
    a numeric weight. When ``min_rating`` is given the weight is required
    and lines rated below it are skipped.

    Parameters
    ----------
    source : str, path or file-like
        Path to a UTF-8 text file, or an open text stream.
    min_rating : float, optional
        Keep only lines whose weight is at least this value.
    delimiter : str, optional
        Field separator; whitespace by default (``"::"`` for MovieLens).
    extra_columns : {"error", "ignore"}
        What to do with fields beyond the weight, e.g. timestamps.
    """
    labels = OrderedDict()
    pairs = []
    with _open_text(source) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(comment):
                continue
            parts = line.split(delimiter)
            if len(parts) < 2:
                raise GraphFormatError("expected at least two vertex labels", lineno)
            if len(parts) > 3 and extra_columns != "ignore":
                raise GraphFormatError(f"expected at most 3 fields, got {len(parts)}", lineno)
            weight = None
            if len(parts) >= 3:
                try:
                    weight = float(parts[2])
                except ValueError:
                    raise GraphFormatError(f"non-numeric weight {parts[2]!r}", lineno) from None
            if min_rating is not None:
                if weight is None:
                    raise GraphFormatError("rating column required with a rating threshold", lineno)
                if weight < min_rating:
                    continue
            a, b = parts[0], parts[1]
            ia = labels.setdefault(a, len(labels))
            ib = labels.setdefault(b, len(labels))
            pairs.append((ia, ib))
    graph = Graph.from_edges(np.array(pairs, dtype=np.int64).reshape(-1, 2),
                             len(labels), list(labels))
    if graph.edge_count == 0:
        raise GraphFormatError("edge list contains no edges")
    return graph


def load_bipartite_edge_list(source, min_rating=None, delimiter=None,
                             extra_columns="error", prefixes=("u:", "i:")):
    """Parse a user-item rating file into a bipartite graph.

    Left-column labels are prefixed with ``prefixes[0]`` and right-column
    labels with ``prefixes[1]`` so that numeric user and item ids cannot
    collide. Returns the graph and the set of user vertex indices.
    """
    text = io.StringIO()
    with _open_text(source) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter)
            if len(parts) >= 2:
                parts[0] = prefixes[0] + parts[0]
                parts[1] = prefixes[1] + parts[1]
            text.write(" ".join(parts) + "\n")
    text.seek(0)
    graph = load_edge_list(text, min_rating=min_rating, extra_columns=extra_columns)
    users = frozenset(i for i, lab in enumerate(graph.labels) if lab.startswith(prefixes[0]))
    return graph, users


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    return _NoClose(source)


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        return False


@dataclass(frozen=True)
class TreePath:
    """Root-to-target path in a BFS-tree."""

    vertices: tuple

    @property
    def length(self):
        return len(self.vertices) - 1


@dataclass(frozen=True, eq=False)
class BfsTree:
    """Shortest-path tree rooted at ``root``.

    ``parent[v]`` is ``ROOT`` for the root and ``UNREACHED`` outside the
    root's component; ``depth[v]`` is -1 for unreachable vertices.
    """

    root: int
    parent: np.ndarray
    depth: np.ndarray
    children: list = field(repr=False)

    @classmethod
    def from_parent(cls, root, parent, depth):
        parent = np.asarray(parent, dtype=np.int32)
        depth = np.asarray(depth, dtype=np.int32)
        children = [[] for _ in range(parent.shape[0])]
        for v in np.flatnonzero(parent >= 0).tolist():
            children[parent[v]].append(v)
        parent.setflags(write=False)
        depth.setflags(write=False)
        return cls(int(root), parent, depth, children)

    @property
    def vertex_count(self):
        return self.parent.shape[0]

    @property
    def height(self):
        return int(self.depth.max())

    def reachable(self, v):
        return self.depth[v] >= 0

    def reachable_vertices(self):
        return np.flatnonzero(self.depth >= 0)

    def tree_neighbors(self, v):
        """Parent and children of ``v``, ascending by index."""
        nbrs = list(self.children[v])
        p = self.parent[v]
        if p >= 0:
            nbrs.append(int(p))
        return np.array(sorted(nbrs), dtype=np.int64)

    def parent_row(self):
        return np.asarray(self.parent)


def bfs_tree(graph, root):
    """BFS-tree of ``graph`` rooted at ``root``, expanding neighbours in
    ascending index order."""
    root = graph.vertex(root)
    _check_vertex(graph, root)
    blocked = np.zeros(graph.vertex_count, dtype=np.bool_)
    parent, depth = _kernels.bfs(graph.indptr, graph.indices, root, blocked, -1, -1)
    return BfsTree.from_parent(root, parent, depth)


def path_to(tree, target):
    """Unique tree path from the root to ``target``."""
    target = int(target)
    if target == tree.root:
        raise ValueError("target equals the tree root")
    if not tree.reachable(target):
        raise NotInComponentError(f"vertex {target} is not in the component of root {tree.root}")
    path = [target]
    v = target
    while v != tree.root:
        v = int(tree.parent[v])
        path.append(v)
    return TreePath(tuple(reversed(path)))


def shortest_distance(graph, u, v):
    """Unweighted shortest-path length, or ``None`` if disconnected."""
    u, v = graph.vertex(u), graph.vertex(v)
    _check_vertex(graph, u)
    _check_vertex(graph, v)
    if u == v:
        return 0
    blocked = np.zeros(graph.vertex_count, dtype=np.bool_)
    _, depth = _kernels.bfs(graph.indptr, graph.indices, u, blocked, -1, -1)
    return int(depth[v]) if depth[v] >= 0 else None


def _check_vertex(graph, v):
    if not 0 <= v < graph.vertex_count:
        raise IndexError(f"vertex {v} out of range for {graph!r}")


def _check_bipartite(graph, users):
    mask = np.zeros(graph.vertex_count, dtype=bool)
    mask[list(users)] = True
    e = graph.edges()
    if e.size and np.any(mask[e[:, 0]] == mask[e[:, 1]]):
        raise ValueError("graph is not bipartite between users and items")
    return mask


def shortcut_graph(graph, users):
    """Derived graph for shortcut trees: all user-item edges plus an
    item-item edge for every pair of items rated by a common user."""
    mask = _check_bipartite(graph, users)
    adj = graph.to_scipy().astype(np.int32)
    items = np.flatnonzero(~mask)
    user_idx = np.flatnonzero(mask)
    ui = adj[user_idx][:, items]
    co = (ui.T @ ui).tocoo()
    keep = co.row != co.col
    item_edges = np.column_stack([items[co.row[keep]], items[co.col[keep]]])
    edges = np.concatenate([graph.edges(), item_edges])
    return Graph.from_edges(edges, graph.vertex_count, graph.labels), mask


def shortcut_bipartite_tree(graph, user_root, user_set):
    """BFS-tree for a user whose non-root vertices are all items.

    Other users are bypassed: items co-rated by some user are joined
    directly, so the tree only covers ``user_root`` and reachable items.
    """
    user_root = graph.vertex(user_root)
    if user_root not in user_set:
        raise ValueError("root must be a user vertex")
    derived, mask = shortcut_graph(graph, user_set)
    parent, depth = _kernels.bfs(derived.indptr, derived.indices, user_root, mask, -1, -1)
    return BfsTree.from_parent(user_root, parent, depth)


class BfsForest:
    """BFS-trees for a set of roots, stored as parent rows.

    Eager mode keeps a ``len(roots) x V`` int32 matrix. With ``lazy=True``
    rows are rebuilt on demand and at most ``cache_size`` are retained.

    Parameters
    ----------
    graph : Graph
        Graph the trees are grown on (the shortcut graph for
        recommendation).
    roots : array-like of int, optional
        Defaults to every vertex.
    blocked : ndarray of bool, optional
        Vertices BFS may not enter unless they are the root.
    threads : int, optional
        Worker threads for eager construction.
    """

    def __init__(self, graph, roots=None, blocked=None, lazy=False,
                 cache_size=1024, threads=None):
        self.graph = graph
        self.roots = (np.arange(graph.vertex_count, dtype=np.int64) if roots is None
                      else np.asarray(roots, dtype=np.int64))
        self._slot = {int(r): i for i, r in enumerate(self.roots)}
        self.blocked = (np.zeros(graph.vertex_count, dtype=np.bool_) if blocked is None
                        else np.asarray(blocked, dtype=np.bool_))
        self.lazy = lazy
        self.cache_size = cache_size
        self._cache = OrderedDict()
        self.heights = np.empty(len(self.roots), dtype=np.int64)
        self.parents = None
        if lazy:
            for i, r in enumerate(self.roots):
                self.heights[i] = self._build(r)[1].max()
            self._cache.clear()
        else:
            self.parents = np.empty((len(self.roots), graph.vertex_count), dtype=np.int32)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for i, (parent, depth) in enumerate(pool.map(self._build, self.roots)):
                    self.parents[i] = parent
                    self.heights[i] = depth.max()
            self.parents.setflags(write=False)

    @classmethod
    def for_shortcut(cls, graph, users, **kwargs):
        """Forest of shortcut trees, one per user."""
        derived, mask = shortcut_graph(graph, users)
        return cls(derived, roots=sorted(users), blocked=mask, **kwargs)

    def _build(self, root):
        return _kernels.bfs(self.graph.indptr, self.graph.indices, int(root),
                            self.blocked, -1, -1)

    def parent_row(self, root):
        i = self._slot[int(root)]
        if not self.lazy:
            return self.parents[i]
        row = self._cache.get(i)
        if row is None:
            row = self._build(self.roots[i])[0]
            self._cache[i] = row
            if len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(i)
        return row

    def blocks(self, block_size=None):
        """Yield ``(roots, parent_rows, heights)`` chunks for the kernels."""
        n = len(self.roots)
        if not self.lazy and block_size is None:
            yield self.roots, self.parents, self.heights
            return
        size = block_size or self.cache_size
        for start in range(0, n, size):
            sl = slice(start, min(n, start + size))
            rows = np.stack([self.parent_row(r) for r in self.roots[sl]])
            yield self.roots[sl], rows, self.heights[sl]

    def tree(self, root):
        """Full :class:`BfsTree` view of one root."""
        parent, depth = self._build(root)
        return BfsTree.from_parent(int(root), parent, depth)

    def __len__(self):
        return len(self.roots)
