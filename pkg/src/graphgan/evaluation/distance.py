"""Edge probability as a function of shortest distance.

For sampled vertex pairs the edge between them, if any, is removed before
measuring their distance, so an existing edge is scored by how far apart
its endpoints are without it. Pairs that end up disconnected are dropped.
"""

from dataclasses import dataclass

import numpy as np

from .. import _kernels


@dataclass
class DistanceStudy:
    table: list
    slope: float = None
    intercept: float = None
    r_squared: float = None
    fitted_buckets: tuple = ()

    @property
    def degenerate(self):
        return self.slope is None


def _pair_distances(graph, pairs):
    """Distance of each pair with its own edge (if present) removed."""
    out = np.full(len(pairs), -1, dtype=np.int64)
    is_edge = np.array([graph.has_edge(u, v) for u, v in pairs.tolist()], dtype=bool)
    blocked = np.zeros(graph.vertex_count, dtype=np.bool_)
    order = np.argsort(pairs[:, 0], kind="stable")
    src = pairs[order, 0]
    bounds = np.flatnonzero(np.diff(src)) + 1
    for chunk in np.split(order, bounds):
        u = int(pairs[chunk[0], 0])
        plain = chunk[~is_edge[chunk]]
        if plain.size:
            _, depth = _kernels.bfs(graph.indptr, graph.indices, u, blocked, -1, -1)
            out[plain] = depth[pairs[plain, 1]]
        for i in chunk[is_edge[chunk]].tolist():
            v = int(pairs[i, 1])
            _, depth = _kernels.bfs(graph.indptr, graph.indices, u, blocked, u, v)
            out[i] = depth[v]
    return out, is_edge


def distance_study(graph, num_pairs=None, seed=0, min_bucket=100):
    """Bucket pairs by distance and fit a line to log edge probability.

    Parameters
    ----------
    num_pairs : int, optional
        Pairs drawn uniformly (distinct endpoints). ``None`` enumerates
        every unordered pair.
    min_bucket : int
        Buckets with fewer pairs are reported but left out of the fit.

    The fit uses natural log and only buckets containing at least one
    edge. With fewer than two such buckets the result is degenerate.
    """
    n = graph.vertex_count
    if num_pairs is None:
        iu, iv = np.triu_indices(n, k=1)
        pairs = np.column_stack([iu, iv]).astype(np.int64)
    else:
        if num_pairs < 1:
            raise ValueError("num_pairs must be >= 1")
        rng = np.random.default_rng(seed)
        pairs = rng.integers(0, n, size=(num_pairs, 2))
        clash = pairs[:, 0] == pairs[:, 1]
        while clash.any():
            pairs[clash, 1] = rng.integers(0, n, size=int(clash.sum()))
            clash = pairs[:, 0] == pairs[:, 1]
    dist, is_edge = _pair_distances(graph, pairs)
    keep = dist >= 0
    if not keep.any():
        raise ValueError("no sampled pair is connected")
    dist, is_edge = dist[keep], is_edge[keep]
    table = []
    for d in np.unique(dist).tolist():
        sel = dist == d
        count = int(sel.sum())
        edges = int(is_edge[sel].sum())
        prob = edges / count
        table.append({
            "distance": d,
            "pairs": count,
            "edges": edges,
            "edge_probability": prob,
            "log_probability": float(np.log(prob)) if edges else None,
        })
    usable = [r for r in table if r["edges"] > 0 and r["pairs"] >= min_bucket]
    result = DistanceStudy(table)
    if len(usable) < 2:
        return result
    x = np.array([r["distance"] for r in usable], dtype=float)
    y = np.array([r["log_probability"] for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    result.slope, result.intercept, result.r_squared = float(slope), float(intercept), r2
    result.fitted_buckets = tuple(int(v) for v in x)
    return result
