"""Graph softmax generator.

The connectivity distribution of a root ``c`` is defined on its BFS-tree:
a walk from ``c`` moves to a tree neighbour chosen by a softmax over inner
products of generator vectors, and the vertex at which the walk first turns
back toward the root is emitted. ``graph_softmax`` evaluates that
probability in closed form along the root-to-target path,
``sample_online`` draws from it, and ``log_graph_softmax_grad`` gives the
score-function gradient used by the policy-gradient update.

These functions are the readable reference path. Training runs the same
arithmetic through the compiled kernels in :mod:`graphgan._kernels`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import IsolatedRootError, NonFiniteUpdateError, NotInComponentError, SamplingError
from .graph import TreePath, path_to

D_CLAMP = 1e-10


@dataclass(frozen=True)
class RelevanceDistribution:
    """Softmax over the tree neighbours of ``center``."""

    center: int
    support: np.ndarray
    probs: np.ndarray

    def prob(self, v):
        i = np.searchsorted(self.support, v)
        if i >= self.support.shape[0] or self.support[i] != v:
            raise KeyError(v)
        return float(self.probs[i])


@dataclass(frozen=True)
class SampleTrace:
    """One draw of the online walk: the sample, its path and touched set."""

    tree: object
    sampled: int
    path: TreePath
    touched: frozenset

    @property
    def root(self):
        return self.tree.root


@dataclass(frozen=True)
class RowGradient:
    """Gradient restricted to the embedding rows it touches."""

    rows: np.ndarray
    values: np.ndarray

    def to_dense(self, n_vertices):
        out = np.zeros((n_vertices, self.values.shape[1]))
        out[self.rows] = self.values
        return out


def _softmax(scores):
    z = np.exp(scores - scores.max())
    return z / z.sum()


def relevance_distribution(tree, v, theta_g):
    if not tree.reachable(v):
        raise NotInComponentError(f"vertex {v} not reachable from root {tree.root}")
    support = tree.tree_neighbors(v)
    if support.size == 0:
        raise IsolatedRootError(f"vertex {v} has no tree neighbours")
    probs = _softmax(theta_g[support] @ theta_g[v])
    return RelevanceDistribution(int(v), support, probs)


def _path_factors(path):
    """(center, chosen) pairs whose relevance probabilities make up G."""
    vs = path.vertices
    steps = list(zip(vs[:-1], vs[1:]))
    steps.append((vs[-1], vs[-2]))
    return steps


def graph_softmax(tree, target, theta_g, return_touched=False):
    """Probability that the generator of ``tree.root`` emits ``target``.

    The product of ``m + 1`` relevance probabilities: one per edge walked
    down the path of length ``m``, and the final turn back to the parent.
    """
    path = path_to(tree, target)
    prob = 1.0
    touched = set(path.vertices)
    for center, chosen in _path_factors(path):
        dist = relevance_distribution(tree, center, theta_g)
        prob *= dist.prob(chosen)
        touched.update(dist.support.tolist())
    if return_touched:
        return prob, frozenset(touched)
    return prob


def connectivity_distribution(tree, theta_g):
    """``G(v | root)`` for every vertex at once (0 for root/unreachable).

    Walks the tree top-down carrying the product of the downward factors,
    so the cost is one relevance softmax per reachable vertex.
    """
    n = tree.vertex_count
    out = np.zeros(n)
    prefix = np.zeros(n)
    prefix[tree.root] = 1.0
    order = tree.reachable_vertices()
    order = order[np.argsort(tree.depth[order], kind="stable")]
    for v in order.tolist():
        support = tree.tree_neighbors(v)
        if support.size == 0:
            continue
        probs = _softmax(theta_g[support] @ theta_g[v])
        p = tree.parent[v]
        for u, pu in zip(support.tolist(), probs.tolist()):
            if u == p:
                out[v] = prefix[v] * pu
            else:
                prefix[u] = prefix[v] * pu
    return out


def log_graph_softmax_grad(tree, target, theta_g):
    """Gradient of ``log G(target | root)`` w.r.t. the generator table.

    For each factor ``p(chosen | center)`` the log-softmax derivative is
    ``(1[u = chosen] - p_u) g_center`` for each tree neighbour ``u`` and
    ``g_chosen - sum_u p_u g_u`` for the center itself.
    """
    path = path_to(tree, target)
    acc = {}
    k = theta_g.shape[1]

    def add(row, vec):
        if row in acc:
            acc[row] += vec
        else:
            acc[row] = np.array(vec, dtype=np.float64)

    for center, chosen in _path_factors(path):
        dist = relevance_distribution(tree, center, theta_g)
        g_center = theta_g[center]
        onehot = (dist.support == chosen).astype(np.float64)
        coefs = onehot - dist.probs
        for u, c in zip(dist.support.tolist(), coefs.tolist()):
            add(u, c * g_center)
        add(center, theta_g[chosen] - dist.probs @ theta_g[dist.support])
    rows = np.array(sorted(acc), dtype=np.int64)
    values = np.array([acc[r] for r in rows.tolist()]).reshape(-1, k)
    return RowGradient(rows, values)


def sample_online(tree, theta_g, rng=None, max_steps=None):
    """Draw one vertex from the generator of ``tree.root`` by a tree walk.

    The walk starts at the root and moves to a tree neighbour with the
    relevance probabilities; the first time it picks the parent of the
    current vertex, the current vertex is returned.
    """
    rng = np.random.default_rng(rng)
    if max_steps is None:
        max_steps = 4 * tree.height + 8
    root = tree.root
    pre = cur = root
    vertices = [root]
    touched = {root}
    steps = 0
    while True:
        dist = relevance_distribution(tree, cur, theta_g)
        touched.update(dist.support.tolist())
        cum = np.cumsum(dist.probs)
        i = min(int(np.searchsorted(cum, rng.random(), side="right")), len(cum) - 1)
        picked = int(dist.support[i])
        steps += 1
        if picked == pre and cur != root:
            return SampleTrace(tree, cur, TreePath(tuple(vertices)), frozenset(touched))
        if steps > max_steps:
            raise SamplingError(f"walk from root {root} exceeded {max_steps} steps")
        pre, cur = cur, picked
        vertices.append(cur)


def policy_weight(v, root, theta_d):
    """``log(1 - D(v, root))`` with D clamped below 1."""
    score = min(float(expit(theta_d[v] @ theta_d[root])), 1.0 - D_CLAMP)
    return float(np.log(1.0 - score))


def generator_step(traces, theta_g, theta_d, learning_rate):
    """One policy-gradient descent step; returns the updated table.

    Contributions of all traces are summed against the incoming parameters
    and applied once.
    """
    grad = np.zeros_like(theta_g, dtype=np.float64)
    for trace in traces:
        weight = policy_weight(trace.sampled, trace.root, theta_d)
        g = log_graph_softmax_grad(trace.tree, trace.sampled, theta_g)
        grad[g.rows] += weight * g.values
    updated = theta_g - learning_rate * grad
    if not np.all(np.isfinite(updated)):
        raise NonFiniteUpdateError("generator step produced non-finite parameters")
    return updated
