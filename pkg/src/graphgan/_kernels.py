"""Compiled inner loops for BFS, tree walks and the two gradient passes.

Trees are passed as parent rows over the vertex index space: ``ROOT`` marks
the root, ``UNREACHED`` marks vertices outside the root's component. The
tree neighbours of ``v`` are recovered from the adjacency of the graph the
tree was built on, keeping only ``parent[v]`` and the ``u`` with
``parent[u] == v``; this yields them in ascending index order, the same
order :meth:`graphgan.graph.BfsTree.tree_neighbors` uses.
"""

import math

import numpy as np
from numba import njit

ROOT = -1
UNREACHED = -2

# walk status codes
WALK_ISOLATED = -2
WALK_CAPPED = -1

D_CLAMP = 1e-10


@njit(cache=True, nogil=True)
def bfs(indptr, indices, root, blocked, skip_a, skip_b):
    n = indptr.shape[0] - 1
    parent = np.full(n, UNREACHED, np.int32)
    depth = np.full(n, -1, np.int32)
    queue = np.empty(n, np.int32)
    parent[root] = ROOT
    depth[root] = 0
    queue[0] = root
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if depth[u] >= 0 or blocked[u]:
                continue
            if (v == skip_a and u == skip_b) or (v == skip_b and u == skip_a):
                continue
            parent[u] = v
            depth[u] = depth[v] + 1
            queue[tail] = u
            tail += 1
    return parent, depth


@njit(cache=True)
def tree_neighbors(indptr, indices, parent_row, v, out):
    p = parent_row[v]
    count = 0
    for e in range(indptr[v], indptr[v + 1]):
        u = indices[e]
        if u == p or parent_row[u] == v:
            out[count] = u
            count += 1
    return count


@njit(cache=True)
def _dot(a, b):
    acc = 0.0
    for i in range(a.shape[0]):
        acc += a[i] * b[i]
    return acc


@njit(cache=True)
def relevance(emb, nbrs, n, v, probs):
    top = -np.inf
    for i in range(n):
        s = _dot(emb[nbrs[i]], emb[v])
        probs[i] = s
        if s > top:
            top = s
    total = 0.0
    for i in range(n):
        probs[i] = math.exp(probs[i] - top)
        total += probs[i]
    for i in range(n):
        probs[i] /= total


@njit(cache=True)
def choose(probs, n, u):
    acc = 0.0
    for i in range(n):
        acc += probs[i]
        if u < acc:
            return i
    return n - 1


@njit(cache=True)
def walk(indptr, indices, parent_row, root, emb, rng, cap, path, nbuf, pbuf):
    """Online generating walk; returns path length m, or a negative status."""
    pre = root
    cur = root
    path[0] = root
    m = 0
    steps = 0
    while True:
        n = tree_neighbors(indptr, indices, parent_row, cur, nbuf)
        if n == 0:
            return WALK_ISOLATED
        relevance(emb, nbuf, n, cur, pbuf)
        picked = nbuf[choose(pbuf, n, rng.random())]
        steps += 1
        if picked == pre and cur != root:
            return m
        if steps > cap:
            return WALK_CAPPED
        pre = cur
        cur = picked
        m += 1
        path[m] = cur


@njit(cache=True)
def _factor_grad(indptr, indices, parent_row, center, chosen, emb, weight,
                 grad, nbuf, pbuf):
    n = tree_neighbors(indptr, indices, parent_row, center, nbuf)
    relevance(emb, nbuf, n, center, pbuf)
    k = emb.shape[1]
    gc = emb[center]
    for i in range(n):
        u = nbuf[i]
        coef = -pbuf[i]
        if u == chosen:
            coef += 1.0
        coef *= weight
        for d in range(k):
            grad[u, d] += coef * gc[d]
            # d/dg_center of log p(chosen|center) = g_chosen - sum_j p_j g_j
            grad[center, d] -= weight * pbuf[i] * emb[u, d]
    for d in range(k):
        grad[center, d] += weight * emb[chosen, d]


@njit(cache=True)
def accumulate_log_grad(indptr, indices, parent_row, path, m, emb, weight,
                        grad, nbuf, pbuf):
    """grad += weight * d log G(path[m] | path[0]) / d emb."""
    for j in range(1, m + 1):
        _factor_grad(indptr, indices, parent_row, path[j - 1], path[j], emb,
                     weight, grad, nbuf, pbuf)
    _factor_grad(indptr, indices, parent_row, path[m], path[m - 1], emb,
                 weight, grad, nbuf, pbuf)


@njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@njit(cache=True)
def generator_pass(indptr, indices, parents, roots, heights, theta_g, theta_d,
                   n_samples, rng, grad, out_sampled, out_reward):
    """Draw ``n_samples`` walks per root and accumulate the weighted log-grads.

    ``out_sampled`` gets -1 for roots without tree neighbours. Returns -1 on
    success or the block index of a root whose walk hit the step cap.
    """
    n_vertices = theta_g.shape[0]
    path = np.empty(n_vertices, np.int64)
    nbuf = np.empty(n_vertices, np.int64)
    pbuf = np.empty(n_vertices, np.float64)
    for b in range(roots.shape[0]):
        root = roots[b]
        row = parents[b]
        cap = 4 * heights[b] + 8
        for j in range(n_samples):
            slot = b * n_samples + j
            m = walk(indptr, indices, row, root, theta_g, rng, cap, path, nbuf, pbuf)
            if m == WALK_ISOLATED:
                out_sampled[slot] = -1
                out_reward[slot] = 0.0
                continue
            if m == WALK_CAPPED:
                return b
            v = path[m]
            score = _sigmoid(_dot(theta_d[v], theta_d[root]))
            if score > 1.0 - D_CLAMP:
                score = 1.0 - D_CLAMP
            reward = math.log(1.0 - score)
            out_sampled[slot] = v
            out_reward[slot] = reward
            accumulate_log_grad(indptr, indices, row, path, m, theta_g, reward,
                                grad, nbuf, pbuf)
    return -1


@njit(cache=True)
def discriminator_samples(g_indptr, g_indices, t_indptr, t_indices, parents,
                          roots, heights, theta_g, counts, rng, out_v, out_vc,
                          out_label):
    """Fill positive and generated-negative pairs; returns the pair count.

    A capped walk is reported as ``-(block index) - 1``.
    """
    n_vertices = theta_g.shape[0]
    path = np.empty(n_vertices, np.int64)
    nbuf = np.empty(n_vertices, np.int64)
    pbuf = np.empty(n_vertices, np.float64)
    used = 0
    for b in range(roots.shape[0]):
        root = roots[b]
        t = counts[b]
        start = g_indptr[root]
        deg = g_indptr[root + 1] - start
        if deg == 0 or t == 0:
            continue
        for j in range(t):
            idx = int(rng.random() * deg)
            if idx >= deg:
                idx = deg - 1
            out_v[used] = g_indices[start + idx]
            out_vc[used] = root
            out_label[used] = 1
            used += 1
        row = parents[b]
        cap = 4 * heights[b] + 8
        for j in range(t):
            m = walk(t_indptr, t_indices, row, root, theta_g, rng, cap, path,
                     nbuf, pbuf)
            if m == WALK_ISOLATED:
                break
            if m == WALK_CAPPED:
                return -b - 1
            out_v[used] = path[m]
            out_vc[used] = root
            out_label[used] = 0
            used += 1
    return used


@njit(cache=True)
def discriminator_grad(theta_d, v, vc, label, grad):
    """grad += d/d theta_D of the labelled log-likelihood; returns its sum."""
    k = theta_d.shape[1]
    total = 0.0
    for i in range(v.shape[0]):
        a = v[i]
        c = vc[i]
        score = _sigmoid(_dot(theta_d[a], theta_d[c]))
        if label[i] == 1:
            coef = 1.0 - score
            total += math.log(max(score, D_CLAMP))
        else:
            coef = -score
            total += math.log(max(1.0 - score, D_CLAMP))
        for d in range(k):
            grad[a, d] += coef * theta_d[c, d]
            grad[c, d] += coef * theta_d[a, d]
    return total
