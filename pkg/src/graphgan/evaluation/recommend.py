"""Top-K recommendation on a user-item bipartite graph."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .link import holdout_count


@dataclass
class RankingResult:
    k_list: list
    precision: dict
    recall: dict
    lists: dict = field(repr=False)
    n_users: int = 0


def hide_per_user(graph, users, fraction=0.1, seed=0):
    """Hide a share of each user's edges, keeping at least one for training.

    Returns ``(train_graph, hidden)`` where ``hidden`` is an ``(n, 2)`` array
    of ``(user, item)`` pairs.
    """
    rng = np.random.default_rng(seed)
    hidden = []
    for u in sorted(users):
        items = graph.neighbors(u)
        h = min(holdout_count(len(items), fraction), len(items) - 1)
        if h <= 0:
            continue
        pick = np.sort(rng.permutation(len(items))[:h])
        hidden.extend((u, int(items[i])) for i in pick)
    hidden = np.array(hidden, dtype=np.int64).reshape(-1, 2)
    return graph.without_edges(hidden), hidden


def recommendation_eval(embeddings, train_graph, hidden_edges, k_list, users):
    """Precision@K and recall@K of inner-product ranking.

    Each user with hidden items ranks every item it has no training edge
    to, by descending inner product and then ascending index; metrics are
    averaged over those users.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    k_list = sorted(int(k) for k in k_list)
    kmax = k_list[-1]
    is_user = np.zeros(train_graph.vertex_count, bool)
    is_user[list(users)] = True
    items = np.flatnonzero(~is_user)
    relevant = {}
    for u, i in np.asarray(hidden_edges).reshape(-1, 2).tolist():
        relevant.setdefault(u, set()).add(i)
    precision = {k: [] for k in k_list}
    recall = {k: [] for k in k_list}
    lists = {}
    for u in sorted(relevant):
        watched = np.zeros(train_graph.vertex_count, bool)
        watched[train_graph.neighbors(u)] = True
        cand = items[~watched[items]]
        if cand.size == 0:
            warnings.warn(f"user {u} has no unwatched items; skipped")
            continue
        scores = embeddings[cand] @ embeddings[u]
        order = np.lexsort((cand, -scores))
        top = cand[order[:kmax]].tolist()
        lists[u] = top
        for k in k_list:
            hits = len(set(top[:k]) & relevant[u])
            precision[k].append(hits / k)
            recall[k].append(hits / len(relevant[u]))
    return RankingResult(
        k_list=k_list,
        precision={k: float(np.mean(v)) if v else 0.0 for k, v in precision.items()},
        recall={k: float(np.mean(v)) if v else 0.0 for k, v in recall.items()},
        lists=lists,
        n_users=len(lists),
    )
