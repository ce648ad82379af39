"""Alternating generator/discriminator training loop."""

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .exceptions import NonFiniteUpdateError, SamplingError
from .graph import BfsForest
from .params import init_table, pretrain_table

logger = logging.getLogger(__name__)

DEFAULT_MAX_POSITIVES = 20


@dataclass(frozen=True)
class TrainConfig:
    """Hyper-parameters of a training run.

    ``dis_samples=None`` draws ``min(degree, 20)`` positives and as many
    generated negatives per root in each discriminator step.
    """

    dim: int = 20
    gen_samples: int = 20
    dis_samples: Optional[int] = None
    learning_rate: float = 1e-3
    g_steps: int = 30
    d_steps: int = 30
    max_iterations: int = 20
    pretrain_epochs: int = 0
    seed: int = 0
    tol: float = 1e-4
    patience: int = 5
    block_size: Optional[int] = None

    def __post_init__(self):
        for name in ("dim", "gen_samples", "g_steps", "d_steps", "max_iterations", "patience"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.pretrain_epochs < 0:
            raise ValueError("pretrain_epochs must be >= 0")
        if self.dis_samples is not None and self.dis_samples < 1:
            raise ValueError("dis_samples must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MetricsRecord:
    iteration: int
    value_estimate: float
    d_loss: float
    g_reward_mean: float
    wall_time: float


METRIC_COLUMNS = ["iteration", "value_estimate", "d_loss", "g_reward_mean", "wall_time"]


class TrainResult(NamedTuple):
    generator: np.ndarray
    discriminator: np.ndarray
    metrics: list


def sample_positives(graph, v_c, t, rng):
    """``t`` neighbours of ``v_c`` drawn uniformly with replacement."""
    nbrs = graph.neighbors(v_c)
    if nbrs.size == 0:
        return []
    idx = np.minimum((rng.random(t) * nbrs.size).astype(np.int64), nbrs.size - 1)
    return nbrs[idx].tolist()


def positive_counts(graph, roots, dis_samples=None):
    deg = graph.degrees[roots]
    if dis_samples is None:
        return np.minimum(deg, DEFAULT_MAX_POSITIVES).astype(np.int64)
    return np.where(deg > 0, dis_samples, 0).astype(np.int64)


def _generator_pass(forest, theta_g, theta_d, n_samples, rng, block_size):
    grad = np.zeros_like(theta_g)
    roots_out, sampled_out, reward_out = [], [], []
    tg = forest.graph
    for roots, rows, heights in forest.blocks(block_size):
        sampled = np.empty(len(roots) * n_samples, np.int64)
        reward = np.empty(len(roots) * n_samples, np.float64)
        status = _kernels.generator_pass(tg.indptr, tg.indices, rows, roots, heights,
                                         theta_g, theta_d, n_samples, rng, grad,
                                         sampled, reward)
        if status >= 0:
            raise SamplingError(f"generator walk from root {roots[status]} exceeded its step cap")
        ok = sampled >= 0
        roots_out.append(np.repeat(roots, n_samples)[ok])
        sampled_out.append(sampled[ok])
        reward_out.append(reward[ok])
    return grad, np.concatenate(roots_out), np.concatenate(sampled_out), np.concatenate(reward_out)


def _discriminator_pass(graph, forest, theta_g, theta_d, counts, rng, block_size):
    grad = np.zeros_like(theta_d)
    tg = forest.graph
    loglik = 0.0
    n_pairs = 0
    negatives = []
    offset = 0
    for roots, rows, heights in forest.blocks(block_size):
        c = counts[offset:offset + len(roots)]
        offset += len(roots)
        size = int(2 * c.sum())
        v = np.empty(size, np.int64)
        vc = np.empty(size, np.int64)
        label = np.empty(size, np.int8)
        used = _kernels.discriminator_samples(graph.indptr, graph.indices, tg.indptr,
                                              tg.indices, rows, roots, heights, theta_g,
                                              c, rng, v, vc, label)
        if used < 0:
            raise SamplingError(f"negative-sampling walk from root {roots[-used - 1]} exceeded its step cap")
        v, vc, label = v[:used], vc[:used], label[:used]
        loglik += _kernels.discriminator_grad(theta_d, v, vc, label, grad)
        n_pairs += used
        neg = label == 0
        negatives.append(np.column_stack([vc[neg], v[neg]]))
    negatives = np.concatenate(negatives) if negatives else np.empty((0, 2), np.int64)
    return grad, loglik, n_pairs, negatives


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def value_estimate(graph, roots, theta_d, generated):
    """Monte-Carlo estimate of the minimax value at the current discriminator.

    The positive term is the exact mean of ``log D`` over each root's
    neighbours; the negative term averages ``log(1 - D)`` over the
    generated ``(root, vertex)`` samples of that root.
    """
    n = graph.vertex_count
    is_root = np.zeros(n, bool)
    is_root[roots] = True
    src = np.repeat(np.arange(n), graph.degrees)
    mask = is_root[src]
    src, dst = src[mask], graph.indices[mask]
    total = 0.0
    if src.size:
        ll = _log_sigmoid(np.einsum("ij,ij->i", theta_d[src], theta_d[dst]))
        total += float(np.sum(np.bincount(src, ll, n)[is_root] / np.maximum(graph.degrees[is_root], 1)))
    if len(generated):
        r, v = generated[:, 0], generated[:, 1]
        ll = _log_sigmoid(-np.einsum("ij,ij->i", theta_d[r], theta_d[v]))
        sums = np.bincount(r, ll, n)
        cnt = np.bincount(r, minlength=n)
        has = cnt > 0
        total += float(np.sum(sums[has] / cnt[has]))
    return total


def _converged(history, tol, patience):
    if len(history) <= patience:
        return False
    recent = history[-(patience + 1):]
    for prev, cur in zip(recent[:-1], recent[1:]):
        if abs(cur - prev) >= tol * max(abs(prev), 1e-12):
            return False
    return True


def train(graph, config=None, *, forest=None, callback=None, threads=None):
    """Run the adversarial game on ``graph``.

    Parameters
    ----------
    graph : Graph
        Supplies the positive samples (observed neighbours).
    config : TrainConfig, optional
    forest : BfsForest, optional
        Trees the generator walks on; built over every vertex of ``graph``
        when omitted. Pass a shortcut forest for recommendation.
    callback : callable, optional
        Called as ``callback(record, theta_g, theta_d)`` after every
        iteration, e.g. for checkpointing.

    Returns
    -------
    TrainResult
        ``(generator, discriminator, metrics)``.
    """
    config = config or TrainConfig()
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    theta_g = init_table(graph.vertex_count, config.dim, seeds[0])
    theta_d = init_table(graph.vertex_count, config.dim, seeds[1])
    rng = np.random.default_rng(seeds[2])
    if config.pretrain_epochs:
        theta_g = pretrain_table(theta_g, graph, config.pretrain_epochs, config.learning_rate, rng)
        theta_d = pretrain_table(theta_d, graph, config.pretrain_epochs, config.learning_rate, rng)
    if forest is None:
        forest = BfsForest(graph, lazy=config.block_size is not None, threads=threads)
    roots = forest.roots
    counts = positive_counts(graph, roots, config.dis_samples)
    lr = config.learning_rate

    metrics = []
    history = []
    for it in range(1, config.max_iterations + 1):
        start = time.perf_counter()
        generated = np.empty((0, 2), np.int64)
        rewards = []
        for _ in range(config.g_steps):
            grad, r, v, w = _generator_pass(forest, theta_g, theta_d, config.gen_samples,
                                            rng, config.block_size)
            theta_g = theta_g - lr * grad
            if not np.all(np.isfinite(theta_g)):
                raise NonFiniteUpdateError(f"generator update produced non-finite values at iteration {it}")
            generated = np.column_stack([r, v])
            rewards.append(w)
        loglik = 0.0
        n_pairs = 0
        for _ in range(config.d_steps):
            grad, ll, n, _ = _discriminator_pass(graph, forest, theta_g, theta_d, counts,
                                                          rng, config.block_size)
            theta_d = theta_d + lr * grad
            if not np.all(np.isfinite(theta_d)):
                raise NonFiniteUpdateError(f"discriminator update produced non-finite values at iteration {it}")
            loglik += ll
            n_pairs += n
        rewards = np.concatenate(rewards) if rewards else np.empty(0)
        record = MetricsRecord(
            iteration=it,
            value_estimate=value_estimate(graph, roots, theta_d, generated),
            d_loss=-loglik / n_pairs if n_pairs else 0.0,
            g_reward_mean=float(rewards.mean()) if rewards.size else 0.0,
            wall_time=time.perf_counter() - start,
        )
        metrics.append(record)
        history.append(record.value_estimate)
        logger.info("iteration %d: value=%.6g d_loss=%.6g reward=%.6g (%.2fs)", it,
                    record.value_estimate, record.d_loss, record.g_reward_mean, record.wall_time)
        if callback is not None:
            callback(record, theta_g, theta_d)
        if _converged(history, config.tol, config.patience):
            logger.info("converged after %d iterations", it)
            break
    return TrainResult(theta_g, theta_d, metrics)


def write_metrics_csv(records, path, include_timing=True):
    """Write one row per iteration; ``include_timing=False`` drops
    ``wall_time`` so the file is reproducible byte for byte."""
    cols = METRIC_COLUMNS if include_timing else METRIC_COLUMNS[:-1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for rec in records:
            row = asdict(rec)
            writer.writerow([row["iteration"]] + [repr(float(row[c])) for c in cols[1:]])


def read_metrics_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [MetricsRecord(int(r["iteration"]), float(r["value_estimate"]), float(r["d_loss"]),
                          float(r["g_reward_mean"]), float(r.get("wall_time", math.nan)))
            for r in rows]
